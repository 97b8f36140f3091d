//! Normalized attribute distances and the per-vertex / per-edge costs.
//!
//! Vector attributes use the Euclidean norm of the component-wise z-scored
//! difference, scalar attributes the absolute z-scored difference, and volume
//! ratios the absolute difference of logarithms over the log-space spread.

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeAttributes, ModelStatistics, VertexAttributes};

use super::weights::{EdgeWeights, VertexWeights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexScales {
    pub centroid: [f64; 3],
    pub intensity: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeScales {
    pub centroid_vector: [f64; 3],
    /// Spread of `ln(volume_ratio)`.
    pub log_volume_ratio: f64,
    pub contrast: f64,
}

impl VertexScales {
    pub fn uniform(s: f64) -> Self {
        Self {
            centroid: [s; 3],
            intensity: s,
            volume: s,
        }
    }
}

impl EdgeScales {
    pub fn uniform(s: f64) -> Self {
        Self {
            centroid_vector: [s; 3],
            log_volume_ratio: s,
            contrast: s,
        }
    }
}

/// Normalization scales for every model vertex and ordered model edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpec {
    n: usize,
    vertices: Vec<VertexScales>,
    edges: Vec<EdgeScales>,
}

impl DistanceSpec {
    /// Scales are the model's fitted standard deviations.
    pub fn from_stats(stats: &ModelStatistics) -> Self {
        let n = stats.n();
        let vertices = stats
            .vertices
            .iter()
            .map(|v| VertexScales {
                centroid: v.centroid.map(|g| g.stddev),
                intensity: v.intensity.stddev,
                volume: v.volume.stddev,
            })
            .collect();
        let edges = stats
            .edges
            .iter()
            .map(|e| match e {
                Some(e) => EdgeScales {
                    centroid_vector: e.centroid_vector.map(|g| g.stddev),
                    log_volume_ratio: e.volume_ratio.log_stddev,
                    contrast: e.contrast.stddev,
                },
                None => EdgeScales::uniform(1.0),
            })
            .collect();
        Self { n, vertices, edges }
    }

    /// Every scale equal to `s`.
    pub fn uniform(n: usize, s: f64) -> Self {
        Self {
            n,
            vertices: vec![VertexScales::uniform(s); n],
            edges: vec![EdgeScales::uniform(s); n * n],
        }
    }

    /// Every scale multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexScales {
                    centroid: v.centroid.map(|c| c * factor),
                    intensity: v.intensity * factor,
                    volume: v.volume * factor,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeScales {
                    centroid_vector: e.centroid_vector.map(|c| c * factor),
                    log_volume_ratio: e.log_volume_ratio * factor,
                    contrast: e.contrast * factor,
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex(&self, i: usize) -> &VertexScales {
        &self.vertices[i]
    }

    pub fn edge(&self, i: usize, j: usize) -> &EdgeScales {
        &self.edges[i * self.n + j]
    }
}

fn scaled_norm(a: [f64; 3], b: [f64; 3], s: [f64; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let d = (a[k] - b[k]) / s[k];
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Unweighted distances (centroid, intensity, volume).
pub fn vertex_distances(
    obs: &VertexAttributes,
    model: &VertexAttributes,
    scales: &VertexScales,
) -> [f64; 3] {
    [
        scaled_norm(obs.centroid, model.centroid, scales.centroid),
        (obs.mean_intensity - model.mean_intensity).abs() / scales.intensity,
        (obs.volume - model.volume).abs() / scales.volume,
    ]
}

/// Unweighted distances (centroid vector, volume ratio, contrast).
pub fn edge_distances(
    obs: &EdgeAttributes,
    model: &EdgeAttributes,
    scales: &EdgeScales,
) -> [f64; 3] {
    [
        scaled_norm(
            obs.centroid_vector,
            model.centroid_vector,
            scales.centroid_vector,
        ),
        (obs.volume_ratio / model.volume_ratio).ln().abs() / scales.log_volume_ratio,
        (obs.contrast - model.contrast).abs() / scales.contrast,
    ]
}

fn weighted(w: [f64; 3], d: [f64; 3]) -> f64 {
    w[0] * d[0] + w[1] * d[1] + w[2] * d[2]
}

/// Weighted vertex cost between an observed and a model vertex.
pub fn vertex_cost(
    obs: &VertexAttributes,
    model: &VertexAttributes,
    weights: &VertexWeights,
    scales: &VertexScales,
) -> f64 {
    weighted(weights.as_array(), vertex_distances(obs, model, scales))
}

/// Weighted edge cost between an observed and a model edge.
pub fn edge_cost(
    obs: &EdgeAttributes,
    model: &EdgeAttributes,
    weights: &EdgeWeights,
    scales: &EdgeScales,
) -> f64 {
    weighted(weights.as_array(), edge_distances(obs, model, scales))
}
