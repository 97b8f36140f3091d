//! Learned attribute distributions.
//!
//! Every scalar attribute component gets an independent Gaussian (diagonal
//! covariance). Volume ratios are multiplicative, so they are summarized by
//! their geometric mean and the standard deviation of their logarithm.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};

use super::attributes::{EdgeAttributes, ExactSum, VertexAttributes};
use super::srg::Srg;

/// Lower bound on every fitted standard deviation, in the attribute's units.
pub const STDDEV_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub stddev: f64,
}

impl Gaussian {
    /// Sample mean and Bessel-corrected standard deviation, floored.
    pub fn fit(samples: &[f64]) -> Self {
        let k = samples.len();
        assert!(k > 0, "fit needs at least one sample");
        let mean = samples.iter().copied().collect::<ExactSum>().value() / k as f64;
        Self {
            mean,
            stddev: floored_stddev(samples, mean),
        }
    }
}

fn floored_stddev(samples: &[f64], mean: f64) -> f64 {
    let k = samples.len();
    if k < 2 {
        return STDDEV_FLOOR;
    }
    let ss = samples
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<ExactSum>()
        .value();
    (ss / (k - 1) as f64).sqrt().max(STDDEV_FLOOR)
}

/// Geometric mean of positive ratios and the spread of their logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub geometric_mean: f64,
    pub log_stddev: f64,
}

impl RatioStats {
    pub fn fit(samples: &[f64]) -> Self {
        let reference = samples[0];
        // logs taken relative to the first sample, so identical samples give
        // back that sample exactly
        let rel: Vec<f64> = samples.iter().map(|r| (r / reference).ln()).collect();
        let mean_rel = rel.iter().copied().collect::<ExactSum>().value() / rel.len() as f64;
        Self {
            geometric_mean: reference * mean_rel.exp(),
            log_stddev: floored_stddev(&rel, mean_rel),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexStats {
    pub centroid: [Gaussian; 3],
    pub intensity: Gaussian,
    pub volume: Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub centroid_vector: [Gaussian; 3],
    pub volume_ratio: RatioStats,
    pub contrast: Gaussian,
}

/// Attribute distributions fitted across `samples` training graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStatistics {
    pub labels: Vec<u32>,
    pub samples: usize,
    pub vertices: Vec<VertexStats>,
    /// Row-major `n × n`; `None` on the diagonal.
    pub edges: Vec<Option<EdgeStats>>,
}

impl ModelStatistics {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn vertex(&self, i: usize) -> &VertexStats {
        &self.vertices[i]
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&EdgeStats> {
        self.edges[i * self.n() + j].as_ref()
    }
}

fn fit_vertex(samples: &[&VertexAttributes]) -> VertexStats {
    let col = |f: &dyn Fn(&VertexAttributes) -> f64| -> Gaussian {
        Gaussian::fit(&samples.iter().map(|v| f(v)).collect::<Vec<_>>())
    };
    VertexStats {
        centroid: [
            col(&|v| v.centroid[0]),
            col(&|v| v.centroid[1]),
            col(&|v| v.centroid[2]),
        ],
        intensity: col(&|v| v.mean_intensity),
        volume: col(&|v| v.volume),
    }
}

fn fit_edge(samples: &[&EdgeAttributes]) -> EdgeStats {
    let col =
        |f: &dyn Fn(&EdgeAttributes) -> f64| -> Vec<f64> { samples.iter().map(|e| f(e)).collect() };
    EdgeStats {
        centroid_vector: [
            Gaussian::fit(&col(&|e| e.centroid_vector[0])),
            Gaussian::fit(&col(&|e| e.centroid_vector[1])),
            Gaussian::fit(&col(&|e| e.centroid_vector[2])),
        ],
        volume_ratio: RatioStats::fit(&col(&|e| e.volume_ratio)),
        contrast: Gaussian::fit(&col(&|e| e.contrast)),
    }
}

/// Fits per-attribute distributions over graphs sharing one label map.
pub fn fit_model(srgs: &[Srg]) -> Result<ModelStatistics> {
    let first = srgs
        .first()
        .ok_or_else(|| SrgError::InconsistentLabelMaps("no training graphs".into()))?;
    let labels = first.labels().to_vec();
    for (k, g) in srgs.iter().enumerate() {
        if g.labels() != labels.as_slice() {
            return Err(SrgError::InconsistentLabelMaps(format!(
                "graph {k} has labels {:?}, expected {labels:?}",
                g.labels()
            )));
        }
        if let Some(i) = g.empty_vertices().first() {
            return Err(SrgError::InconsistentLabelMaps(format!(
                "graph {k} has an empty vertex for label {}",
                labels[*i]
            )));
        }
    }
    let n = labels.len();
    let vertices = (0..n)
        .map(|i| {
            let samples: Vec<&VertexAttributes> =
                srgs.iter().map(|g| g.vertex(i).expect("checked")).collect();
            fit_vertex(&samples)
        })
        .collect();
    let mut edges = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let samples: Vec<&EdgeAttributes> = srgs
                    .iter()
                    .map(|g| g.edge(i, j).expect("checked"))
                    .collect();
                edges[i * n + j] = Some(fit_edge(&samples));
            }
        }
    }
    Ok(ModelStatistics {
        labels,
        samples: srgs.len(),
        vertices,
        edges,
    })
}

/// The graph whose attributes are the fitted means.
pub fn model_graph(stats: &ModelStatistics) -> Srg {
    let vertices = stats
        .vertices
        .iter()
        .map(|v| {
            Some(VertexAttributes {
                centroid: v.centroid.map(|g| g.mean),
                mean_intensity: v.intensity.mean,
                volume: v.volume.mean,
            })
        })
        .collect();
    let edges = stats
        .edges
        .iter()
        .map(|e| {
            e.map(|e| EdgeAttributes {
                centroid_vector: e.centroid_vector.map(|g| g.mean),
                volume_ratio: e.volume_ratio.geometric_mean,
                contrast: e.contrast.mean,
            })
        })
        .collect();
    Srg::from_parts(stats.labels.clone(), vertices, edges).expect("stats are fully connected")
}

/// A model graph together with the statistics it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub graph: Srg,
    pub stats: ModelStatistics,
}

impl Model {
    pub fn fit(srgs: &[Srg]) -> Result<Self> {
        let stats = fit_model(srgs)?;
        Ok(Self::from_stats(stats))
    }

    pub fn from_stats(stats: ModelStatistics) -> Self {
        Self {
            graph: model_graph(&stats),
            stats,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn labels(&self) -> &[u32] {
        self.graph.labels()
    }
}
