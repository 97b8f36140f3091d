use serde::Serialize;

use crate::error::{Result, SrgError};
use crate::graph::{Model, RegionTable, Srg};
use crate::volume::{LabelVolume, ScalarVolume};

use super::distance::{edge_distances, vertex_distances, DistanceSpec};
use super::weights::CostWeights;

/// Breakdown of a solution's cost.
///
/// `vertex_term = alpha / n * Σ_j c_V(j)` and
/// `edge_term = (1 - alpha) / n² * Σ_{j≠k} c_E(j, k)`; the `*_parts` arrays
/// hold each attribute's share of its term and `*_penalty` the share charged
/// to EMPTY vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub total: f64,
    pub vertex_term: f64,
    pub edge_term: f64,
    /// centroid, intensity, volume
    pub vertex_parts: [f64; 3],
    pub vertex_penalty: f64,
    /// centroid vector, volume ratio, contrast
    pub edge_parts: [f64; 3],
    pub edge_penalty: f64,
    /// Unscaled `c_V` for each observation vertex.
    pub vertex_costs: Vec<f64>,
    /// Model vertex indices that received no regions.
    pub empty_vertices: Vec<usize>,
}

/// An assignment of super-regions to model vertices with its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// 0-based model vertex index per super-region.
    pub assignment: Vec<usize>,
    pub observation: Srg,
    pub report: CostReport,
}

/// Cost of an observation graph against the model, vertex `j` of one
/// matched with vertex `j` of the other.
pub fn graph_cost(
    obs: &Srg,
    model: &Srg,
    dist: &DistanceSpec,
    weights: &CostWeights,
) -> Result<CostReport> {
    let n = model.n();
    if obs.n() != n || dist.n() != n {
        return Err(SrgError::InconsistentLabelMaps(format!(
            "observation has {} vertices, model {n}, scales {}",
            obs.n(),
            dist.n()
        )));
    }
    let vw = weights.vertex.as_array();
    let ew = weights.edge.as_array();
    let mut vertex_parts = [0.0; 3];
    let mut vertex_penalty = 0.0;
    let mut vertex_costs = Vec::with_capacity(n);
    for j in 0..n {
        let m = model
            .vertex(j)
            .ok_or_else(|| SrgError::InconsistentLabelMaps(format!("model vertex {j} is empty")))?;
        match obs.vertex(j) {
            Some(o) => {
                let d = vertex_distances(o, m, dist.vertex(j));
                let mut c = 0.0;
                for a in 0..3 {
                    vertex_parts[a] += vw[a] * d[a];
                    c += vw[a] * d[a];
                }
                vertex_costs.push(c);
            }
            None => {
                vertex_penalty += weights.vertex_penalty();
                vertex_costs.push(weights.vertex_penalty());
            }
        }
    }
    let mut edge_parts = [0.0; 3];
    let mut edge_penalty = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let m = model.edge(j, k).ok_or_else(|| {
                SrgError::InconsistentLabelMaps(format!("model edge ({j}, {k}) is missing"))
            })?;
            match obs.edge(j, k) {
                Some(o) => {
                    let d = edge_distances(o, m, dist.edge(j, k));
                    for a in 0..3 {
                        edge_parts[a] += ew[a] * d[a];
                    }
                }
                None => edge_penalty += weights.edge_penalty(),
            }
        }
    }
    let vscale = weights.alpha / n as f64;
    let escale = (1.0 - weights.alpha) / (n * n) as f64;
    let vertex_parts = vertex_parts.map(|p| p * vscale);
    let edge_parts = edge_parts.map(|p| p * escale);
    let vertex_penalty = vertex_penalty * vscale;
    let edge_penalty = edge_penalty * escale;
    let vertex_term = vertex_parts.iter().sum::<f64>() + vertex_penalty;
    let edge_term = edge_parts.iter().sum::<f64>() + edge_penalty;
    Ok(CostReport {
        total: vertex_term + edge_term,
        vertex_term,
        edge_term,
        vertex_parts,
        vertex_penalty,
        edge_parts,
        edge_penalty,
        vertex_costs,
        empty_vertices: obs.empty_vertices(),
    })
}

/// Joins regions by prediction, recomputing attributes over the union of
/// their voxels. Model vertices with no regions come out EMPTY.
pub fn join_regions(
    super_labels: &LabelVolume,
    scalar: &ScalarVolume,
    assignment: &[usize],
    model_labels: &[u32],
) -> Result<Srg> {
    RegionTable::from_volumes(super_labels, scalar)?.join(assignment, model_labels)
}

/// Evaluates an assignment against precomputed region statistics.
pub fn evaluate_table(
    assignment: &[usize],
    table: &RegionTable,
    model: &Model,
    dist: &DistanceSpec,
    weights: &CostWeights,
) -> Result<Solution> {
    let observation = table.join(assignment, model.labels())?;
    let report = graph_cost(&observation, &model.graph, dist, weights)?;
    Ok(Solution {
        assignment: assignment.to_vec(),
        observation,
        report,
    })
}

/// Full evaluation of an assignment (0-based model indices per region).
pub fn evaluate(
    assignment: &[usize],
    super_labels: &LabelVolume,
    scalar: &ScalarVolume,
    model: &Model,
    weights: &CostWeights,
) -> Result<Solution> {
    weights.validate()?;
    let table = RegionTable::from_volumes(super_labels, scalar)?;
    let dist = DistanceSpec::from_stats(&model.stats);
    evaluate_table(assignment, &table, model, &dist, weights)
}
