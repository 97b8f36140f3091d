use crate::graph::{Model, Srg};

use super::distance::{vertex_cost, DistanceSpec};
use super::weights::CostWeights;

/// Greedy initial solution against an explicit model graph and scales.
///
/// Each super-vertex independently takes the model vertex of lowest vertex
/// cost under the greedy weight profile; ties go to the lowest index. A
/// super-vertex without voxels is assigned to vertex 0.
pub fn greedy_with(
    super_srg: &Srg,
    model: &Srg,
    dist: &DistanceSpec,
    weights: &CostWeights,
) -> Vec<usize> {
    let w = weights.greedy_vertex_weights();
    (0..super_srg.n())
        .map(|j| {
            let Some(obs) = super_srg.vertex(j) else {
                return 0;
            };
            let mut best = 0;
            let mut best_cost = f64::INFINITY;
            for i in 0..model.n() {
                if let Some(m) = model.vertex(i) {
                    let c = vertex_cost(obs, m, &w, dist.vertex(i));
                    if c < best_cost {
                        best = i;
                        best_cost = c;
                    }
                }
            }
            best
        })
        .collect()
}

/// Greedy initial solution, normalized by the model's fitted spreads.
pub fn greedy_initial(super_srg: &Srg, model: &Model, weights: &CostWeights) -> Vec<usize> {
    greedy_with(
        super_srg,
        &model.graph,
        &DistanceSpec::from_stats(&model.stats),
        weights,
    )
}
