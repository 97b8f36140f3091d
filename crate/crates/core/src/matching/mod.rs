//! Assigning super-regions to model structures.
//!
//! A solution maps every super-region to one model vertex. Regions sharing a
//! prediction are joined into an observation graph with one vertex per model
//! vertex, and the solution's cost is
//!
//! ```text
//! C(S) = alpha / n * Σ_j c_V(j) + (1 - alpha) / n² * Σ_j Σ_{k≠j} c_E(j, k)
//! ```
//!
//! where `c_V` and `c_E` are weighted sums of normalized attribute distances
//! between observation and model. Model indices are 0-based in code and
//! 1-based in every file and report.

mod cost;
mod distance;
mod exhaustive;
mod greedy;
mod report;
mod sweep;
mod weights;

pub use cost::{evaluate, evaluate_table, graph_cost, join_regions, CostReport, Solution};
pub use distance::{
    edge_cost, edge_distances, vertex_cost, vertex_distances, DistanceSpec, EdgeScales,
    VertexScales,
};
pub use exhaustive::{exhaustive_best, exhaustive_with, DEFAULT_EXHAUSTIVE_CAP};
pub use greedy::{greedy_initial, greedy_with};
pub use report::{format_assignment, format_match_report, parse_assignment};
pub use sweep::{
    detect_plateau, parse_profiles, sweep_weights, table1_profiles, Plateau, SweepRow, SweepTable,
    TABLE1_PAIRS,
};
pub use weights::{
    CostWeights, EdgeWeights, GreedyProfile, VertexWeights, DEFAULT_EMPTY_PENALTY,
    WEIGHT_SUM_TOLERANCE,
};
