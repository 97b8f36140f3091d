use crate::error::{Result, SrgError};
use crate::graph::{Model, RegionTable};

use super::cost::{evaluate_table, CostReport};
use super::distance::DistanceSpec;
use super::weights::CostWeights;

/// Default limit on `n^n_super` for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 250_000;

/// Globally cheapest assignment by enumeration. Assignments are visited in
/// lexicographic order and only a strictly lower cost replaces the incumbent,
/// so ties resolve to the lexicographically smallest assignment.
pub fn exhaustive_best(
    table: &RegionTable,
    model: &Model,
    weights: &CostWeights,
    cap: u128,
) -> Result<(Vec<usize>, CostReport)> {
    let dist = DistanceSpec::from_stats(&model.stats);
    exhaustive_with(table, model, &dist, weights, cap)
}

pub fn exhaustive_with(
    table: &RegionTable,
    model: &Model,
    dist: &DistanceSpec,
    weights: &CostWeights,
    cap: u128,
) -> Result<(Vec<usize>, CostReport)> {
    let n = model.n();
    let m = table.n_regions();
    let size = (n as u128)
        .checked_pow(m as u32)
        .filter(|&s| s <= cap)
        .ok_or(SrgError::InstanceTooLarge {
            size: (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX),
            cap,
        })?;
    if size == 0 {
        return Err(SrgError::InconsistentLabelMaps(
            "model has no vertices".into(),
        ));
    }
    let mut current = vec![0usize; m];
    let mut best: Option<(Vec<usize>, CostReport)> = None;
    loop {
        let sol = evaluate_table(&current, table, model, dist, weights)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| sol.report.total < b.total)
        {
            best = Some((current.clone(), sol.report));
        }
        // odometer, last position fastest
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one assignment"));
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < n {
                break;
            }
            current[pos] = 0;
        }
    }
}
