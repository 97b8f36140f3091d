//! Vertex-weight sweeps over the greedy solution.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Result, SrgError};
use crate::graph::{Model, RegionTable};

use super::cost::{evaluate_table, CostReport};
use super::distance::DistanceSpec;
use super::greedy::greedy_with;
use super::weights::{CostWeights, VertexWeights};

/// The nine (centroid, intensity) weight pairs of the exploratory protocol.
pub const TABLE1_PAIRS: [(f64, f64); 9] = [
    (0.0, 1.0),
    (0.001, 0.999),
    (0.005, 0.995),
    (0.01, 0.99),
    (0.02, 0.98),
    (0.1, 0.9),
    (0.2, 0.8),
    (0.5, 0.5),
    (1.0, 0.0),
];

/// `base` with its vertex weights replaced by each protocol pair (volume 0).
pub fn table1_profiles(base: &CostWeights) -> Vec<CostWeights> {
    TABLE1_PAIRS
        .iter()
        .map(|&(c, i)| base.with_vertex(VertexWeights::new(c, i, 0.0)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub weights: CostWeights,
    pub assignment: Vec<usize>,
    pub cost: CostReport,
}

/// The trailing run of rows that share one greedy assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    /// First row of the run.
    pub start: usize,
    pub rows: usize,
    /// Centroid weight of the first row of the run.
    pub centroid_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub plateau: Option<Plateau>,
}

/// Finds the longest suffix of identical assignments spanning at least two
/// rows.
pub fn detect_plateau(rows: &[SweepRow]) -> Option<Plateau> {
    let last = rows.last()?;
    let mut start = rows.len() - 1;
    while start > 0 && rows[start - 1].assignment == last.assignment {
        start -= 1;
    }
    (rows.len() - start >= 2).then(|| Plateau {
        start,
        rows: rows.len() - start,
        centroid_threshold: rows[start].weights.vertex.centroid,
    })
}

/// Rebuilds the greedy solution under each profile and evaluates its full cost.
pub fn sweep_weights(
    profiles: &[CostWeights],
    table: &RegionTable,
    model: &Model,
) -> Result<SweepTable> {
    if profiles.is_empty() {
        return Err(SrgError::InvalidWeights(
            "sweep needs at least one profile".into(),
        ));
    }
    let dist = DistanceSpec::from_stats(&model.stats);
    let super_srg = table.super_graph();
    let rows = profiles
        .iter()
        .map(|w| {
            w.validate()?;
            let assignment = greedy_with(&super_srg, &model.graph, &dist, w);
            let sol = evaluate_table(&assignment, table, model, &dist, w)?;
            Ok(SweepRow {
                weights: *w,
                assignment,
                cost: sol.report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let plateau = detect_plateau(&rows);
    Ok(SweepTable { rows, plateau })
}

impl SweepTable {
    /// Tab-separated table: centroid α, intensity α, cost, then the vertex and
    /// edge terms, followed by one plateau line.
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("centroid_alpha\tintensity_alpha\tcost\tvertex_term\tedge_term\n");
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.weights.vertex.centroid,
                r.weights.vertex.intensity,
                r.cost.total,
                r.cost.vertex_term,
                r.cost.edge_term
            )
            .unwrap();
        }
        match &self.plateau {
            Some(p) => writeln!(
                out,
                "plateau\tcentroid_alpha>={}\trows={}..{}",
                p.centroid_threshold,
                p.start + 1,
                p.start + p.rows
            ),
            None => writeln!(out, "plateau\tnone"),
        }
        .unwrap();
        out
    }
}

/// Profiles file: one `centroid,intensity[,volume]` vertex-weight triple per
/// line; `#` starts a comment. Alpha and edge weights come from `base`.
pub fn parse_profiles(text: &str, base: &CostWeights) -> Result<Vec<CostWeights>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| SrgError::InvalidWeights(format!("profiles line {}: `{line}`", n + 1)))?;
        let v = match nums.as_slice() {
            [c, i] => VertexWeights::new(*c, *i, 0.0),
            [c, i, v] => VertexWeights::new(*c, *i, *v),
            _ => {
                return Err(SrgError::InvalidWeights(format!(
                    "profiles line {}: expected 2 or 3 weights",
                    n + 1
                )))
            }
        };
        let w = base.with_vertex(v);
        w.validate()?;
        out.push(w);
    }
    Ok(out)
}
