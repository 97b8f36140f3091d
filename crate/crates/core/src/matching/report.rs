//! Text forms of assignments and match reports.

use std::fmt::Write as _;

use crate::error::{Result, SrgError};

use super::cost::Solution;
use super::weights::CostWeights;

/// One 1-based model index per super-region, one per line.
pub fn format_assignment(assignment: &[usize]) -> String {
    let mut out = String::new();
    for a in assignment {
        writeln!(out, "{}", a + 1).unwrap();
    }
    out
}

/// Parses a whitespace- or comma-separated list of 1-based model indices and
/// checks it against the expected region count and model size. Returns
/// 0-based indices.
pub fn parse_assignment(text: &str, n_regions: usize, n_model: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let position = out.len() + 1;
            let v: i64 = tok.parse().map_err(|_| SrgError::InvalidAssignment {
                position,
                value: tok.to_string(),
            })?;
            if v < 1 || v as u64 > n_model as u64 {
                return Err(SrgError::InvalidAssignment {
                    position,
                    value: tok.to_string(),
                });
            }
            out.push(v as usize - 1);
        }
    }
    if out.len() != n_regions {
        return Err(SrgError::AssignmentLengthMismatch {
            got: out.len(),
            expected: n_regions,
        });
    }
    Ok(out)
}

/// Human-readable match report.
pub fn format_match_report(solution: &Solution, weights: &CostWeights) -> String {
    let r = &solution.report;
    let labels = solution.observation.labels();
    let mut out = String::new();
    writeln!(out, "cost {}", r.total).unwrap();
    writeln!(out, "alpha {}", weights.alpha).unwrap();
    writeln!(out, "vertex_weights {}", weights.vertex).unwrap();
    writeln!(out, "edge_weights {}", weights.edge).unwrap();
    writeln!(out, "vertex_term {}", r.vertex_term).unwrap();
    writeln!(out, "  centroid {}", r.vertex_parts[0]).unwrap();
    writeln!(out, "  intensity {}", r.vertex_parts[1]).unwrap();
    writeln!(out, "  volume {}", r.vertex_parts[2]).unwrap();
    writeln!(out, "  empty {}", r.vertex_penalty).unwrap();
    writeln!(out, "edge_term {}", r.edge_term).unwrap();
    writeln!(out, "  centroid_vector {}", r.edge_parts[0]).unwrap();
    writeln!(out, "  volume_ratio {}", r.edge_parts[1]).unwrap();
    writeln!(out, "  contrast {}", r.edge_parts[2]).unwrap();
    writeln!(out, "  empty {}", r.edge_penalty).unwrap();
    for (j, c) in r.vertex_costs.iter().enumerate() {
        let state = if solution.observation.is_empty_vertex(j) {
            " EMPTY"
        } else {
            ""
        };
        writeln!(
            out,
            "vertex {} label={} cost={}{}",
            j + 1,
            labels[j],
            c,
            state
        )
        .unwrap();
    }
    for (i, a) in solution.assignment.iter().enumerate() {
        writeln!(out, "region {} -> {} (label {})", i + 1, a + 1, labels[*a]).unwrap();
    }
    out
}
