//! Straightforward re-derivations of the library's quantities, written
//! without any of its helpers.

use srg_core::graph::ModelStatistics;
use srg_core::{CostWeights, LabelVolume, ScalarVolume};

#[derive(Debug, Clone, Copy)]
pub struct Attrs {
    pub centroid: [f64; 3],
    pub intensity: f64,
    pub volume: f64,
}

/// Attributes of the voxels selected by `keep`, scanning in voxel order.
/// Positions are summed as integer indices so the centroid carries no
/// accumulated rounding; a voxel center sits at `(index + 0.5) * spacing`.
pub fn attrs_where(scalar: &ScalarVolume, keep: impl Fn(usize) -> bool) -> Option<Attrs> {
    let [nx, ny, nz] = scalar.dims();
    let s = scalar.spacing();
    let mut count = 0u64;
    let mut pos = [0u64; 3];
    let mut sum = 0.0f64;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let idx = x + nx * (y + ny * z);
                if keep(idx) {
                    count += 1;
                    pos[0] += x as u64;
                    pos[1] += y as u64;
                    pos[2] += z as u64;
                    sum += scalar.data()[idx];
                }
            }
        }
    }
    let n = count as f64;
    let voxel = s[0] * s[1] * s[2];
    (count > 0).then(|| Attrs {
        centroid: [0, 1, 2].map(|k| (pos[k] as f64 / n + 0.5) * s[k]),
        intensity: sum / n,
        volume: n * voxel,
    })
}

pub fn label_attrs(scalar: &ScalarVolume, labels: &LabelVolume, label: u32) -> Option<Attrs> {
    attrs_where(scalar, |i| labels.data()[i] == label)
}

fn z(x: f64, mean: f64, sd: f64) -> f64 {
    (x - mean) / sd
}

/// Weighted vertex cost of `a` against model vertex `j`.
pub fn vertex_cost(stats: &ModelStatistics, j: usize, a: &Attrs, w: [f64; 3]) -> f64 {
    let v = &stats.vertices[j];
    let dc = (0..3)
        .map(|k| z(a.centroid[k], v.centroid[k].mean, v.centroid[k].stddev).powi(2))
        .sum::<f64>()
        .sqrt();
    let di = z(a.intensity, v.intensity.mean, v.intensity.stddev).abs();
    let dv = z(a.volume, v.volume.mean, v.volume.stddev).abs();
    w[0] * dc + w[1] * di + w[2] * dv
}

/// Weighted cost of the relation from `a` (vertex `j`) to `b` (vertex `k`).
pub fn edge_cost(
    stats: &ModelStatistics,
    j: usize,
    k: usize,
    a: &Attrs,
    b: &Attrs,
    w: [f64; 3],
) -> f64 {
    let e = stats.edge(j, k).unwrap();
    let dvec = [0, 1, 2].map(|c| b.centroid[c] - a.centroid[c]);
    let dd = (0..3)
        .map(|c| {
            z(
                dvec[c],
                e.centroid_vector[c].mean,
                e.centroid_vector[c].stddev,
            )
            .powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let dr = ((b.volume / a.volume).ln() - e.volume_ratio.geometric_mean.ln()).abs()
        / e.volume_ratio.log_stddev;
    let dk = z(
        b.intensity - a.intensity,
        e.contrast.mean,
        e.contrast.stddev,
    )
    .abs();
    w[0] * dd + w[1] * dr + w[2] * dk
}

/// The solution cost transcribed directly: joined attributes by voxel scan,
/// alpha-weighted mean vertex cost plus (1 - alpha)-weighted edge cost over
/// n², EMPTY terms charged the penalty times the group's weight sum.
pub fn solution_cost(
    stats: &ModelStatistics,
    scalar: &ScalarVolume,
    supers: &LabelVolume,
    assignment: &[usize],
    w: &CostWeights,
) -> f64 {
    let n = stats.labels.len();
    let joined: Vec<Option<Attrs>> = (0..n)
        .map(|j| {
            attrs_where(scalar, |i| {
                let r = supers.data()[i];
                r != 0 && assignment[r as usize - 1] == j
            })
        })
        .collect();
    let vw = [w.vertex.centroid, w.vertex.intensity, w.vertex.volume];
    let ew = [w.edge.centroid_vector, w.edge.volume_ratio, w.edge.contrast];
    let mut vsum = 0.0;
    for (j, a) in joined.iter().enumerate() {
        vsum += match a {
            Some(a) => vertex_cost(stats, j, a, vw),
            None => w.empty_penalty * (vw[0] + vw[1] + vw[2]),
        };
    }
    let mut esum = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            esum += match (&joined[j], &joined[k]) {
                (Some(a), Some(b)) => edge_cost(stats, j, k, a, b, ew),
                _ => w.empty_penalty * (ew[0] + ew[1] + ew[2]),
            };
        }
    }
    w.alpha / n as f64 * vsum + (1.0 - w.alpha) / (n * n) as f64 * esum
}

/// Model vertices whose greedy vertex cost for region `r` (1-based label) is
/// within `tol` (relative) of the minimum, lowest index first. `None` for a
/// region without voxels.
pub fn greedy_candidates(
    stats: &ModelStatistics,
    scalar: &ScalarVolume,
    supers: &LabelVolume,
    r: u32,
    w: [f64; 3],
    tol: f64,
) -> Option<Vec<usize>> {
    let a = label_attrs(scalar, supers, r)?;
    let costs: Vec<f64> = (0..stats.labels.len())
        .map(|j| vertex_cost(stats, j, &a, w))
        .collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    Some(
        (0..costs.len())
            .filter(|&j| costs[j] - best <= tol * best.abs().max(f64::MIN_POSITIVE))
            .collect(),
    )
}

/// Mean and Bessel-corrected standard deviation, two passes.
pub fn two_pass(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
