use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};
use crate::volume::{Geometry, LabelVolume, Volume};

use super::{Element, GradientVolume};

/// Parameters that produced a super-segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedPolicy {
    /// Regional minima no deeper than this were suppressed (h-minima).
    pub min_depth: f64,
    /// Face connectivity used for minima, components and flooding.
    pub connectivity: u8,
    /// Structuring element of the gradient, when known.
    pub element: Option<Element>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersegResult {
    /// Regions labeled `1..=n_super`; no voxel is left at 0.
    pub labels: LabelVolume,
    pub n_super: usize,
    pub policy: SeedPolicy,
}

/// Min-heap entry ordered by (value, insertion sequence).
#[derive(Debug, Clone, Copy)]
struct Entry {
    value: f64,
    seq: u64,
    index: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reconstruction by erosion of `f + h` over `f`.
///
/// Computed as a min-max path problem: the result at `p` is the lowest level
/// at which water poured at height `f(q) + h` anywhere can reach `p`.
fn h_minima(g: &Geometry, f: &[f64], h: f64) -> Vec<f64> {
    if h == 0.0 {
        return f.to_vec();
    }
    let mut level: Vec<f64> = f.iter().map(|v| v + h).collect();
    let mut heap: BinaryHeap<Entry> = level
        .iter()
        .enumerate()
        .map(|(i, &value)| Entry {
            value,
            seq: i as u64,
            index: i,
        })
        .collect();
    let mut seq = f.len() as u64;
    while let Some(Entry { value, index, .. }) = heap.pop() {
        if value > level[index] {
            continue;
        }
        for n in g.neighbors6(index) {
            let cand = value.max(f[n]);
            if cand < level[n] {
                level[n] = cand;
                heap.push(Entry {
                    value: cand,
                    seq,
                    index: n,
                });
                seq += 1;
            }
        }
    }
    level
}

/// Labels each 6-connected regional-minimum plateau of `f` with 1, 2, ... in
/// order of its smallest voxel index. Other voxels stay 0.
fn regional_minima(g: &Geometry, f: &[f64]) -> (Vec<u32>, usize) {
    let mut seeds = vec![0u32; f.len()];
    let mut visited = vec![false; f.len()];
    let mut plateau = Vec::new();
    let mut queue = VecDeque::new();
    let mut count = 0usize;
    for start in 0..f.len() {
        if visited[start] {
            continue;
        }
        let value = f[start];
        plateau.clear();
        visited[start] = true;
        queue.push_back(start);
        let mut is_minimum = true;
        while let Some(i) = queue.pop_front() {
            plateau.push(i);
            for n in g.neighbors6(i) {
                if f[n] < value {
                    is_minimum = false;
                } else if f[n] == value && !visited[n] {
                    visited[n] = true;
                    queue.push_back(n);
                }
            }
        }
        if is_minimum {
            count += 1;
            for &i in &plateau {
                seeds[i] = count as u32;
            }
        }
    }
    (seeds, count)
}

/// Seeded priority-flood watershed.
///
/// Seeds are the regional minima left after suppressing minima of depth
/// `min_depth` or less. Every voxel joins the region that first reaches it;
/// there are no watershed lines.
pub fn watershed(grad: &GradientVolume, min_depth: f64) -> Result<SupersegResult> {
    if !(min_depth.is_finite() && min_depth >= 0.0) {
        return Err(SrgError::Config(format!(
            "min_depth must be finite and ≥ 0, got {min_depth}"
        )));
    }
    let g = *grad.geometry();
    if g.is_empty() {
        return Err(SrgError::EmptyVolume);
    }
    let f = grad.data();
    let filtered = h_minima(&g, f, min_depth);
    let (mut labels, n_super) = regional_minima(&g, &filtered);

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 {
            heap.push(Entry {
                value: f[i],
                seq,
                index: i,
            });
            seq += 1;
        }
    }
    while let Some(Entry { index, .. }) = heap.pop() {
        let label = labels[index];
        for n in g.neighbors6(index) {
            if labels[n] == 0 {
                labels[n] = label;
                heap.push(Entry {
                    value: f[n],
                    seq,
                    index: n,
                });
                seq += 1;
            }
        }
    }
    debug_assert!(labels.iter().all(|&l| l != 0));

    Ok(SupersegResult {
        labels: Volume::new(g, labels)?,
        n_super,
        policy: SeedPolicy {
            min_depth,
            connectivity: 6,
            element: None,
        },
    })
}
