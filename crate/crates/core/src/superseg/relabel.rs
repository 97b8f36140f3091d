use std::collections::VecDeque;

use crate::error::Result;
use crate::volume::{Geometry, LabelVolume, Volume};

/// Splits voxels into 6-connected components of equal `key`, numbering them
/// 1.. by smallest contained linear index.
fn components_by<K: PartialEq>(g: &Geometry, key: impl Fn(usize) -> K) -> Vec<u32> {
    let mut out = vec![0u32; g.len()];
    let mut queue = VecDeque::new();
    let mut next = 0u32;
    for start in 0..g.len() {
        if out[start] != 0 {
            continue;
        }
        next += 1;
        out[start] = next;
        let k = key(start);
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for n in g.neighbors6(i) {
                if out[n] == 0 && key(n) == k {
                    out[n] = next;
                    queue.push_back(n);
                }
            }
        }
    }
    out
}

/// Gives every 6-connected component of every input label (background
/// included) a fresh label `1..=m`, ordered by smallest linear voxel index.
pub fn relabel_connected(labels: &LabelVolume) -> LabelVolume {
    let data = labels.data();
    let out = components_by(labels.geometry(), |i| data[i]);
    Volume::new(*labels.geometry(), out).expect("same geometry")
}

/// Common refinement of two labelings: connected components of voxels that
/// agree on both labels.
pub fn intersect_labelings(a: &LabelVolume, b: &LabelVolume) -> Result<LabelVolume> {
    a.geometry().ensure_same(b.geometry())?;
    let (da, db) = (a.data(), b.data());
    let out = components_by(a.geometry(), |i| (da[i], db[i]));
    Volume::new(*a.geometry(), out)
}
