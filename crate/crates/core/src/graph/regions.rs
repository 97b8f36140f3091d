use crate::error::{Result, SrgError};
use crate::volume::{Geometry, LabelVolume, ScalarVolume};

use super::attributes::{ExactSum, VertexAttributes};
use super::srg::Srg;

/// Sufficient statistics of a voxel set. Integer index sums and an exact
/// intensity sum make the derived attributes independent of accumulation
/// order, so merged regions reproduce a direct scan bit for bit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionStats {
    pub count: u64,
    pub index_sum: [u64; 3],
    pub intensity_sum: ExactSum,
}

impl RegionStats {
    pub fn push(&mut self, coords: [usize; 3], intensity: f64) {
        self.count += 1;
        for (s, &c) in self.index_sum.iter_mut().zip(&coords) {
            *s += c as u64;
        }
        self.intensity_sum.add(intensity);
    }

    pub fn merge(&mut self, other: &RegionStats) {
        self.count += other.count;
        for (s, o) in self.index_sum.iter_mut().zip(&other.index_sum) {
            *s += o;
        }
        self.intensity_sum.merge(&other.intensity_sum);
    }

    /// Attributes of the set, or `None` when it holds no voxels.
    pub fn attributes(&self, geometry: &Geometry) -> Option<VertexAttributes> {
        if self.count == 0 {
            return None;
        }
        let n = self.count as f64;
        let centroid =
            std::array::from_fn(|i| (self.index_sum[i] as f64 / n + 0.5) * geometry.spacing[i]);
        Some(VertexAttributes {
            centroid,
            mean_intensity: self.intensity_sum.value() / n,
            volume: n * geometry.voxel_volume(),
        })
    }
}

/// Accumulates stats for every voxel whose label maps to a slot.
pub(crate) fn accumulate(
    scalar: &ScalarVolume,
    labels: &LabelVolume,
    slots: usize,
    slot_of: impl Fn(u32) -> Option<usize>,
) -> Result<Vec<RegionStats>> {
    scalar.geometry().ensure_same(labels.geometry())?;
    let g = scalar.geometry();
    let mut stats = vec![RegionStats::default(); slots];
    for (i, (&v, &l)) in scalar.data().iter().zip(labels.data()).enumerate() {
        if let Some(s) = slot_of(l) {
            stats[s].push(g.coords(i), v);
        }
    }
    Ok(stats)
}

/// Per-region statistics of a super-segmentation whose regions carry labels
/// `1..=n_super`. Region `j` (0-based) is label `j + 1`; label 0 is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTable {
    geometry: Geometry,
    regions: Vec<RegionStats>,
}

impl RegionTable {
    pub fn from_volumes(super_labels: &LabelVolume, scalar: &ScalarVolume) -> Result<Self> {
        let n = super_labels.max_label() as usize;
        let regions = accumulate(scalar, super_labels, n, |l| {
            (l != 0).then(|| l as usize - 1)
        })?;
        Ok(Self {
            geometry: *scalar.geometry(),
            regions,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn n_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn region(&self, j: usize) -> &RegionStats {
        &self.regions[j]
    }

    /// The super-observation graph: one vertex per region, labels `1..=n_super`.
    pub fn super_graph(&self) -> Srg {
        let labels = (1..=self.regions.len() as u32).collect();
        let vertices = self
            .regions
            .iter()
            .map(|r| r.attributes(&self.geometry))
            .collect();
        Srg::from_vertices(labels, vertices)
    }

    /// Joins regions sharing a prediction into an observation graph with one
    /// vertex per model vertex (labels taken from `model_labels`). Model
    /// vertices that receive no voxels are EMPTY.
    pub fn join(&self, assignment: &[usize], model_labels: &[u32]) -> Result<Srg> {
        if assignment.len() != self.regions.len() {
            return Err(SrgError::AssignmentLengthMismatch {
                got: assignment.len(),
                expected: self.regions.len(),
            });
        }
        let n = model_labels.len();
        let mut joined = vec![RegionStats::default(); n];
        for (position, (&s, region)) in assignment.iter().zip(&self.regions).enumerate() {
            if s >= n {
                return Err(SrgError::InvalidAssignment {
                    position: position + 1,
                    value: (s + 1).to_string(),
                });
            }
            joined[s].merge(region);
        }
        let vertices = joined
            .iter()
            .map(|r| r.attributes(&self.geometry))
            .collect();
        Ok(Srg::from_vertices(model_labels.to_vec(), vertices))
    }

    /// Label volume with each region replaced by its model label.
    pub fn paint(
        &self,
        super_labels: &LabelVolume,
        assignment: &[usize],
        model_labels: &[u32],
    ) -> Result<LabelVolume> {
        super_labels.geometry().ensure_same(&self.geometry)?;
        if assignment.len() != self.regions.len() {
            return Err(SrgError::AssignmentLengthMismatch {
                got: assignment.len(),
                expected: self.regions.len(),
            });
        }
        let lut: Vec<u32> = assignment.iter().map(|&s| model_labels[s]).collect();
        super_labels.map(|l| if l == 0 { 0 } else { lut[l as usize - 1] })
    }
}
