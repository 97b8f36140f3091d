//! Dense 3D voxel grids.
//!
//! Voxel `(x, y, z)` lives at linear index `x + nx * (y + ny * z)`; x varies
//! fastest. Spacing is in millimeters and every physical quantity derived from
//! a volume (centroids, volumes) is expressed in mm / mm³.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};

/// Grid shape and voxel size shared by scalar and label volumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
}

impl Geometry {
    pub fn new(dims: [usize; 3], spacing: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(SrgError::InvalidVolume(format!(
                "dims must be positive, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(SrgError::InvalidVolume(format!(
                "spacing must be finite and positive, got {spacing:?}"
            )));
        }
        if dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .is_none()
        {
            return Err(SrgError::InvalidVolume("voxel count overflows".into()));
        }
        Ok(Self { dims, spacing })
    }

    /// Unit-spaced geometry.
    pub fn isotropic(dims: [usize; 3]) -> Result<Self> {
        Self::new(dims, [1.0; 3])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    /// Volume of one voxel in mm³.
    pub fn voxel_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// Physical extent of the grid in mm.
    pub fn extent(&self) -> [f64; 3] {
        [
            self.dims[0] as f64 * self.spacing[0],
            self.dims[1] as f64 * self.spacing[1],
            self.dims[2] as f64 * self.spacing[2],
        ]
    }

    /// Physical position of a voxel center.
    pub fn voxel_center(&self, x: usize, y: usize, z: usize) -> [f64; 3] {
        [
            (x as f64 + 0.5) * self.spacing[0],
            (y as f64 + 0.5) * self.spacing[1],
            (z as f64 + 0.5) * self.spacing[2],
        ]
    }

    /// Indices of the 6-connected neighbors of `index`, in the fixed order
    /// -x, +x, -y, +y, -z, +z.
    pub fn neighbors6(&self, index: usize) -> Neighbors6 {
        let [x, y, z] = self.coords(index);
        let [nx, ny, nz] = self.dims;
        let sy = nx;
        let sz = nx * ny;
        let mut out = Neighbors6::default();
        if x > 0 {
            out.push(index - 1);
        }
        if x + 1 < nx {
            out.push(index + 1);
        }
        if y > 0 {
            out.push(index - sy);
        }
        if y + 1 < ny {
            out.push(index + sy);
        }
        if z > 0 {
            out.push(index - sz);
        }
        if z + 1 < nz {
            out.push(index + sz);
        }
        out
    }

    /// Fails unless `other` has identical dims and spacing.
    pub fn ensure_same(&self, other: &Geometry) -> Result<()> {
        if self != other {
            return Err(SrgError::GeometryMismatch(format!(
                "dims {:?} spacing {:?} vs dims {:?} spacing {:?}",
                self.dims, self.spacing, other.dims, other.spacing
            )));
        }
        Ok(())
    }
}

/// Up to six neighbor indices without allocating.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neighbors6 {
    buf: [usize; 6],
    len: usize,
}

impl Neighbors6 {
    fn push(&mut self, i: usize) {
        self.buf[self.len] = i;
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.buf[..self.len]
    }
}

impl IntoIterator for Neighbors6 {
    type Item = usize;
    type IntoIter = std::iter::Take<std::array::IntoIter<usize, 6>>;

    fn into_iter(self) -> Self::IntoIter {
        self.buf.into_iter().take(self.len)
    }
}

/// Voxel element types admitted into a [`Volume`].
pub trait Voxel: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn is_admissible(self) -> bool;
}

impl Voxel for f64 {
    fn is_admissible(self) -> bool {
        self.is_finite()
    }
}

impl Voxel for u32 {
    fn is_admissible(self) -> bool {
        true
    }
}

/// A 3D grid of voxels in x-fastest order.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume<T> {
    geometry: Geometry,
    data: Vec<T>,
}

/// Intensities, widened to `f64` regardless of the on-disk type.
pub type ScalarVolume = Volume<f64>;
/// Integer labels; 0 is background.
pub type LabelVolume = Volume<u32>;

impl<T: Voxel> Volume<T> {
    pub fn new(geometry: Geometry, data: Vec<T>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(SrgError::InvalidVolume(format!(
                "data length {} does not match {} voxels",
                data.len(),
                geometry.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_admissible()) {
            return Err(SrgError::NonFiniteData { index });
        }
        Ok(Self { geometry, data })
    }

    pub fn filled(geometry: Geometry, value: T) -> Result<Self> {
        Self::new(geometry, vec![value; geometry.len()])
    }

    pub fn from_fn(
        geometry: Geometry,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(geometry.len());
        let [nx, ny, nz] = geometry.dims;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    data.push(f(x, y, z));
                }
            }
        }
        Self::new(geometry, data)
    }

    #[inline]
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    #[inline]
    pub fn spacing(&self) -> [f64; 3] {
        self.geometry.spacing
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        self.data[self.geometry.index(x, y, z)]
    }

    /// Applies `f` to every voxel, keeping geometry.
    pub fn map<U: Voxel>(&self, f: impl Fn(T) -> U) -> Result<Volume<U>> {
        Volume::new(self.geometry, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Extracts the plane perpendicular to `axis` at `index`.
    ///
    /// The plane is row-major: for a z-slice rows run along y and columns
    /// along x; for a y-slice rows run along z and columns along x; for an
    /// x-slice rows run along z and columns along y.
    pub fn extract_slice(&self, axis: Axis, index: usize) -> Result<Slice<T>> {
        let [nx, ny, nz] = self.geometry.dims;
        let len = self.geometry.dims[axis.dim()];
        if index >= len {
            return Err(SrgError::IndexOutOfRange { index, len });
        }
        let (width, height) = match axis {
            Axis::X => (ny, nz),
            Axis::Y => (nx, nz),
            Axis::Z => (nx, ny),
        };
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                let (x, y, z) = match axis {
                    Axis::X => (index, col, row),
                    Axis::Y => (col, index, row),
                    Axis::Z => (col, row, index),
                };
                data.push(self.data[self.geometry.index(x, y, z)]);
            }
        }
        Ok(Slice {
            width,
            height,
            data,
        })
    }
}

impl LabelVolume {
    /// Distinct nonzero labels in ascending order.
    pub fn distinct_labels(&self) -> Vec<u32> {
        self.data
            .iter()
            .copied()
            .filter(|&l| l != 0)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Distinct labels including background, ascending.
    pub fn distinct_labels_with_background(&self) -> Vec<u32> {
        self.data
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn max_label(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// Slicing axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn dim(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl FromStr for Axis {
    type Err = SrgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(SrgError::Config(format!("unknown axis `{other}`"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// A row-major 2D plane cut from a volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

impl<T: Copy> Slice<T> {
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(dims: [usize; 3]) -> ScalarVolume {
        let g = Geometry::isotropic(dims).unwrap();
        Volume::new(g, (0..g.len()).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn z_slice_follows_linear_order() {
        let v = ramp([2, 2, 2]);
        let s = v.extract_slice(Axis::Z, 0).unwrap();
        let rows: Vec<Vec<f64>> = s.rows().map(|r| r.to_vec()).collect();
        assert_eq!(rows, vec![vec![0.0, 1.0], vec![2.0, 3.0]]);
    }

    #[test]
    fn x_slice_of_uniform_is_uniform() {
        let g = Geometry::isotropic([3, 4, 5]).unwrap();
        let v = ScalarVolume::filled(g, 7.0).unwrap();
        let s = v.extract_slice(Axis::X, 2).unwrap();
        assert_eq!((s.width, s.height), (4, 5));
        assert!(s.data.iter().all(|&x| x == 7.0));
    }

    #[test]
    fn y_slice_matches_triple_loop() {
        let v = ramp([3, 4, 5]);
        let s = v.extract_slice(Axis::Y, 1).unwrap();
        for z in 0..5 {
            for x in 0..3 {
                assert_eq!(s.get(z, x), (x + 3 * (1 + 4 * z)) as f64);
            }
        }
    }

    #[test]
    fn slice_index_out_of_range() {
        let v = ramp([2, 3, 4]);
        assert!(matches!(
            v.extract_slice(Axis::Y, 3),
            Err(SrgError::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn rejects_non_finite_and_bad_length() {
        let g = Geometry::isotropic([2, 1, 1]).unwrap();
        assert!(matches!(
            ScalarVolume::new(g, vec![1.0, f64::NAN]),
            Err(SrgError::NonFiniteData { index: 1 })
        ));
        assert!(ScalarVolume::new(g, vec![1.0]).is_err());
    }

    #[test]
    fn rejects_degenerate_geometry() {
        assert!(Geometry::new([0, 1, 1], [1.0; 3]).is_err());
        assert!(Geometry::new([1, 1, 1], [1.0, 0.0, 1.0]).is_err());
        assert!(Geometry::new([1, 1, 1], [1.0, f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn distinct_labels_ascending() {
        let g = Geometry::isotropic([4, 1, 1]).unwrap();
        let l = LabelVolume::new(g, vec![0, 2, 1, 1]).unwrap();
        assert_eq!(l.distinct_labels(), vec![1, 2]);
        assert_eq!(l.distinct_labels_with_background(), vec![0, 1, 2]);
    }

    #[test]
    fn neighbors_clamped_at_borders() {
        let g = Geometry::isotropic([3, 3, 3]).unwrap();
        assert_eq!(g.neighbors6(0).as_slice(), &[1, 3, 9]);
        assert_eq!(g.neighbors6(13).as_slice().len(), 6);
    }

    #[test]
    fn geometry_mismatch_detected() {
        let a = Geometry::new([2, 2, 2], [1.0, 1.0, 1.0]).unwrap();
        let b = Geometry::new([2, 2, 2], [1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            a.ensure_same(&b),
            Err(SrgError::GeometryMismatch(_))
        ));
    }
}
