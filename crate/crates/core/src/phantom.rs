//! Seeded synthetic annotated volumes.
//!
//! A [`PhantomSpec`] places balls and boxes in a grid; [`generate_phantom`]
//! rasterizes them by voxel-center membership (later structures overwrite
//! earlier ones) and draws each voxel's intensity from a normal distribution
//! around its structure's mean.
//!
//! Randomness comes from ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! with one standard-normal draw (ziggurat, `rand_distr::StandardNormal`) per
//! voxel in linear order. The stream is platform independent.
//!
//! Specs are stored as TOML, one `[[structure]]` block per structure:
//!
//! ```toml
//! dims = [32, 32, 32]
//! spacing = [1.0, 1.0, 1.0]
//! background = 10.0
//! seed = 7
//!
//! [[structure]]
//! label = 1
//! shape = "ball"
//! radius = 5.0
//! center = [10.0, 10.0, 10.0]
//! mean = 100.0
//! stddev = 2.0
//! ```

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};
use crate::volume::{Geometry, LabelVolume, ScalarVolume, Volume};

/// Structure shape, sized in millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Ball {
        radius: f64,
    },
    /// Axis-aligned box with full edge lengths `size`.
    Box {
        size: [f64; 3],
    },
}

impl Shape {
    fn half_extent(&self) -> [f64; 3] {
        match *self {
            Shape::Ball { radius } => [radius; 3],
            Shape::Box { size } => size.map(|s| s / 2.0),
        }
    }

    fn contains(&self, center: [f64; 3], p: [f64; 3]) -> bool {
        match *self {
            Shape::Ball { radius } => {
                let d2: f64 = (0..3).map(|i| (p[i] - center[i]).powi(2)).sum();
                d2 <= radius * radius
            }
            Shape::Box { size } => (0..3).all(|i| (p[i] - center[i]).abs() <= size[i] / 2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub label: u32,
    #[serde(flatten)]
    pub shape: Shape,
    pub center: [f64; 3],
    pub mean: f64,
    #[serde(default)]
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub background: f64,
    /// Noise on background voxels; 0 unless set.
    #[serde(default)]
    pub background_stddev: f64,
    pub seed: u64,
    #[serde(rename = "structure", default)]
    pub structures: Vec<Structure>,
}

impl PhantomSpec {
    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.dims, self.spacing).map_err(|e| SrgError::InvalidSpec(e.to_string()))
    }

    pub fn validate(&self) -> Result<Geometry> {
        let geometry = self.geometry()?;
        let extent = geometry.extent();
        if !(self.background.is_finite() && self.background_stddev.is_finite())
            || self.background_stddev < 0.0
        {
            return Err(SrgError::InvalidSpec(
                "background intensity and stddev must be finite, stddev ≥ 0".into(),
            ));
        }
        let mut labels: Vec<u32> = self.structures.iter().map(|s| s.label).collect();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(SrgError::InvalidSpec(format!(
                "structure labels must be unique and contiguous from 1, got {labels:?}"
            )));
        }
        for s in &self.structures {
            let size_ok = match s.shape {
                Shape::Ball { radius } => radius.is_finite() && radius > 0.0,
                Shape::Box { size } => size.iter().all(|v| v.is_finite() && *v > 0.0),
            };
            if !size_ok {
                return Err(SrgError::InvalidSpec(format!(
                    "structure {} has a non-positive size",
                    s.label
                )));
            }
            if !(s.mean.is_finite() && s.stddev.is_finite() && s.stddev >= 0.0) {
                return Err(SrgError::InvalidSpec(format!(
                    "structure {} needs a finite mean and stddev ≥ 0",
                    s.label
                )));
            }
            let half = s.shape.half_extent();
            for i in 0..3 {
                let lo = s.center[i] - half[i];
                let hi = s.center[i] + half[i];
                if !(lo >= 0.0 && hi <= extent[i]) {
                    return Err(SrgError::InvalidSpec(format!(
                        "structure {} spans [{lo}, {hi}] mm on axis {i}, outside [0, {}]",
                        s.label, extent[i]
                    )));
                }
            }
        }
        Ok(geometry)
    }

    /// Copy with every structure translated by its entry in `shifts` (mm).
    pub fn shifted(&self, shifts: &[[f64; 3]]) -> Result<PhantomSpec> {
        if shifts.len() != self.structures.len() {
            return Err(SrgError::InvalidSpec(format!(
                "{} shifts for {} structures",
                shifts.len(),
                self.structures.len()
            )));
        }
        let mut out = self.clone();
        for (s, d) in out.structures.iter_mut().zip(shifts) {
            for (c, d) in s.center.iter_mut().zip(d) {
                *c += d;
            }
        }
        out.validate()?;
        Ok(out)
    }

    /// Per-structure shifts drawn uniformly from `[-max_mm, max_mm]³`.
    pub fn random_shifts(&self, max_mm: f64, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.structures
            .iter()
            .map(|_| std::array::from_fn(|_| rng.random_range(-max_mm..=max_mm)))
            .collect()
    }

    /// Copy with random per-structure shifts of at most `max_mm` per axis
    /// and noise reseeded, both drawn from `seed`.
    pub fn perturbed(&self, max_mm: f64, seed: u64) -> Result<PhantomSpec> {
        if !(max_mm.is_finite() && max_mm >= 0.0) {
            return Err(SrgError::InvalidSpec(format!("shift bound {max_mm}")));
        }
        let mut out = self.shifted(&self.random_shifts(max_mm, seed))?;
        out.seed = seed;
        Ok(out)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: PhantomSpec =
            toml::from_str(text).map_err(|e| SrgError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| SrgError::InvalidSpec(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| SrgError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_toml_string()?).map_err(|e| SrgError::io(path, e))
    }
}

fn rasterize(spec: &PhantomSpec, geometry: &Geometry) -> Vec<u32> {
    let mut labels = vec![0u32; geometry.len()];
    for s in &spec.structures {
        let half = s.shape.half_extent();
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for i in 0..3 {
            // voxel k has center (k + 0.5) * spacing
            let a = ((s.center[i] - half[i]) / geometry.spacing[i] - 0.5).floor();
            let b = ((s.center[i] + half[i]) / geometry.spacing[i] - 0.5).ceil();
            lo[i] = a.max(0.0) as usize;
            hi[i] = (b.max(0.0) as usize).min(geometry.dims[i] - 1);
        }
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    if s.shape.contains(s.center, geometry.voxel_center(x, y, z)) {
                        labels[geometry.index(x, y, z)] = s.label;
                    }
                }
            }
        }
    }
    labels
}

/// Rasterizes `spec` into a (scalar, label) pair. Deterministic in `spec.seed`.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<(ScalarVolume, LabelVolume)> {
    let geometry = spec.validate()?;
    let labels = rasterize(spec, &geometry);

    let mut params = vec![(spec.background, spec.background_stddev)];
    let mut by_label: Vec<&Structure> = spec.structures.iter().collect();
    by_label.sort_by_key(|s| s.label);
    params.extend(by_label.iter().map(|s| (s.mean, s.stddev)));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data = labels
        .iter()
        .map(|&l| {
            let (mean, stddev) = params[l as usize];
            let z: f64 = rng.sample(StandardNormal);
            mean + stddev * z
        })
        .collect();

    Ok((Volume::new(geometry, data)?, Volume::new(geometry, labels)?))
}

/// Regenerates `spec` with each structure rigidly translated by its entry in
/// `shifts` (mm) and intensities redrawn from `seed`.
pub fn perturb_phantom(
    spec: &PhantomSpec,
    shifts: &[[f64; 3]],
    seed: u64,
) -> Result<(ScalarVolume, LabelVolume)> {
    let mut moved = spec.shifted(shifts)?;
    moved.seed = seed;
    generate_phantom(&moved)
}
