use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};
use crate::volume::{Geometry, ScalarVolume, Volume};

/// Structuring element for dilation and erosion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    /// The voxel and its six face neighbors.
    #[default]
    Cross6,
    /// The full 3×3×3 block.
    Cube26,
}

impl FromStr for Element {
    type Err = SrgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cross6" => Ok(Element::Cross6),
            "cube26" => Ok(Element::Cube26),
            other => Err(SrgError::Config(format!(
                "unknown structuring element `{other}` (expected cross6 or cube26)"
            ))),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Element::Cross6 => "cross6",
            Element::Cube26 => "cube26",
        })
    }
}

/// Non-negative per-voxel edge strength, same geometry as its source.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVolume(ScalarVolume);

impl GradientVolume {
    /// Wraps an existing volume; every value must be ≥ 0.
    pub fn new(vol: ScalarVolume) -> Result<Self> {
        if let Some(index) = vol.data().iter().position(|&v| v < 0.0) {
            return Err(SrgError::InvalidVolume(format!(
                "gradient value at voxel {index} is negative"
            )));
        }
        Ok(Self(vol))
    }

    pub fn volume(&self) -> &ScalarVolume {
        &self.0
    }

    pub fn geometry(&self) -> &Geometry {
        self.0.geometry()
    }

    pub fn data(&self) -> &[f64] {
        self.0.data()
    }

    pub fn into_inner(self) -> ScalarVolume {
        self.0
    }
}

fn range(c: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    c.saturating_sub(1)..=(c + 1).min(n - 1)
}

/// Dilation minus erosion, with the neighborhood clamped at the borders.
pub fn morphological_gradient(vol: &ScalarVolume, element: Element) -> GradientVolume {
    let g = *vol.geometry();
    let [nx, ny, nz] = g.dims;
    let src = vol.data();
    let mut out = vec![0.0; g.len()];
    out.par_chunks_mut(nx * ny)
        .enumerate()
        .for_each(|(z, plane)| {
            for y in 0..ny {
                for x in 0..nx {
                    let i = g.index(x, y, z);
                    let mut lo = src[i];
                    let mut hi = src[i];
                    match element {
                        Element::Cross6 => {
                            for n in g.neighbors6(i) {
                                lo = lo.min(src[n]);
                                hi = hi.max(src[n]);
                            }
                        }
                        Element::Cube26 => {
                            for zz in range(z, nz) {
                                for yy in range(y, ny) {
                                    for xx in range(x, nx) {
                                        let v = src[g.index(xx, yy, zz)];
                                        lo = lo.min(v);
                                        hi = hi.max(v);
                                    }
                                }
                            }
                        }
                    }
                    plane[x + nx * y] = hi - lo;
                }
            }
        });
    GradientVolume(Volume::new(g, out).expect("gradient of a finite volume is finite"))
}
