use std::path::Path;

use crate::error::{Result, SrgError};
use crate::volume::{Axis, LabelVolume, ScalarVolume};

/// Label colors. Label 0 is never drawn; label `l` takes entry
/// `(l - 1) % len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<[u8; 3]>,
}

const DEFAULT_COLORS: [[u8; 3]; 12] = [
    [230, 25, 75],
    [60, 180, 75],
    [0, 130, 200],
    [255, 225, 25],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [0, 128, 128],
    [170, 110, 40],
    [128, 0, 0],
];

impl Default for Palette {
    fn default() -> Self {
        Self {
            colors: DEFAULT_COLORS.to_vec(),
        }
    }
}

impl Palette {
    pub fn new(colors: Vec<[u8; 3]>) -> Result<Self> {
        if colors.is_empty() {
            return Err(SrgError::Config("palette needs at least one color".into()));
        }
        Ok(Self { colors })
    }

    pub fn color(&self, label: u32) -> Option<[u8; 3]> {
        (label != 0).then(|| self.colors[(label as usize - 1) % self.colors.len()])
    }
}

/// Row-major 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

/// Grayscale slice, intensities stretched over the slice's own range, with
/// each labeled voxel blended 50% toward its palette color.
pub fn render_overlay_rgb(
    scalar: &ScalarVolume,
    labels: &LabelVolume,
    axis: Axis,
    index: usize,
    palette: &Palette,
) -> Result<RgbImage> {
    scalar.geometry().ensure_same(labels.geometry())?;
    let s = scalar.extract_slice(axis, index)?;
    let l = labels.extract_slice(axis, index)?;
    let (lo, hi) = s
        .data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let mut data = Vec::with_capacity(s.data.len() * 3);
    for (&v, &label) in s.data.iter().zip(&l.data) {
        let g = if range > 0.0 {
            ((v - lo) / range * 255.0).round() as u8
        } else {
            0
        };
        match palette.color(label) {
            Some(c) => data.extend(c.map(|c| (g as u16 + c as u16).div_ceil(2) as u8)),
            None => data.extend([g, g, g]),
        }
    }
    Ok(RgbImage {
        width: s.width,
        height: s.height,
        data,
    })
}

pub fn encode_png(image: &RgbImage) -> Result<Vec<u8>> {
    let png_err = |e: png::EncodingError| SrgError::InvalidVolume(format!("png encoding: {e}"));
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width as u32, image.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(&image.data).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

/// Renders one slice and writes it as a PNG.
pub fn render_overlay(
    scalar: &ScalarVolume,
    labels: &LabelVolume,
    axis: Axis,
    index: usize,
    palette: &Palette,
    out_path: impl AsRef<Path>,
) -> Result<()> {
    let bytes = encode_png(&render_overlay_rgb(scalar, labels, axis, index, palette)?)?;
    let path = out_path.as_ref();
    std::fs::write(path, bytes).map_err(|e| SrgError::io(path, e))
}
