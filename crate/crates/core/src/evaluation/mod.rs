//! Segmentation quality against ground truth, and slice overlays.

mod dice;
mod overlay;

pub use dice::{dice, dice_report, ConfusionCell, SegmentationReport, StructureScore};
pub use overlay::{encode_png, render_overlay, render_overlay_rgb, Palette, RgbImage};
