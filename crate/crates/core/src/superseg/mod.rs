//! Super-segmentation: morphological gradient followed by a seeded
//! priority-flood watershed, plus connected-component relabeling.

mod gradient;
mod relabel;
mod watershed;

pub use gradient::{morphological_gradient, Element, GradientVolume};
pub use relabel::{intersect_labelings, relabel_connected};
pub use watershed::{watershed, SeedPolicy, SupersegResult};

use crate::error::Result;
use crate::volume::ScalarVolume;

/// Gradient then watershed in one call.
pub fn supersegment(
    vol: &ScalarVolume,
    element: Element,
    min_depth: f64,
) -> Result<SupersegResult> {
    let grad = morphological_gradient(vol, element);
    let mut result = watershed(&grad, min_depth)?;
    result.policy.element = Some(element);
    Ok(result)
}
