//! Statistical-relational graph (SRG) segmentation of labeled 3D volumes.
//!
//! The pipeline learns a model graph from annotated volumes, over-segments an
//! unseen volume with a watershed of its morphological gradient, and assigns
//! every resulting region to a model structure by minimizing a weighted
//! vertex/edge attribute cost.
//!
//! Modules, in pipeline order:
//!
//! * [`volume`] and [`io`]: voxel grids and the raw / NIfTI-1 file formats.
//! * [`phantom`]: seeded synthetic annotated volumes.
//! * [`superseg`]: morphological gradient, h-minima watershed, connected relabeling.
//! * [`graph`]: attribute extraction, the SRG type, model statistics, `.srg` files.
//! * [`matching`]: solution cost, greedy and exhaustive assignment, weight sweeps.
//! * [`evaluation`]: Dice reports and PNG overlays.
//! * [`pipeline`]: the end-to-end run driven by a text configuration.

pub mod error;
pub mod evaluation;
pub mod graph;
pub mod io;
pub mod matching;
pub mod phantom;
pub mod pipeline;
pub mod superseg;
pub mod volume;

pub use error::{Result, SrgError};
pub use evaluation::{dice_report, render_overlay, SegmentationReport};
pub use graph::{
    build_srg, fit_model, model_graph, EdgeAttributes, Model, ModelStatistics, Srg,
    VertexAttributes,
};
pub use matching::{
    evaluate, exhaustive_best, greedy_initial, join_regions, sweep_weights, CostWeights,
    DistanceSpec, Solution,
};
pub use phantom::{generate_phantom, perturb_phantom, PhantomSpec};
pub use pipeline::{run_pipeline, PipelineConfig};
pub use superseg::{morphological_gradient, relabel_connected, watershed, Element, SupersegResult};
pub use volume::{Axis, Geometry, LabelVolume, ScalarVolume, Volume};
