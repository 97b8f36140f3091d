//! Statistical-relational graphs: attribute extraction, the graph type,
//! learned model statistics and the `.srg` text format.

mod attributes;
mod format;
mod model;
mod regions;
mod srg;

pub use attributes::{EdgeAttributes, ExactSum, VertexAttributes};
pub use format::{
    format_graph, format_model, parse_graph, parse_model, read_graph, read_model, write_graph,
    write_model,
};
pub use model::{
    fit_model, model_graph, EdgeStats, Gaussian, Model, ModelStatistics, RatioStats, VertexStats,
    STDDEV_FLOOR,
};
pub use regions::{RegionStats, RegionTable};
pub use srg::{build_srg, Srg};
