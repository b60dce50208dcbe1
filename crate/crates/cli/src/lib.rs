//! Library side of the batch CLI so integration tests can drive the
//! pipeline directly.

pub mod config;
pub mod pipeline;
pub mod plots;
pub mod report;
pub mod synth_cmd;

pub use config::PipelineConfig;
pub use pipeline::{run_pipeline, RunError, RunOutput};
