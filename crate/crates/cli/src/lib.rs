//! Library surface of the `clustex` command-line tool: the pipeline
//! configuration, the end-to-end run and the plain-text report renderer.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::PipelineConfig;
pub use pipeline::{run_pipeline, PipelineError, PipelineOutcome};
pub use report::render_report;
