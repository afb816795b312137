//! Input language, analysis pipeline and reports for Lie symmetry analysis
//! of time-fractional PDE systems. The algebra lives in `fraclie-core`.

pub mod dsl;
pub mod pipeline;
pub mod report;

pub use pipeline::{analyze, run, BranchSel, Config, PipelineError};
pub use report::{emit, Format, Report};
