//! Problem files, run orchestration, JSON reports and CSV export on top of
//! `heatcert-core`.

pub mod config;
pub mod export;
pub mod report;
pub mod run;

pub use config::{ConfigError, Loaded, Problem};
pub use report::RunReport;
pub use run::{run, Command, Overrides, RunOptions};

/// Bundled problem files, relative to this crate's manifest.
pub const PROBLEMS_DIR: &str = "problems";
