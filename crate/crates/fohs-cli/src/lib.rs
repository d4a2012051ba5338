//! Library backing the `fohs` command-line tool: strict JSON experiment
//! configs, runners over the core analysis/simulation operations, verdict
//! reports and CSV artifacts.

pub mod config;
pub mod csvio;
pub mod report;
pub mod run;

pub use config::{parse_config, ExperimentConfig, GridSpec};
pub use report::VerdictReport;
pub use run::{execute, resolve, RunOverrides};
