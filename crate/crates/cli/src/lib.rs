//! Batch runner: reads a JSON scenario, runs it against `dqlab-core` and
//! writes CSV or JSON tables.

pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;

pub use config::{Command, Format, Overrides, Params, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use report::{emit_report, Report, Table, Value};
pub use scenarios::{build_report, run_scenario};
