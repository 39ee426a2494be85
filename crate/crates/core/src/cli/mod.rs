//! Scenario files, commands and report formatting for the `condquant` binary.

pub mod commands;
pub mod report;
pub mod scenario;

pub use commands::{cmd_compute, cmd_oracle, cmd_verify, run, Cli, CliError};
pub use report::{format_number, parse_number};
pub use scenario::{parse_scenario, Scenario, ScenarioError, ScenarioFile};
