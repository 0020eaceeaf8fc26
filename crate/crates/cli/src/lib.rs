//! Scenario runner and verifier for the `gamcal` library.
//!
//! `gamcal <scenario>` solves a configured problem and writes CSV data,
//! the effective `config.json` and a `summary.json`; `gamcal verify`
//! re-evaluates the residuals of a data file against a configuration.
//!
//! Exit codes: 0 success, 1 verification failed, 2 invalid input,
//! 3 solver did not converge, 4 numeric failure.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;
pub mod selftest;
pub mod verify;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use scenarios::run;
pub use verify::{verify, VerifyReport};
