//! Front end for `dirac-core`: scenario configuration files, expectation
//! traces as CSV, SPNF snapshots and the oracle self-test.

pub mod config;
pub mod error;
pub mod scenario;
pub mod selftest;

pub use config::{Quantity, ScenarioConfig};
pub use error::CliError;
pub use scenario::{run_scenario, write_csv, Mode, Snapshots, Trace, TraceRow};
