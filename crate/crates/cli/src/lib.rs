//! Command-line driver: scenario files, sweeps and CSV/JSON output.

pub mod cli;
pub mod error;
pub mod jobs;
pub mod scenario;
pub mod table;

pub use cli::main_with_args;
pub use error::CliError;
pub use scenario::{load_scenario, Scenario};
