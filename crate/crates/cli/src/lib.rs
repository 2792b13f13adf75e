//! Configuration, scenario construction and the `bqp` subcommands.

pub mod config;
pub mod error;
pub mod probe;
pub mod render;
pub mod run;
pub mod scenario;

pub use config::Config;
pub use error::CliError;
pub use probe::{cmd_probe, ProbeOutcome};
pub use render::cmd_render;
pub use run::{cmd_analyze, cmd_run, RunSummary};
pub use scenario::{build_scenario, Scenario};

/// Caps the worker pool at `BQP_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BQP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("BQP_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(CliError::runtime)
}
