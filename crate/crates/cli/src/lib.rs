//! Configuration, orchestration and file output for the `zenoline` binary.

// `!(x > 0.0)` also rejects NaN, which is the point of writing it that way
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod output;
pub mod svg;

pub use config::{ChannelKind, ConfigDocument, Resolved, RunConfig};
pub use error::CliError;
pub use experiment::{run_experiment, RunOutcome};
pub use figures::FigureId;

/// Environment variable selecting the worker thread count.
pub const THREADS_ENV: &str = "ZENOLINE_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`], if set.
pub fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}
