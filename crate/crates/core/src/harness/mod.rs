//! Seeded families, the experiment suites, configuration and the CLI.

pub mod cli;
pub mod config;
pub mod generate;
pub mod suites;

pub use config::{Decay, ExperimentConfig, Family, Tolerances};
pub use generate::{generate, generate_family, FamilySpec};
pub use suites::{
    run_factorization_suite, run_ladder_suite, run_trace_suite, CaseStatus, LadderReport, SuiteKind, SuiteReport,
};

use crate::error::{Error, Result};

/// Environment variable capping case-level parallelism.
pub const THREADS_ENV: &str = "GLT_THREADS";

/// Parses a `GLT_THREADS` value; it must be a positive integer.
pub fn parse_threads(value: &str) -> Result<usize> {
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{value}`"))),
    }
}

/// Runs `f` on a pool capped by `GLT_THREADS`, or on the global pool when unset.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n = parse_threads(&v)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        Err(std::env::VarError::NotPresent) => Ok(f()),
        Err(e) => Err(Error::Config(format!("{THREADS_ENV}: {e}"))),
    }
}
