//! Benchmark harness for the `pdmmis` estimator library.
//!
//! Reproduces the Gaussian-mixture benchmark: a fixed five-component
//! bivariate target, `N` randomly placed Gaussian proposals, and a sweep of
//! the number of weight-denominator groups `P` over powers of two. Each
//! sweep aggregates the mean-squared error of the self-normalized mean
//! estimate and of the normalizing-constant estimate across seeded
//! replications, then writes CSV and plot data.
//!
//! The library surface mirrors the `pdmmis` CLI: [`config`] holds the
//! experiment configuration and its file/flag merging, [`experiment`] runs
//! replications and sweeps, [`output`] writes the result files, and
//! [`variance`] hosts the small paired variance-ordering check.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod output;
pub mod variance;

use thiserror::Error;

pub use cli::cli_main;
pub use config::{load_config, ConfigOverrides, ExperimentConfig};
pub use experiment::{run_experiment, run_replication, ResultRow};
pub use output::{parse_csv, write_csv, write_plot_data};
pub use variance::{variance_ordering, VarianceCheck};

/// Errors produced by the harness.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// A config file line could not be parsed.
    #[error("config line {line}: {message}")]
    Parse {
        /// 1-based line number in the config file.
        line: usize,
        /// What went wrong on that line.
        message: String,
    },
    /// The merged configuration violates an invariant.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    /// An estimator or density operation failed.
    #[error(transparent)]
    Core(#[from] pdmmis::Error),
    /// A file could not be read or written.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A CSV file did not match the expected schema.
    #[error("csv line {line}: {message}")]
    CsvParse {
        /// 1-based line number in the CSV file.
        line: usize,
        /// What went wrong on that line.
        message: String,
    },
    /// Plot output was requested for an empty row set.
    #[error("no rows to plot")]
    NoRows,
    /// The hard-coded reference values disagreed with a recomputation.
    #[error("reference cross-check failed: {0}")]
    CrossCheck(String),
}

/// Convenience alias for harness results.
pub type Result<T> = std::result::Result<T, HarnessError>;
