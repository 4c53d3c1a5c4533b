use std::path::PathBuf;

use thiserror::Error;

/// Failures of the runner, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error at n = {n}, tau = {tau}: {source}\n--- configuration ---\n{echo}")]
    Solver {
        n: usize,
        tau: f64,
        echo: String,
        #[source]
        source: poroelastic_core::Error,
    },
    #[error("divergence at step {step} (n = {n}, tau = {tau})\n--- configuration ---\n{echo}")]
    Divergence { step: usize, n: usize, tau: f64, echo: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver { .. } => 3,
            CliError::Divergence { .. } => 4,
            CliError::Io { .. } => 5,
        }
    }

    /// Classifies a core error raised while running one refinement level.
    pub fn from_core(err: poroelastic_core::Error, n: usize, tau: f64, echo: &str) -> CliError {
        use poroelastic_core::Error as E;
        match err {
            E::Config(msg) => CliError::Config(msg),
            E::IncompressibleLimit { .. } => CliError::Config(err.to_string()),
            E::Divergence { step } => CliError::Divergence { step, n, tau, echo: echo.to_string() },
            source => CliError::Solver { n, tau, echo: echo.to_string(), source },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> CliError {
        let path = PathBuf::from("<csv>");
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { path, source },
            other => CliError::Io { path, source: std::io::Error::other(format!("{other:?}")) },
        }
    }
}

/// Core errors met while validating a configuration, before any solve.
pub fn config_error(err: poroelastic_core::Error) -> CliError {
    match err {
        poroelastic_core::Error::Config(msg) => CliError::Config(msg),
        other => CliError::Config(other.to_string()),
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
