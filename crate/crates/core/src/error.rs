use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the solver core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid or unsupported configuration value.
    Config(String),
    /// Poisson ratio at (or beyond) the incompressible limit, λ undefined.
    IncompressibleLimit { nu: f64 },
    /// A triangle with zero (or negative) signed area.
    DegenerateElement { triangle: usize },
    /// Zero pivot met while factorizing; `column` is the original column index.
    SingularMatrix { column: usize },
    DimensionMismatch { expected: usize, found: usize },
    /// The same dof constrained twice with different values.
    ConflictingConstraint { dof: usize, first: f64, second: f64 },
    /// Non-finite values appeared in the solution of a time step.
    Divergence { step: usize },
    /// Convergence order requested from a non-positive error.
    OrderUndefined,
    EmptyInput,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::IncompressibleLimit { nu } => {
                write!(f, "Poisson ratio {nu} is at the incompressible limit, lambda is undefined")
            }
            Error::DegenerateElement { triangle } => {
                write!(f, "triangle {triangle} has non-positive area")
            }
            Error::SingularMatrix { column } => {
                write!(f, "matrix is numerically singular (zero pivot in column {column})")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ConflictingConstraint { dof, first, second } => {
                write!(f, "dof {dof} constrained to both {first} and {second}")
            }
            Error::Divergence { step } => write!(f, "non-finite solution at step {step}"),
            Error::OrderUndefined => write!(f, "convergence order undefined for non-positive errors"),
            Error::EmptyInput => write!(f, "empty input"),
        }
    }
}

impl core::error::Error for Error {}
