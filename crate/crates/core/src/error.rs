use thiserror::Error;

/// Errors raised by the solvers, map representations and file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input (wrong shapes, non-finite entries, bad flags).
    #[error("input error: {0}")]
    Input(String),

    /// Dimensions of two operands do not fit together.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operator is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("map is not completely positive (most negative Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    /// The requested problem is computationally hard; no certified solver runs for it.
    #[error("refused: {0}")]
    Hardness(String),

    /// The requested index region has no implemented algorithm.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The map annihilates the current iterate so the fixed-point step is undefined.
    #[error("degenerate map: {0}")]
    Degenerate(String),

    /// The current iterate is singular so the m/M bracket is undefined.
    #[error("bracket undefined: {0}")]
    Singular(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Process exit codes used by the command-line front end.
pub mod exit {
    pub const OK: i32 = 0;
    /// The problem was refused: NP-hard, or no algorithm is known for the region.
    pub const REFUSED: i32 = 2;
    /// A solver ran but did not reach the requested accuracy.
    pub const UNCONVERGED: i32 = 3;
    pub const INPUT: i32 = 4;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hardness(_) | Error::Unsupported(_) => exit::REFUSED,
            Error::Degenerate(_) | Error::Singular(_) => exit::UNCONVERGED,
            _ => exit::INPUT,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Dimension(_) => "dimension",
            Error::Domain(_) => "domain",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotPsd(_) => "not_psd",
            Error::NotCompletelyPositive(_) => "not_completely_positive",
            Error::Hardness(_) => "hardness",
            Error::Unsupported(_) => "unsupported",
            Error::Degenerate(_) => "degenerate",
            Error::Singular(_) => "singular",
            Error::Resource(_) => "resource",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
