//! Error taxonomy shared by the library and the CLI.
//!
//! Every failure maps to exactly one documented process exit status:
//!
//! | status | meaning                                             |
//! |--------|-----------------------------------------------------|
//! | 0      | run completed and every check passed                |
//! | 1      | run completed but a verification check failed       |
//! | 2      | input or configuration error                        |
//! | 3      | numerical error (quadrature, grid, resource budget) |
//! | 4      | I/O error                                           |

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad argument or violated precondition.
    #[error("input error: {0}")]
    Input(String),

    /// Malformed or semantically invalid run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Quadrature failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Inversion grid too small or mis-sized; the message says how to fix it.
    #[error("grid error: {0}")]
    Grid(String),

    /// Point outside the coverage of a sampled grid.
    #[error("range error: {0}")]
    Range(String),

    /// A declared compute budget was exceeded before the result converged.
    #[error("resource error: {0}")]
    Resource(String),

    /// A verification check ran to completion and failed.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for this error class.
    pub fn exit_status(&self) -> i32 {
        match self {
            Error::CheckFailed(_) => 1,
            Error::Input(_) | Error::Config(_) | Error::Range(_) => 2,
            Error::Numerical(_) | Error::Grid(_) | Error::Resource(_) => 3,
            Error::Io(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
