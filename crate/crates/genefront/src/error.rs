//! Crate-wide error type, grouped by the process exit class each failure
//! maps to when surfaced through the command line.

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    /// Bad configuration: malformed file, unknown key, or a value outside
    /// its documented range.
    #[error("config: {0}")]
    Config(String),

    /// Input data could not be read, parsed, or mapped to labels.
    #[error("data: {0}")]
    Data(String),

    /// A routine was handed values outside its contract (non-finite
    /// objectives, unranked individuals, mismatched lengths).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Training or evaluation could not proceed on the given rows.
    #[error("evaluation: {0}")]
    Evaluation(String),

    /// Failure while writing run artifacts.
    #[error("output: {0}")]
    Output(String),
}

impl Error {
    /// Exit code class used by the command line: 2 for configuration
    /// problems, 3 for data problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
