use std::path::PathBuf;

use qca_dsr::QcaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

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
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<QcaError> for CliError {
    fn from(e: QcaError) -> Self {
        use QcaError::*;
        match e {
            InvalidMass(_)
            | InvalidBoost(_)
            | OutsideBrillouinZone(_)
            | InvalidLatticeSize(_)
            | CellOutOfRange { .. }
            | NonUnitInternalState(_)
            | SizeMismatch { .. }
            | MassMismatch { .. }
            | SupportViolation { .. }
            | InvalidWidth(_)
            | TooFewSamples(_)
            | DegenerateCouple(_) => CliError::Validation(e.to_string()),
            SingularPoint(_)
            | OutOfRange(_)
            | DivergentMeasure { .. }
            | WrapAround { .. }
            | MultiPeak { .. }
            | ZeroWeight
            | ParallelTrajectories(_)
            | NearSingular(_) => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
