use thiserror::Error;
use xva_core::PricingError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Engine(#[from] PricingError),
}

impl CliError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for bad input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => 1,
            CliError::Engine(e) => match e {
                PricingError::InvalidGrid(_)
                | PricingError::InvalidParameter { .. }
                | PricingError::NegativeState(_)
                | PricingError::FellerViolation { .. }
                | PricingError::SlopeMismatch { .. }
                | PricingError::NegativePayoff
                | PricingError::ProbeOutsideGrid { .. } => 1,
                PricingError::ZeroPivot { .. }
                | PricingError::DimensionMismatch(_)
                | PricingError::GridMismatch
                | PricingError::NoConvergence { .. }
                | PricingError::NoBracket { .. } => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
