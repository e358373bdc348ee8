//! Command-line front end for `multinorm-core`.

pub mod commands;
pub mod config;
pub mod report;

use multinorm_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const DISAGREEMENT: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: unreadable file, schema error, or a configuration the
    /// core rejects.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Disagreement(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::INVALID,
            CliError::Budget(_) => exit::BUDGET,
            CliError::Disagreement(_) => exit::DISAGREEMENT,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            Error::Internal(_) | Error::NonMonotone(_) | Error::LocalFactMismatch(_) | Error::HypothesisViolated(_) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_mapping() {
        assert_eq!(
            CliError::from(Error::BudgetExceeded { needed: 2, budget: 1 }).exit_code(),
            3
        );
        assert_eq!(CliError::from(Error::NotPrime(4)).exit_code(), 2);
        assert_eq!(CliError::from(Error::TooFewFields { remaining: 2 }).exit_code(), 2);
        assert_eq!(CliError::from(Error::NonMonotone("x".into())).exit_code(), 1);
        assert_eq!(CliError::Disagreement(String::new()).exit_code(), 4);
    }
}
