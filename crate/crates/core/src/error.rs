use thiserror::Error;

use crate::field::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("not an involution: {0}")]
    NotAnInvolution(String),
    #[error("not an isometry: {0}")]
    NotAnIsometry(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("element not in group table")]
    NotInTable,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub(crate) fn precondition(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}
