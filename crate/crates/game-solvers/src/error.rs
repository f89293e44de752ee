use shs_core::ShsError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid {field} = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("age evaluation failed: {0}")]
    Aoi(#[from] ShsError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

pub(crate) fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SolverError::InvalidParameter {
            field,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn nonnegative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(SolverError::InvalidParameter {
            field,
            value,
            reason: "must be finite and >= 0",
        })
    }
}
