use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShsError {
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("malformed model: {0}")]
    MalformedModel(String),

    #[error("{system} system is singular or ill-conditioned (condition estimate {condition:.3e}); the chain or its age process is not ergodic")]
    IllConditioned {
        system: &'static str,
        condition: f64,
    },

    #[error("{system} solution failed verification: {detail}")]
    Verification {
        system: &'static str,
        detail: String,
    },

    #[error("closed form is singular at mu1P = mu3 (|mu1P - mu3| = {gap:.3e}); evaluate the linear system instead")]
    ClosedFormSingular { gap: f64 },
}

pub type Result<T> = std::result::Result<T, ShsError>;

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ShsError::InvalidParameter {
            field,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn check_nonnegative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ShsError::InvalidParameter {
            field,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn check_probability(field: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ShsError::InvalidParameter {
            field,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
