use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: String,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "degenerate estimate: monitor `{monitor}` received {deliveries} deliveries after warm-up"
    )]
    Degenerate { monitor: String, deliveries: u64 },
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn positive(field: impl Into<String>, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SimError::InvalidParameter {
            field: field.into(),
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn nonnegative(field: impl Into<String>, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(SimError::InvalidParameter {
            field: field.into(),
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn probability(field: impl Into<String>, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SimError::InvalidParameter {
            field: field.into(),
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
