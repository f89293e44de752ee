//! Decision variables, boxes and device types.

use crate::error::{nonnegative, positive, Result, SolverError};

/// `(p, mu1, mu2)`: local-service probability, transmitter rate, local-processor rate.
///
/// Secondary devices own no transmitter and keep `mu1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevicePolicy {
    pub p: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl DevicePolicy {
    pub fn new(p: f64, mu1: f64, mu2: f64) -> Self {
        Self { p, mu1, mu2 }
    }

    pub fn secondary(p: f64, mu2: f64) -> Self {
        Self { p, mu1: 0.0, mu2 }
    }
}

/// Upper rate limits; the lower limits are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// Transmitter limit `P_max`.
    pub p_max: f64,
    /// Local-processor limit `f_max`.
    pub f_max: f64,
}

impl Bounds {
    pub fn new(p_max: f64, f_max: f64) -> Self {
        Self { p_max, f_max }
    }

    pub fn full_lo(&self) -> [f64; 3] {
        [0.0, 0.0, 0.0]
    }

    pub fn full_hi(&self) -> [f64; 3] {
        [1.0, self.p_max, self.f_max]
    }

    pub fn contains(&self, x: &DevicePolicy) -> bool {
        (0.0..=1.0).contains(&x.p)
            && (0.0..=self.p_max).contains(&x.mu1)
            && (0.0..=self.f_max).contains(&x.mu2)
    }
}

/// One device class and its population weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeProfile {
    pub id: String,
    pub weight: f64,
    pub lambda: f64,
    /// Weight on age in the cost.
    pub v: f64,
    /// Effective capacitance of the local processor.
    pub eta: f64,
    pub bounds: Bounds,
}

impl TypeProfile {
    pub fn new(id: impl Into<String>, lambda: f64, v: f64, eta: f64, bounds: Bounds) -> Self {
        Self {
            id: id.into(),
            weight: 1.0,
            lambda,
            v,
            eta,
            bounds,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn validate(&self) -> Result<()> {
        nonnegative("weight", self.weight)?;
        nonnegative("lambda", self.lambda)?;
        nonnegative("V", self.v)?;
        nonnegative("eta", self.eta)?;
        positive("P_max", self.bounds.p_max)?;
        positive("f_max", self.bounds.f_max)
    }

    /// Devices without traffic have nothing to optimize.
    pub fn is_silent(&self) -> bool {
        self.lambda == 0.0
    }
}

pub(crate) fn validate_population(profiles: &[TypeProfile]) -> Result<()> {
    if profiles.is_empty() {
        return Err(SolverError::InvalidParameter {
            field: "types",
            value: 0.0,
            reason: "at least one type is required",
        });
    }
    let mut total = 0.0;
    for t in profiles {
        t.validate()?;
        total += t.weight;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(SolverError::InvalidParameter {
            field: "weight",
            value: total,
            reason: "type weights must sum to 1",
        });
    }
    Ok(())
}

pub(crate) fn check_population_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(SolverError::InvalidParameter {
            field: "N",
            value: 0.0,
            reason: "population must be >= 1",
        });
    }
    Ok(())
}
