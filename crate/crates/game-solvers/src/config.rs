use crate::descent::DescentParams;
use crate::error::{positive, Result, SolverError};

/// Tolerances, step sizes and iteration limits.
///
/// `eps2`/`gamma2` drive the equitable devices and the primary device,
/// `eps3`/`gamma3` drive the secondary devices.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    /// Damping of the mean-field update, in (0, 1].
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub multi_start: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps1: 1e-5,
            eps2: 1e-6,
            eps3: 1e-6,
            gamma1: 0.5,
            gamma2: 1e-2,
            gamma3: 1e-2,
            fd_step: 1e-6,
            max_outer: 200,
            max_inner: 500,
            multi_start: 8,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        positive("eps1", self.eps1)?;
        positive("eps2", self.eps2)?;
        positive("eps3", self.eps3)?;
        positive("gamma1", self.gamma1)?;
        if self.gamma1 > 1.0 {
            return Err(SolverError::InvalidParameter {
                field: "gamma1",
                value: self.gamma1,
                reason: "damping must be <= 1",
            });
        }
        positive("gamma2", self.gamma2)?;
        positive("gamma3", self.gamma3)?;
        positive("fd_step", self.fd_step)?;
        for (field, n) in [
            ("max_outer", self.max_outer),
            ("max_inner", self.max_inner),
            ("multi_start", self.multi_start),
        ] {
            if n == 0 {
                return Err(SolverError::InvalidParameter {
                    field,
                    value: 0.0,
                    reason: "must be >= 1",
                });
            }
        }
        Ok(())
    }

    /// Descent parameters of equitable and primary devices.
    pub fn minor(&self) -> DescentParams {
        DescentParams {
            gamma: self.gamma2,
            tol: self.eps2,
            max_sweeps: self.max_outer,
            max_inner: self.max_inner,
            fd_step: self.fd_step,
        }
    }

    /// Descent parameters of secondary devices.
    pub fn secondary(&self) -> DescentParams {
        DescentParams {
            gamma: self.gamma3,
            tol: self.eps3,
            ..self.minor()
        }
    }
}
