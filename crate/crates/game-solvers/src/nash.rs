//! Cyclic best-response dynamics for the finite equitable-access game.

use shs_core::{exogenous_rate, OtherDevice};

use crate::config::SolverConfig;
use crate::cost::{cost_equitable, CostBreakdown};
use crate::descent::block_descent;
use crate::error::{positive, Result, SolverError};
use crate::mfe::{as_policy, as_vec, finite_or_inf};
use crate::policy::{DevicePolicy, TypeProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct NashResult {
    pub policies: Vec<DevicePolicy>,
    pub costs: Vec<CostBreakdown>,
    pub converged: bool,
    pub rounds: usize,
    /// Largest coordinate change in the last round.
    pub last_move: f64,
}

impl NashResult {
    pub fn mean_cost(&self) -> f64 {
        self.costs.iter().map(CostBreakdown::total).sum::<f64>() / self.costs.len() as f64
    }
}

/// Exogenous ES rate seen by device `j`.
pub fn exogenous_for(devices: &[TypeProfile], policies: &[DevicePolicy], j: usize) -> Result<f64> {
    let others: Vec<OtherDevice> = devices
        .iter()
        .zip(policies)
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, (d, x))| OtherDevice {
            lambda: d.lambda,
            p: x.p,
            mu1: x.mu1,
        })
        .collect();
    Ok(exogenous_rate(&others)?)
}

/// Cost of every device when all of them play `policies` in the finite game.
pub fn finite_game_costs(
    devices: &[TypeProfile],
    policies: &[DevicePolicy],
    mu3: f64,
) -> Result<Vec<CostBreakdown>> {
    (0..devices.len())
        .map(|j| {
            cost_equitable(
                &policies[j],
                &devices[j],
                exogenous_for(devices, policies, j)?,
                mu3,
            )
        })
        .collect()
}

/// Best-response dynamics from a common starting policy.
pub fn nash_solve(
    devices: &[TypeProfile],
    mu3: f64,
    init: &DevicePolicy,
    cfg: &SolverConfig,
) -> Result<NashResult> {
    if devices.is_empty() {
        return Err(SolverError::InvalidParameter {
            field: "N",
            value: 0.0,
            reason: "population must be >= 1",
        });
    }
    for d in devices {
        d.validate()?;
    }
    positive("mu3", mu3)?;
    cfg.validate()?;
    let mut policies: Vec<DevicePolicy> = devices
        .iter()
        .map(|d| {
            let (lo, hi) = (d.bounds.full_lo(), d.bounds.full_hi());
            let x = as_vec(init);
            as_policy(&[0, 1, 2].map(|i| x[i].clamp(lo[i], hi[i])))
        })
        .collect();
    let mut converged = false;
    let mut rounds = 0;
    let mut last_move = f64::INFINITY;
    while rounds < cfg.max_outer {
        rounds += 1;
        last_move = 0.0;
        for j in 0..devices.len() {
            let d = &devices[j];
            if d.is_silent() {
                continue;
            }
            let lambda_e = exogenous_for(devices, &policies, j)?;
            let f = |x: &[f64]| {
                finite_or_inf(
                    cost_equitable(&as_policy(x), d, lambda_e, mu3),
                    CostBreakdown::total,
                )
            };
            let r = block_descent(
                &f,
                &as_vec(&policies[j]),
                &d.bounds.full_lo(),
                &d.bounds.full_hi(),
                &cfg.minor(),
            );
            let new = as_policy(&r.x);
            let old = as_vec(&policies[j]);
            for (a, b) in old.iter().zip(&r.x) {
                last_move = last_move.max((a - b).abs());
            }
            policies[j] = new;
        }
        if last_move <= cfg.eps1 {
            converged = true;
            break;
        }
    }
    let costs = finite_game_costs(devices, &policies, mu3)?;
    Ok(NashResult {
        policies,
        costs,
        converged,
        rounds,
        last_move,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::Bounds;

    #[test]
    fn exogenous_rate_excludes_self() {
        let d = TypeProfile::new("d", 1.0, 10.0, 0.5, Bounds::new(1.0, 0.8));
        let devs = vec![d.clone(), d.clone(), d];
        let pols = vec![
            DevicePolicy::new(0.5, 1.0, 0.5),
            DevicePolicy::new(1.0, 1.0, 0.5),
            DevicePolicy::new(0.0, 1.0, 0.5),
        ];
        assert!((exogenous_for(&devs, &pols, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((exogenous_for(&devs, &pols, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_game_is_rejected() {
        let r = nash_solve(
            &[],
            15.0,
            &DevicePolicy::new(0.5, 0.5, 0.5),
            &SolverConfig::default(),
        );
        assert!(r.is_err());
    }
}
