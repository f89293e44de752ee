//! Per-device costs: transmit power, local power and weighted age, plus the
//! transmitter-sharing payment in the priority game.

use shs_core::{
    average_aoi, build_equitable_model, build_primary_model, build_secondary_model, busy_fraction,
    primary_aoi_closed_form, secondary_busy_fraction, EquitableRates, PrimaryRates, SecondaryRates,
    ShsError,
};

use crate::error::Result;
use crate::policy::{DevicePolicy, TypeProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `t_T mu1`.
    pub transmit: f64,
    /// `t_L eta mu2^3`.
    pub local: f64,
    /// `V Delta`.
    pub aoi: f64,
    /// Signed payment: negative when received, positive when paid.
    pub revenue: f64,
    /// Average age; `None` when `V = 0` and it was not evaluated.
    pub delta: Option<f64>,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.transmit + self.local + self.aoi + self.revenue
    }

    pub fn power(&self) -> f64 {
        self.transmit + self.local
    }
}

fn weighted(v: f64, delta: impl FnOnce() -> Result<f64>) -> Result<(f64, Option<f64>)> {
    if v == 0.0 {
        return Ok((0.0, None));
    }
    let d = delta()?;
    Ok((v * d, Some(d)))
}

/// Equitable-access cost at a given exogenous rate into the ES.
pub fn cost_equitable(
    policy: &DevicePolicy,
    profile: &TypeProfile,
    lambda_e: f64,
    mu3: f64,
) -> Result<CostBreakdown> {
    let DevicePolicy { p, mu1, mu2 } = *policy;
    let lambda = profile.lambda;
    let t_t = busy_fraction(lambda * (1.0 - p), mu1);
    let t_l = busy_fraction(lambda * p, mu2);
    let (aoi, delta) = weighted(profile.v, || {
        let r = EquitableRates {
            lambda,
            p,
            mu1,
            mu2,
            mu3,
            lambda_e,
        };
        Ok(average_aoi(&build_equitable_model(&r)?)?)
    })?;
    Ok(CostBreakdown {
        transmit: t_t * mu1,
        local: t_l * profile.eta * mu2.powi(3),
        aoi,
        revenue: 0.0,
        delta,
    })
}

/// Mean-field exogenous rate `(N-1) rho mu3`.
pub fn mf_exogenous_rate(rho: f64, n: usize, mu3: f64) -> f64 {
    (n as f64 - 1.0) * rho * mu3
}

/// [`cost_equitable`] with `lambda_e = (N-1) rho mu3`.
pub fn cost_mf_equitable(
    policy: &DevicePolicy,
    profile: &TypeProfile,
    rho: f64,
    n: usize,
    mu3: f64,
) -> Result<CostBreakdown> {
    cost_equitable(policy, profile, mf_exogenous_rate(rho, n, mu3), mu3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryCost {
    pub breakdown: CostBreakdown,
    /// Fraction of time `T_P` serves primary packets.
    pub t1: f64,
    /// Fraction of time `T_P` serves secondary packets.
    pub t2: f64,
}

impl PrimaryCost {
    pub fn transmitter_busy(&self) -> f64 {
        self.t1 + self.t2
    }
}

/// Primary average age; the closed form away from `mu1P = mu3`, the linear system near it.
pub fn primary_aoi(lambda: f64, policy: &DevicePolicy, mu3: f64) -> Result<f64> {
    let r = PrimaryRates::new(lambda, policy.p, policy.mu1, policy.mu2, mu3);
    match primary_aoi_closed_form(&r) {
        Err(ShsError::ClosedFormSingular { .. }) => Ok(average_aoi(&build_primary_model(&r)?)?),
        other => Ok(other?),
    }
}

/// Primary cost with secondary load `lambda_s` at `T_P` and unit price `alpha`.
pub fn cost_primary(
    policy: &DevicePolicy,
    profile: &TypeProfile,
    mu3: f64,
    lambda_s: f64,
    alpha: f64,
) -> Result<PrimaryCost> {
    let DevicePolicy { p, mu1, mu2 } = *policy;
    let own = profile.lambda * (1.0 - p);
    let t1 = busy_fraction(own, mu1);
    let t2 = secondary_busy_fraction(lambda_s, mu1, own);
    let t_l = busy_fraction(profile.lambda * p, mu2);
    let (aoi, delta) = weighted(profile.v, || primary_aoi(profile.lambda, policy, mu3))?;
    Ok(PrimaryCost {
        breakdown: CostBreakdown {
            transmit: (t1 + t2) * mu1,
            local: t_l * profile.eta * mu2.powi(3),
            aoi,
            revenue: -alpha * t2,
            delta,
        },
        t1,
        t2,
    })
}

/// [`cost_primary`] with `lambda_s = N mu1P rho`.
pub fn cost_mf_primary(
    policy: &DevicePolicy,
    profile: &TypeProfile,
    mu3: f64,
    rho: f64,
    n: usize,
    alpha: f64,
) -> Result<PrimaryCost> {
    cost_primary(policy, profile, mu3, n as f64 * policy.mu1 * rho, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryCost {
    pub breakdown: CostBreakdown,
    pub t2: f64,
}

/// What a secondary device sees of the primary device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryView {
    pub lambda: f64,
    pub p: f64,
    pub mu1: f64,
}

impl PrimaryView {
    pub fn new(lambda: f64, policy: &DevicePolicy) -> Self {
        Self {
            lambda,
            p: policy.p,
            mu1: policy.mu1,
        }
    }

    pub fn offload_rate(&self) -> f64 {
        self.lambda * (1.0 - self.p)
    }
}

/// Secondary cost; only `policy.p` and `policy.mu2` are read.
#[allow(clippy::too_many_arguments)]
pub fn cost_secondary(
    policy: &DevicePolicy,
    profile: &TypeProfile,
    primary: &PrimaryView,
    mu3: f64,
    lambda_e: f64,
    lambda_s: f64,
    alpha: f64,
) -> Result<SecondaryCost> {
    let (p, mu2) = (policy.p, policy.mu2);
    let lambda = profile.lambda;
    let t2 = secondary_busy_fraction(lambda_s, primary.mu1, primary.offload_rate());
    let t_l = busy_fraction(lambda * p, mu2);
    let (aoi, delta) = weighted(profile.v, || {
        let r = SecondaryRates {
            lambda,
            p,
            mu2,
            mu1: primary.mu1,
            mu3,
            lambda_e,
            lambda_p_bar: primary.offload_rate(),
        };
        Ok(average_aoi(&build_secondary_model(&r)?)?)
    })?;
    Ok(SecondaryCost {
        breakdown: CostBreakdown {
            transmit: 0.0,
            local: t_l * profile.eta * mu2.powi(3),
            aoi,
            revenue: alpha * t2 * lambda * (1.0 - p),
            delta,
        },
        t2,
    })
}

/// [`cost_secondary`] with `lambda_e = (N-1) mu1P rho` and `lambda_s = N mu1P rho`.
pub fn cost_mf_secondary(
    policy: &DevicePolicy,
    profile: &TypeProfile,
    primary: &PrimaryView,
    mu3: f64,
    rho: f64,
    n: usize,
    alpha: f64,
) -> Result<SecondaryCost> {
    let unit = primary.mu1 * rho;
    cost_secondary(
        policy,
        profile,
        primary,
        mu3,
        (n as f64 - 1.0) * unit,
        n as f64 * unit,
        alpha,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::Bounds;

    fn profile(lambda: f64, v: f64, eta: f64) -> TypeProfile {
        TypeProfile::new("t", lambda, v, eta, Bounds::new(1.0, 0.8))
    }

    #[test]
    fn no_local_power_when_everything_is_offloaded() {
        let c = cost_equitable(
            &DevicePolicy::new(0.0, 0.7, 0.5),
            &profile(3.0, 10.0, 0.5),
            2.0,
            15.0,
        )
        .unwrap();
        assert_eq!(c.local, 0.0);
        assert!(c.aoi > 0.0);
    }

    #[test]
    fn idle_rates_without_age_weight_cost_nothing() {
        let c = cost_equitable(
            &DevicePolicy::new(0.3, 0.0, 0.0),
            &profile(3.0, 0.0, 0.5),
            2.0,
            15.0,
        )
        .unwrap();
        assert_eq!(c.total(), 0.0);
        assert_eq!(c.delta, None);
    }

    #[test]
    fn components_reassemble() {
        let pol = DevicePolicy::new(0.5, 1.0, 0.8);
        let prof = profile(10.0, 10.0, 0.02);
        let c = cost_equitable(&pol, &prof, 5.0, 15.0).unwrap();
        let delta = average_aoi(
            &build_equitable_model(&EquitableRates {
                lambda: 10.0,
                p: 0.5,
                mu1: 1.0,
                mu2: 0.8,
                mu3: 15.0,
                lambda_e: 5.0,
            })
            .unwrap(),
        )
        .unwrap();
        let hand = (5.0 / 6.0) * 1.0 + (5.0 / 5.8) * 0.02 * 0.512 + 10.0 * delta;
        assert!((c.total() - hand).abs() < 1e-12 * hand);
    }

    #[test]
    fn mean_field_substitution() {
        let pol = DevicePolicy::new(0.4, 0.9, 0.6);
        let prof = profile(1.0, 10.0, 0.5);
        let a = cost_mf_equitable(&pol, &prof, 0.0, 17, 15.0).unwrap();
        let b = cost_equitable(&pol, &prof, 0.0, 15.0).unwrap();
        assert_eq!(a, b);
        let a = cost_mf_equitable(&pol, &prof, 0.5, 31, 15.0).unwrap();
        let b = cost_equitable(&pol, &prof, 225.0, 15.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn primary_shares_of_the_transmitter() {
        let pol = DevicePolicy::new(0.5, 1.0, 0.5);
        let prof = TypeProfile::new("P", 2.0, 10.0, 0.5, Bounds::new(2.0, 0.5));
        let solo = cost_primary(&pol, &prof, 15.0, 0.0, 0.0).unwrap();
        assert_eq!(solo.t2, 0.0);
        assert_eq!(solo.breakdown.revenue, 0.0);
        assert!((solo.t1 - 0.5).abs() < 1e-15);
        let shared = cost_primary(&pol, &prof, 15.0, 10.0, 1.0).unwrap();
        assert!((shared.t2 - 10.0 / 12.0 * 0.5).abs() < 1e-15);
        assert!((shared.breakdown.revenue + shared.t2).abs() < 1e-15);
        assert_eq!(shared.breakdown.aoi, solo.breakdown.aoi);
    }

    #[test]
    fn secondary_payment() {
        let prof = profile(5.0, 10.0, 0.5);
        let primary = PrimaryView {
            lambda: 4.0,
            p: 0.5,
            mu1: 2.0,
        };
        let c = cost_secondary(
            &DevicePolicy::secondary(0.5, 0.6),
            &prof,
            &primary,
            15.0,
            10.0,
            12.5,
            1.0,
        )
        .unwrap();
        let t2 = 12.5 / 16.5 * 0.5;
        assert!((c.t2 - t2).abs() < 1e-15);
        assert!((c.breakdown.revenue - t2 * 2.5).abs() < 1e-14);
        let local_only = cost_secondary(
            &DevicePolicy::secondary(1.0, 0.6),
            &prof,
            &primary,
            15.0,
            10.0,
            12.5,
            0.0,
        )
        .unwrap();
        assert_eq!(local_only.breakdown.revenue, 0.0);
    }
}
