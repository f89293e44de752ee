//! Major-minor mean-field equilibrium of the priority-access game.

use rand::Rng;

use crate::config::SolverConfig;
use crate::cost::{cost_mf_primary, cost_mf_secondary, PrimaryCost, PrimaryView, SecondaryCost};
use crate::descent::{block_descent, Descent};
use crate::error::{nonnegative, positive, Result};
use crate::mfe::{
    as_policy, as_vec, finite_or_inf, lowest, outcomes, pick, start_rng, Damping,
    EquilibriumResult, MeanField, PrimaryOutcome,
};
use crate::policy::{check_population_size, validate_population, DevicePolicy, TypeProfile};

/// Environment of the priority game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Market {
    /// Number of secondary devices.
    pub n: usize,
    pub mu3: f64,
    /// Unit price for the shared transmitter.
    pub alpha: f64,
}

impl Market {
    pub fn validate(&self) -> Result<()> {
        check_population_size(self.n)?;
        positive("mu3", self.mu3)?;
        nonnegative("alpha", self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmInit {
    pub rho: f64,
    pub primary: DevicePolicy,
    /// Secondary policies; `mu1` is ignored.
    pub secondaries: Vec<DevicePolicy>,
}

/// Primary best response to the mean field `rho`.
pub fn primary_response(
    primary: &TypeProfile,
    market: &Market,
    rho: f64,
    init: &DevicePolicy,
    cfg: &SolverConfig,
) -> Descent {
    let f = |x: &[f64]| {
        finite_or_inf(
            cost_mf_primary(
                &as_policy(x),
                primary,
                market.mu3,
                rho,
                market.n,
                market.alpha,
            ),
            |c: &PrimaryCost| c.breakdown.total(),
        )
    };
    block_descent(
        &f,
        &as_vec(init),
        &primary.bounds.full_lo(),
        &primary.bounds.full_hi(),
        &cfg.minor(),
    )
}

/// Secondary best response over `(p, mu2)` given the primary policy.
pub fn secondary_response(
    profile: &TypeProfile,
    view: &PrimaryView,
    market: &Market,
    rho: f64,
    init: &DevicePolicy,
    cfg: &SolverConfig,
) -> Descent {
    let f = |x: &[f64]| {
        finite_or_inf(
            cost_mf_secondary(
                &DevicePolicy::secondary(x[0], x[1]),
                profile,
                view,
                market.mu3,
                rho,
                market.n,
                market.alpha,
            ),
            |c: &SecondaryCost| c.breakdown.total(),
        )
    };
    block_descent(
        &f,
        &[init.p, init.mu2],
        &[0.0, 0.0],
        &[1.0, profile.bounds.f_max],
        &cfg.secondary(),
    )
}

/// The primary device alone: no secondary load and no price. Multi-start
/// over the primary box, plus `init` if given.
pub fn solo_primary(
    primary: &TypeProfile,
    mu3: f64,
    init: Option<&DevicePolicy>,
    cfg: &SolverConfig,
) -> Descent {
    let market = Market {
        n: 1,
        mu3,
        alpha: 0.0,
    };
    let b = primary.bounds;
    lowest(
        init,
        cfg,
        |rng| {
            DevicePolicy::new(
                rng.random::<f64>(),
                rng.random::<f64>() * b.p_max,
                rng.random::<f64>() * b.f_max,
            )
        },
        |x| primary_response(primary, &market, 0.0, x, cfg),
    )
}

/// Consistency map `E[lambda (1-p)] / mu1P`.
pub fn consistency_priority(
    profiles: &[TypeProfile],
    secondaries: &[DevicePolicy],
    mu1p: f64,
) -> f64 {
    let offered: f64 = profiles
        .iter()
        .zip(secondaries)
        .map(|(t, x)| t.weight * t.lambda * (1.0 - x.p))
        .sum();
    if offered == 0.0 {
        0.0
    } else {
        offered / mu1p
    }
}

/// Multi-start major-minor fixed-point iteration.
pub fn mm_mfe_solve(
    primary: &TypeProfile,
    profiles: &[TypeProfile],
    market: &Market,
    cfg: &SolverConfig,
) -> Result<EquilibriumResult> {
    validate_population(profiles)?;
    primary.validate()?;
    cfg.validate()?;
    let mut best: Option<EquilibriumResult> = None;
    for start in 0..cfg.multi_start {
        let mut rng = start_rng(cfg.seed, start);
        let b = primary.bounds;
        let p0 = DevicePolicy::new(
            rng.random::<f64>(),
            rng.random::<f64>() * b.p_max,
            rng.random::<f64>() * b.f_max,
        );
        let secondaries: Vec<DevicePolicy> = profiles
            .iter()
            .map(|t| {
                DevicePolicy::secondary(rng.random::<f64>(), rng.random::<f64>() * t.bounds.f_max)
            })
            .collect();
        let rho =
            consistency_priority(profiles, &secondaries, p0.mu1.max(1e-3)) * rng.random::<f64>();
        let init = MmInit {
            rho,
            primary: p0,
            secondaries,
        };
        let mut r = mm_mfe_solve_from(primary, profiles, market, cfg, &init)?;
        r.start = start;
        best = Some(match best {
            None => r,
            Some(b) => pick(b, r, profiles),
        });
    }
    Ok(best.expect("multi_start >= 1"))
}

/// One major-minor fixed-point run from `init`.
pub fn mm_mfe_solve_from(
    primary: &TypeProfile,
    profiles: &[TypeProfile],
    market: &Market,
    cfg: &SolverConfig,
    init: &MmInit,
) -> Result<EquilibriumResult> {
    validate_population(profiles)?;
    primary.validate()?;
    market.validate()?;
    cfg.validate()?;
    let mut rho = init.rho.max(0.0);
    let mut pp = init.primary;
    let mut sec = init.secondaries.clone();
    let mut primary_ok = true;
    let mut inner_ok = vec![true; profiles.len()];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut damping = Damping::new(cfg.gamma1);
    for _ in 0..cfg.max_outer {
        trace.push(rho);
        let d = primary_response(primary, market, rho, &pp, cfg);
        pp = as_policy(&d.x);
        primary_ok = d.converged;
        let view = PrimaryView::new(primary.lambda, &pp);
        for (i, t) in profiles.iter().enumerate() {
            if t.is_silent() {
                continue;
            }
            let d = secondary_response(t, &view, market, rho, &sec[i], cfg);
            sec[i] = DevicePolicy::secondary(d.x[0], d.x[1]);
            inner_ok[i] = d.converged;
        }
        let psi = consistency_priority(profiles, &sec, pp.mu1);
        residual = (psi - rho).abs();
        if residual <= cfg.eps1 {
            converged = true;
            break;
        }
        rho = damping.step(rho, psi);
    }
    let view = PrimaryView::new(primary.lambda, &pp);
    let types = outcomes(profiles, &sec, &inner_ok, |t, x| {
        cost_mf_secondary(x, t, &view, market.mu3, rho, market.n, market.alpha).map(|c| c.breakdown)
    });
    let pc = cost_mf_primary(&pp, primary, market.mu3, rho, market.n, market.alpha)?;
    Ok(EquilibriumResult {
        types,
        primary: Some(PrimaryOutcome {
            policy: pp,
            cost: pc.breakdown,
            t1: pc.t1,
            t2: pc.t2,
            converged: primary_ok,
        }),
        mean_field: MeanField { rho },
        trace,
        residual,
        converged,
        start: 0,
    })
}
