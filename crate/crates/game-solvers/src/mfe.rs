//! Mean-field equilibrium of the equitable-access game.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shs_core::transmitter_throughput;

use crate::config::SolverConfig;
use crate::cost::{cost_mf_equitable, CostBreakdown};
use crate::descent::{block_descent, Descent};
use crate::error::{positive, Result};
use crate::policy::{check_population_size, validate_population, DevicePolicy, TypeProfile};

/// Mean load on the shared resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField {
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeOutcome {
    pub id: String,
    pub policy: DevicePolicy,
    pub cost: CostBreakdown,
    pub converged: bool,
}

impl TypeOutcome {
    pub fn total(&self) -> f64 {
        self.cost.total()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryOutcome {
    pub policy: DevicePolicy,
    pub cost: CostBreakdown,
    pub t1: f64,
    pub t2: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub types: Vec<TypeOutcome>,
    pub primary: Option<PrimaryOutcome>,
    pub mean_field: MeanField,
    /// `rho` at every outer iteration, ending with the returned value.
    pub trace: Vec<f64>,
    /// `|consistency(best response(rho)) - rho|` at the returned point.
    pub residual: f64,
    pub converged: bool,
    /// Index of the start that produced this result.
    pub start: usize,
}

impl EquilibriumResult {
    pub fn rho(&self) -> f64 {
        self.mean_field.rho
    }

    /// Population-weighted cost of the minor devices.
    pub fn mean_cost(&self, profiles: &[TypeProfile]) -> f64 {
        profiles
            .iter()
            .zip(&self.types)
            .map(|(p, t)| p.weight * t.total())
            .sum()
    }
}

/// Starting point of one fixed-point run.
#[derive(Debug, Clone, PartialEq)]
pub struct MfeInit {
    pub rho: f64,
    pub policies: Vec<DevicePolicy>,
}

pub(crate) fn as_vec(p: &DevicePolicy) -> [f64; 3] {
    [p.p, p.mu1, p.mu2]
}

pub(crate) fn as_policy(x: &[f64]) -> DevicePolicy {
    DevicePolicy::new(x[0], x[1], x[2])
}

pub(crate) fn finite_or_inf<T>(r: Result<T>, total: impl FnOnce(&T) -> f64) -> f64 {
    match r {
        Ok(c) => {
            let v = total(&c);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Best response of one type to a fixed mean field.
pub fn best_response(
    profile: &TypeProfile,
    rho: f64,
    n: usize,
    mu3: f64,
    init: &DevicePolicy,
    cfg: &SolverConfig,
) -> Descent {
    if profile.v == 0.0 {
        // power-only cost: zero rates reach the minimum 0 for every p
        return Descent {
            x: vec![init.p, 0.0, 0.0],
            value: 0.0,
            converged: true,
            sweeps: 0,
            evaluations: 0,
        };
    }
    let f = |x: &[f64]| {
        finite_or_inf(
            cost_mf_equitable(&as_policy(x), profile, rho, n, mu3),
            CostBreakdown::total,
        )
    };
    block_descent(
        &f,
        &as_vec(init),
        &profile.bounds.full_lo(),
        &profile.bounds.full_hi(),
        &cfg.minor(),
    )
}

/// [`best_response`] from `init` (if given) and `cfg.multi_start` random
/// points of the box; keeps the lowest cost, the earliest on ties.
pub fn best_response_multi(
    profile: &TypeProfile,
    rho: f64,
    n: usize,
    mu3: f64,
    init: Option<&DevicePolicy>,
    cfg: &SolverConfig,
) -> Descent {
    lowest(
        init,
        cfg,
        |rng| random_policy(rng, profile),
        |x| best_response(profile, rho, n, mu3, x, cfg),
    )
}

pub(crate) fn lowest(
    init: Option<&DevicePolicy>,
    cfg: &SolverConfig,
    draw: impl Fn(&mut ChaCha8Rng) -> DevicePolicy,
    solve: impl Fn(&DevicePolicy) -> Descent,
) -> Descent {
    let mut best = init.map(&solve);
    for start in 0..cfg.multi_start {
        let x = draw(&mut start_rng(cfg.seed, start));
        let d = solve(&x);
        best = match best {
            Some(b) if b.value <= d.value => Some(b),
            _ => Some(d),
        };
    }
    best.expect("multi_start >= 1")
}

/// Damped fixed-point update whose step is halved whenever the residual
/// changes sign without shrinking by half, which breaks two-cycles on steep maps.
#[derive(Debug, Clone)]
pub(crate) struct Damping {
    gamma: f64,
    floor: f64,
    last: Option<f64>,
}

impl Damping {
    pub(crate) fn new(gamma: f64) -> Self {
        Self {
            gamma,
            floor: gamma / 1024.0,
            last: None,
        }
    }

    pub(crate) fn step(&mut self, rho: f64, psi: f64) -> f64 {
        let d = psi - rho;
        if let Some(prev) = self.last {
            if d * prev < 0.0 && d.abs() > 0.5 * prev.abs() {
                self.gamma = (0.5 * self.gamma).max(self.floor);
            }
        }
        self.last = Some(d);
        rho + self.gamma * d
    }
}

/// Consistency map `(1/mu3) E[lambda (1-p) mu1 / (lambda (1-p) + mu1)]`.
pub fn consistency_equitable(profiles: &[TypeProfile], policies: &[DevicePolicy], mu3: f64) -> f64 {
    profiles
        .iter()
        .zip(policies)
        .map(|(t, x)| t.weight * transmitter_throughput(t.lambda * (1.0 - x.p), x.mu1))
        .sum::<f64>()
        / mu3
}

fn random_policy(rng: &mut ChaCha8Rng, t: &TypeProfile) -> DevicePolicy {
    DevicePolicy::new(
        rng.random::<f64>(),
        rng.random::<f64>() * t.bounds.p_max,
        rng.random::<f64>() * t.bounds.f_max,
    )
}

pub(crate) fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

/// Multi-start fixed-point iteration; returns the lowest-cost converged run,
/// or the lowest-cost run flagged non-converged if none converged.
pub fn mfe_solve(
    profiles: &[TypeProfile],
    n: usize,
    mu3: f64,
    cfg: &SolverConfig,
) -> Result<EquilibriumResult> {
    validate_population(profiles)?;
    cfg.validate()?;
    let rho_hi = profiles
        .iter()
        .map(|t| t.weight * t.lambda.min(t.bounds.p_max))
        .sum::<f64>()
        / mu3;
    let mut best: Option<EquilibriumResult> = None;
    for start in 0..cfg.multi_start {
        let mut rng = start_rng(cfg.seed, start);
        let init = MfeInit {
            rho: rng.random::<f64>() * rho_hi,
            policies: profiles
                .iter()
                .map(|t| random_policy(&mut rng, t))
                .collect(),
        };
        let mut r = mfe_solve_from(profiles, n, mu3, cfg, &init)?;
        r.start = start;
        best = Some(match best {
            None => r,
            Some(b) => pick(b, r, profiles),
        });
    }
    Ok(best.expect("multi_start >= 1"))
}

pub(crate) fn pick(
    a: EquilibriumResult,
    b: EquilibriumResult,
    profiles: &[TypeProfile],
) -> EquilibriumResult {
    let score = |r: &EquilibriumResult| {
        r.mean_cost(profiles) + r.primary.as_ref().map_or(0.0, |p| p.cost.total())
    };
    match (a.converged, b.converged) {
        (true, false) => a,
        (false, true) => b,
        _ if score(&b) < score(&a) => b,
        _ => a,
    }
}

/// One fixed-point run from `init`.
pub fn mfe_solve_from(
    profiles: &[TypeProfile],
    n: usize,
    mu3: f64,
    cfg: &SolverConfig,
    init: &MfeInit,
) -> Result<EquilibriumResult> {
    validate_population(profiles)?;
    check_population_size(n)?;
    positive("mu3", mu3)?;
    cfg.validate()?;
    let mut rho = init.rho.max(0.0);
    let mut policies = init.policies.clone();
    let mut inner_ok = vec![true; profiles.len()];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut damping = Damping::new(cfg.gamma1);
    for _ in 0..cfg.max_outer {
        trace.push(rho);
        for (i, t) in profiles.iter().enumerate() {
            if t.is_silent() {
                continue;
            }
            let d = best_response(t, rho, n, mu3, &policies[i], cfg);
            policies[i] = as_policy(&d.x);
            inner_ok[i] = d.converged;
        }
        let psi = consistency_equitable(profiles, &policies, mu3);
        residual = (psi - rho).abs();
        if residual <= cfg.eps1 {
            converged = true;
            break;
        }
        rho = damping.step(rho, psi);
    }
    let types = outcomes(profiles, &policies, &inner_ok, |t, x| {
        cost_mf_equitable(x, t, rho, n, mu3)
    });
    Ok(EquilibriumResult {
        types,
        primary: None,
        mean_field: MeanField { rho },
        trace,
        residual,
        converged,
        start: 0,
    })
}

pub(crate) fn outcomes(
    profiles: &[TypeProfile],
    policies: &[DevicePolicy],
    inner_ok: &[bool],
    cost: impl Fn(&TypeProfile, &DevicePolicy) -> Result<CostBreakdown>,
) -> Vec<TypeOutcome> {
    profiles
        .iter()
        .zip(policies)
        .zip(inner_ok)
        .map(|((t, x), &ok)| TypeOutcome {
            id: t.id.clone(),
            policy: *x,
            cost: cost(t, x).unwrap_or(CostBreakdown {
                transmit: 0.0,
                local: 0.0,
                aoi: f64::INFINITY,
                revenue: 0.0,
                delta: None,
            }),
            converged: ok,
        })
        .collect()
}
