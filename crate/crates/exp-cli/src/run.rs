//! Experiment runners: one table per configuration.

use game_solvers::{
    best_response_multi, cost_mf_equitable, finite_game_costs, mfe_solve, mfe_solve_from,
    mm_mfe_solve, mm_mfe_solve_from, nash_solve, solo_primary, CostBreakdown, DevicePolicy, Market,
    MfeInit, MmInit, TypeProfile,
};
use queue_sim::{simulate, EquitableDevice, NetworkSpec, PrimaryDevice, SecondaryDevice, Topology};
use shs_core::{
    average_aoi, build_equitable_model, build_primary_model, build_secondary_model, busy_fraction,
    primary_aoi_closed_form, EquitableRates, PrimaryRates, SecondaryRates,
};

use crate::config::{ExperimentConfig, Kind, ModelConfig, ModelKind};
use crate::error::{invalid, CliError, Result};
use crate::sweep::{expand, run_ordered};
use crate::table::{Column, ResultTable, Value};
use crate::validate;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rows produced at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub rows: Vec<Vec<Value>>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: ResultTable,
    /// Sweep points with at least one non-converged solve.
    pub non_converged: usize,
}

impl Outcome {
    /// `Ok` when every point converged, [`CliError::NotConverged`] otherwise.
    pub fn status(&self) -> Result<()> {
        match self.non_converged {
            0 => Ok(()),
            n => Err(CliError::NotConverged(n)),
        }
    }
}

/// Runs every point of `cfg` on up to `jobs` threads. The table does not
/// depend on `jobs`.
pub fn run(cfg: &ExperimentConfig, jobs: usize) -> Result<Outcome> {
    cfg.validate()?;
    let kind = cfg.experiment()?;
    let points = expand(cfg)?;
    let mut columns: Vec<Column> = cfg
        .sweep
        .axes
        .iter()
        .map(|a| Column::param(a.param.clone()))
        .collect();
    columns.extend(metric_columns(
        kind,
        points.first().map_or(cfg, |p| &p.config),
    ));
    let results = run_ordered(&points, jobs, |p| run_point(kind, &p.config));
    let mut table = ResultTable::new(columns);
    table.meta("generator", format!("mec {VERSION}"));
    table.meta("experiment", kind.name());
    if !cfg.description.is_empty() {
        table.meta("description", cfg.description.clone());
    }
    table.meta("config_sha256", cfg.hash());
    table.meta("seed", cfg.seed.to_string());
    table.meta("points", points.len().to_string());
    let mut non_converged = 0;
    for (p, r) in points.iter().zip(results) {
        let r = r?;
        if !r.converged {
            non_converged += 1;
        }
        for row in r.rows {
            let mut full: Vec<Value> = p.coords.iter().map(|(_, v)| Value::Num(*v)).collect();
            full.extend(row);
            table.push(full);
        }
    }
    Ok(Outcome {
        table,
        non_converged,
    })
}

fn names(v: &[&str]) -> Vec<Column> {
    v.iter()
        .map(|n| match *n {
            "topology" | "type" | "role" => Column::text(*n),
            _ => Column::metric(*n),
        })
        .collect()
}

pub fn metric_columns(kind: Kind, cfg: &ExperimentConfig) -> Vec<Column> {
    match kind {
        Kind::Aoi => names(&["topology", "delta", "delta_closed_form", "t_local"]),
        Kind::Simulate | Kind::Validate => validate::columns(),
        Kind::Mfe => {
            if cfg.system.as_ref().is_some_and(|s| s.fixed_rho.is_some()) {
                names(&[
                    "type",
                    "fixed_rho",
                    "p",
                    "mu1",
                    "mu2",
                    "cost",
                    "power",
                    "delta",
                    "converged",
                ])
            } else {
                names(&[
                    "type",
                    "p",
                    "mu1",
                    "mu2",
                    "cost",
                    "power",
                    "delta",
                    "rho",
                    "residual",
                    "converged",
                    "start",
                ])
            }
        }
        Kind::Nash => names(&[
            "type",
            "count",
            "ne_p",
            "ne_mu1",
            "ne_mu2",
            "ne_cost",
            "mfe_p",
            "mfe_mu1",
            "mfe_mu2",
            "mfe_cost",
            "rel_gap",
            "converged",
        ]),
        Kind::MmMfe => {
            let mut c = vec![
                "role",
                "p",
                "mu1",
                "mu2",
                "cost",
                "power",
                "delta",
                "payment",
                "t1",
                "t2",
                "rho",
                "residual",
                "converged",
            ];
            if cfg.priority.solo_baseline {
                c.extend(["gain_ratio", "gain_points"]);
            }
            names(&c)
        }
        Kind::Sweep => unreachable!("resolved by ExperimentConfig::experiment"),
    }
}

pub fn run_point(kind: Kind, cfg: &ExperimentConfig) -> Result<PointResult> {
    match kind {
        Kind::Aoi => aoi(cfg.model()?),
        Kind::Simulate => {
            let m = cfg.model()?;
            let row = validate::compare(m, m.horizon, cfg.seed)?;
            Ok(PointResult {
                rows: vec![row],
                converged: true,
            })
        }
        Kind::Validate => validate::suite(cfg.validate.min_deliveries, cfg.seed),
        Kind::Mfe => mfe(cfg),
        Kind::Nash => nash(cfg),
        Kind::MmMfe => mm(cfg),
        Kind::Sweep => unreachable!("resolved by ExperimentConfig::experiment"),
    }
}

pub fn topology_name(k: ModelKind) -> &'static str {
    match k {
        ModelKind::Equitable => "equitable",
        ModelKind::Primary => "primary",
        ModelKind::Secondary => "secondary",
    }
}

/// Analytic average age of the tagged device.
pub fn analytic_delta(m: &ModelConfig) -> Result<f64> {
    Ok(match m.topology {
        ModelKind::Equitable => average_aoi(&build_equitable_model(&EquitableRates {
            lambda: m.lambda,
            p: m.p,
            mu1: m.mu1,
            mu2: m.mu2,
            mu3: m.mu3,
            lambda_e: m.lambda_e,
        })?)?,
        ModelKind::Primary => average_aoi(&build_primary_model(&primary_rates(m))?)?,
        ModelKind::Secondary => average_aoi(&build_secondary_model(&secondary_rates(m))?)?,
    })
}

fn primary_rates(m: &ModelConfig) -> PrimaryRates {
    PrimaryRates {
        lambda_s: m.lambda_s,
        ..PrimaryRates::new(m.lambda, m.p, m.mu1, m.mu2, m.mu3)
    }
}

fn secondary_rates(m: &ModelConfig) -> SecondaryRates {
    SecondaryRates {
        lambda: m.lambda,
        p: m.p,
        mu2: m.mu2,
        mu1: m.mu1,
        mu3: m.mu3,
        lambda_e: m.lambda_e,
        lambda_p_bar: m.lambda_p_bar,
    }
}

/// Faithful simulation topology of the tagged device.
pub fn faithful_topology(m: &ModelConfig) -> Topology {
    match m.topology {
        ModelKind::Equitable => Topology::EquitableFaithful {
            device: EquitableDevice {
                lambda: m.lambda,
                p: m.p,
                mu1: m.mu1,
                mu2: m.mu2,
            },
            mu3: m.mu3,
            lambda_e: m.lambda_e,
        },
        ModelKind::Primary => Topology::PriorityFaithfulPrimary {
            primary: PrimaryDevice {
                lambda: m.lambda,
                p: m.p,
                mu1: m.mu1,
                mu2: m.mu2,
            },
            mu3: m.mu3,
            lambda_s: m.lambda_s,
        },
        ModelKind::Secondary => Topology::PriorityFaithfulSecondary {
            device: SecondaryDevice {
                lambda: m.lambda,
                p: m.p,
                mu2: m.mu2,
            },
            mu1: m.mu1,
            mu3: m.mu3,
            lambda_e: m.lambda_e,
            lambda_p_bar: m.lambda_p_bar,
        },
    }
}

pub fn simulate_model(m: &ModelConfig, horizon: f64, seed: u64) -> Result<queue_sim::SimEstimate> {
    Ok(simulate(&NetworkSpec::new(
        faithful_topology(m),
        horizon,
        seed,
    ))?)
}

fn aoi(m: &ModelConfig) -> Result<PointResult> {
    let delta = analytic_delta(m)?;
    let closed = match m.topology {
        ModelKind::Primary => primary_aoi_closed_form(&primary_rates(m)).unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    let row = vec![
        topology_name(m.topology).into(),
        delta.into(),
        closed.into(),
        busy_fraction(m.lambda * m.p, m.mu2).into(),
    ];
    Ok(PointResult {
        rows: vec![row],
        converged: true,
    })
}

fn delta_or_nan(c: &CostBreakdown) -> f64 {
    c.delta.unwrap_or(f64::NAN)
}

fn mfe(cfg: &ExperimentConfig) -> Result<PointResult> {
    let sys = cfg.system()?;
    let profiles = cfg.profiles()?;
    let solver = cfg.solver_config();
    let init = cfg.init.as_ref().and_then(|i| i.policy).map(|p| p.policy());
    if let Some(rho) = sys.fixed_rho {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(invalid(format!(
                "`fixed_rho` must be finite and >= 0, got {rho}"
            )));
        }
        let mut rows = Vec::new();
        let mut converged = true;
        for t in &profiles {
            t.validate()?;
            let d = best_response_multi(t, rho, sys.n, sys.mu3, init.as_ref(), &solver);
            let x = DevicePolicy::new(d.x[0], d.x[1], d.x[2]);
            let c = cost_mf_equitable(&x, t, rho, sys.n, sys.mu3)?;
            converged &= d.converged;
            rows.push(vec![
                t.id.clone().into(),
                rho.into(),
                x.p.into(),
                x.mu1.into(),
                x.mu2.into(),
                c.total().into(),
                c.power().into(),
                delta_or_nan(&c).into(),
                d.converged.into(),
            ]);
        }
        return Ok(PointResult { rows, converged });
    }
    let r = match &cfg.init {
        Some(i) => {
            let policies = profiles
                .iter()
                .map(|t| init.unwrap_or_else(|| mid_policy(t)))
                .collect();
            mfe_solve_from(
                &profiles,
                sys.n,
                sys.mu3,
                &solver,
                &MfeInit {
                    rho: i.rho,
                    policies,
                },
            )?
        }
        None => mfe_solve(&profiles, sys.n, sys.mu3, &solver)?,
    };
    let rows = r
        .types
        .iter()
        .map(|t| {
            vec![
                t.id.clone().into(),
                t.policy.p.into(),
                t.policy.mu1.into(),
                t.policy.mu2.into(),
                t.cost.total().into(),
                t.cost.power().into(),
                delta_or_nan(&t.cost).into(),
                r.rho().into(),
                r.residual.into(),
                (r.converged && t.converged).into(),
                r.start.into(),
            ]
        })
        .collect();
    let converged = r.converged && r.types.iter().all(|t| t.converged);
    Ok(PointResult { rows, converged })
}

fn mid_policy(t: &TypeProfile) -> DevicePolicy {
    DevicePolicy::new(0.5, 0.5 * t.bounds.p_max, 0.5 * t.bounds.f_max)
}

/// Splits `n` devices over the types in proportion to their weights
/// (largest remainder, ties to the earlier type).
pub fn device_counts(weights: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        (exact[b] - exact[b].floor())
            .total_cmp(&(exact[a] - exact[a].floor()))
            .then(a.cmp(&b))
    });
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

fn nash(cfg: &ExperimentConfig) -> Result<PointResult> {
    let sys = cfg.system()?;
    let profiles = cfg.profiles()?;
    let solver = cfg.solver_config();
    let counts = device_counts(
        &profiles.iter().map(|t| t.weight).collect::<Vec<_>>(),
        sys.n,
    );
    let devices: Vec<TypeProfile> = profiles
        .iter()
        .zip(&counts)
        .flat_map(|(t, &c)| std::iter::repeat(t.clone()).take(c))
        .collect();
    let init = cfg
        .init
        .as_ref()
        .and_then(|i| i.policy)
        .map(|p| p.policy())
        .unwrap_or_else(|| mid_policy(&profiles[0]));
    let ne = nash_solve(&devices, sys.mu3, &init, &solver)?;
    let mf = mfe_solve(&profiles, sys.n, sys.mu3, &solver)?;
    let mf_policies: Vec<DevicePolicy> = profiles
        .iter()
        .zip(&counts)
        .zip(&mf.types)
        .flat_map(|((_, &c), t)| std::iter::repeat(t.policy).take(c))
        .collect();
    let mf_costs = finite_game_costs(&devices, &mf_policies, sys.mu3)?;
    let converged = ne.converged && mf.converged;
    let mut rows = Vec::new();
    let mut offset = 0;
    for ((t, &c), mt) in profiles.iter().zip(&counts).zip(&mf.types) {
        let range = offset..offset + c;
        offset += c;
        if c == 0 {
            continue;
        }
        let k = c as f64;
        // clamped so that rounding cannot leave the range of the averaged values
        let mean = |f: &dyn Fn(usize) -> f64| {
            let (lo, hi) = range
                .clone()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                    (a.min(x), b.max(x))
                });
            (range.clone().map(f).sum::<f64>() / k).clamp(lo, hi)
        };
        let ne_cost = mean(&|i| ne.costs[i].total());
        let mfe_cost = mean(&|i| mf_costs[i].total());
        rows.push(vec![
            t.id.clone().into(),
            c.into(),
            mean(&|i| ne.policies[i].p).into(),
            mean(&|i| ne.policies[i].mu1).into(),
            mean(&|i| ne.policies[i].mu2).into(),
            ne_cost.into(),
            mt.policy.p.into(),
            mt.policy.mu1.into(),
            mt.policy.mu2.into(),
            mfe_cost.into(),
            ((mfe_cost - ne_cost).abs() / ne_cost.abs()).into(),
            converged.into(),
        ]);
    }
    Ok(PointResult { rows, converged })
}

fn mm(cfg: &ExperimentConfig) -> Result<PointResult> {
    let sys = cfg.system()?;
    let profiles = cfg.profiles()?;
    let primary = cfg.primary()?.profile();
    let solver = cfg.solver_config();
    let market = Market {
        n: sys.n,
        mu3: sys.mu3,
        alpha: sys.alpha,
    };
    let r = match &cfg.init {
        Some(i) => {
            let pp = i
                .policy
                .map(|p| p.policy())
                .unwrap_or_else(|| mid_policy(&primary));
            let secondaries = profiles
                .iter()
                .map(|t| match i.secondary {
                    Some(s) => DevicePolicy::secondary(s.p, s.mu2),
                    None => DevicePolicy::secondary(0.5, 0.5 * t.bounds.f_max),
                })
                .collect();
            mm_mfe_solve_from(
                &primary,
                &profiles,
                &market,
                &solver,
                &MmInit {
                    rho: i.rho,
                    primary: pp,
                    secondaries,
                },
            )?
        }
        None => mm_mfe_solve(&primary, &profiles, &market, &solver)?,
    };
    let pr = r
        .primary
        .as_ref()
        .expect("priority results carry the primary");
    let mut converged = r.converged && pr.converged && r.types.iter().all(|t| t.converged);
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let line = |role: &str,
                x: &DevicePolicy,
                c: &CostBreakdown,
                t1: f64,
                t2: f64,
                rho: f64,
                res: f64,
                ok: bool| {
        vec![
            role.into(),
            x.p.into(),
            x.mu1.into(),
            x.mu2.into(),
            c.total().into(),
            c.power().into(),
            delta_or_nan(c).into(),
            c.revenue.into(),
            t1.into(),
            t2.into(),
            rho.into(),
            res.into(),
            ok.into(),
        ]
    };
    rows.push(line(
        "primary",
        &pr.policy,
        &pr.cost,
        pr.t1,
        pr.t2,
        r.rho(),
        r.residual,
        r.converged && pr.converged,
    ));
    for t in &r.types {
        rows.push(line(
            &t.id,
            &t.policy,
            &t.cost,
            pr.t1,
            pr.t2,
            r.rho(),
            r.residual,
            r.converged && t.converged,
        ));
    }
    if cfg.priority.solo_baseline {
        let init = cfg.init.as_ref().and_then(|i| i.policy).map(|p| p.policy());
        let d = solo_primary(&primary, sys.mu3, init.as_ref(), &solver);
        let x = DevicePolicy::new(d.x[0], d.x[1], d.x[2]);
        let solo = game_solvers::cost_primary(&x, &primary, sys.mu3, 0.0, 0.0)?;
        converged &= d.converged;
        rows.push(line(
            "primary-solo",
            &x,
            &solo.breakdown,
            solo.t1,
            0.0,
            0.0,
            0.0,
            d.converged,
        ));
        let with = pr.t1 + pr.t2;
        let ratio = (with - solo.t1) / solo.t1;
        let points = with - solo.t1;
        for row in &mut rows {
            row.push(ratio.into());
            row.push(points.into());
        }
    }
    Ok(PointResult { rows, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_weights() {
        assert_eq!(device_counts(&[1.0], 30), vec![30]);
        assert_eq!(device_counts(&[1.0, 1.0, 1.0], 10), vec![4, 3, 3]);
        assert_eq!(device_counts(&[0.2, 0.8], 5), vec![1, 4]);
        assert_eq!(device_counts(&[1.0, 2.0], 0), vec![0, 0]);
    }

    #[test]
    fn aoi_of_an_isolated_local_device() {
        let m = ModelConfig {
            topology: ModelKind::Equitable,
            lambda: 2.0,
            p: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            mu3: 15.0,
            lambda_e: 0.0,
            lambda_s: 0.0,
            lambda_p_bar: 0.0,
            horizon: 1e3,
        };
        let d = analytic_delta(&m).unwrap();
        assert!((d - 1.5).abs() < 1e-12, "{d}");
    }
}
