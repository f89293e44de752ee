//! Analytic age against the faithful simulator.

use crate::config::{ModelConfig, ModelKind};
use crate::error::Result;
use crate::run::{analytic_delta, simulate_model, topology_name, PointResult};
use crate::sweep::point_seed;
use crate::table::{Column, Value};

pub fn columns() -> Vec<Column> {
    let mut c = vec![Column::text("topology")];
    c.extend(
        [
            "point",
            "analytic",
            "sim_mean",
            "ci95",
            "ci3sigma",
            "z",
            "deliveries",
            "events",
            "horizon",
            "within_3sigma",
        ]
        .map(Column::metric),
    );
    c
}

fn model(topology: ModelKind, r: [f64; 7]) -> ModelConfig {
    let [lambda, p, mu1, mu2, mu3, cross, lambda_p_bar] = r;
    ModelConfig {
        topology,
        lambda,
        p,
        mu1,
        mu2,
        mu3,
        lambda_e: if topology == ModelKind::Primary {
            0.0
        } else {
            cross
        },
        lambda_s: if topology == ModelKind::Primary {
            cross
        } else {
            0.0
        },
        lambda_p_bar,
        horizon: 1e5,
    }
}

/// Five points per topology. Secondary points carry heavy cross traffic at
/// the ES and the shared transmitter.
pub fn points() -> Vec<ModelConfig> {
    use ModelKind::*;
    // lambda, p, mu1, mu2, mu3, lambda_e or lambda_s, lambda_p_bar
    let eq = [
        [10.0, 0.5, 1.0, 0.8, 15.0, 5.0, 0.0],
        [2.0, 1.0, 0.5, 1.0, 5.0, 0.0, 0.0],
        [5.0, 0.2, 3.0, 0.5, 10.0, 10.0, 0.0],
        [3.0, 0.7, 0.8, 0.6, 15.0, 12.0, 0.0],
        [4.0, 0.0, 2.0, 1.0, 3.0, 2.0, 0.0],
    ];
    let pr = [
        [4.0, 0.5, 2.0, 0.5, 15.0, 20.0, 0.0],
        [2.0, 0.3, 1.0, 0.8, 15.0, 5.0, 0.0],
        [6.0, 0.8, 3.0, 1.5, 8.0, 0.0, 0.0],
        [1.0, 0.1, 0.6, 0.3, 15.0, 10.0, 0.0],
        [3.0, 0.5, 1.5, 1.0, 4.0, 2.0, 0.0],
    ];
    let se = [
        [5.0, 0.5, 2.0, 0.6, 15.0, 10.0, 2.0],
        [4.0, 0.3, 1.0, 0.7, 15.0, 10.0, 2.0],
        [4.0, 0.7, 3.0, 1.0, 10.0, 12.0, 4.0],
        [3.0, 0.5, 1.5, 0.5, 15.0, 10.0, 3.0],
        [6.0, 0.2, 2.0, 0.4, 12.0, 10.0, 3.0],
    ];
    eq.iter()
        .map(|r| model(Equitable, *r))
        .chain(pr.iter().map(|r| model(Primary, *r)))
        .chain(se.iter().map(|r| model(Secondary, *r)))
        .collect()
}

/// Simulates `m` over `horizon` and compares with the analytic age.
pub fn compare(m: &ModelConfig, horizon: f64, seed: u64) -> Result<Vec<Value>> {
    let analytic = analytic_delta(m)?;
    let est = simulate_model(m, horizon, seed)?;
    Ok(row(m, f64::NAN, analytic, &est))
}

fn row(m: &ModelConfig, point: f64, analytic: f64, est: &queue_sim::SimEstimate) -> Vec<Value> {
    let mon = &est.monitors[0];
    vec![
        topology_name(m.topology).into(),
        point.into(),
        analytic.into(),
        mon.aoi.mean.into(),
        mon.aoi.ci95.into(),
        mon.aoi.ci3sigma.into(),
        mon.aoi.z_score(analytic).into(),
        (mon.deliveries as f64).into(),
        (est.events as f64).into(),
        est.horizon.into(),
        mon.aoi.contains_3sigma(analytic).into(),
    ]
}

/// Runs `m` with a horizon long enough for `min_deliveries` packets at the
/// tagged monitor. A pilot run one hundredth as long sets the delivery rate.
pub fn until_deliveries(
    m: &ModelConfig,
    min_deliveries: u64,
    seed: u64,
) -> Result<queue_sim::SimEstimate> {
    let pilot_target = (min_deliveries / 100).max(1000);
    let pilot_horizon = pilot_target as f64 / (m.lambda * (1.0 - queue_sim::WARMUP_FRACTION));
    let pilot = simulate_model(m, pilot_horizon, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let rate = pilot.monitors[0].deliveries.max(1) as f64 / pilot_horizon;
    let mut horizon = 1.03 * min_deliveries as f64 / rate;
    loop {
        let est = simulate_model(m, horizon, seed)?;
        let got = est.monitors[0].deliveries;
        if got >= min_deliveries {
            return Ok(est);
        }
        horizon *= 1.05 * min_deliveries as f64 / got.max(1) as f64;
    }
}

/// Every validation point; `converged` is false when any point misses its
/// 3-sigma interval.
pub fn suite(min_deliveries: u64, seed: u64) -> Result<PointResult> {
    let mut rows = Vec::new();
    let mut all = true;
    for (i, m) in points().iter().enumerate() {
        let analytic = analytic_delta(m)?;
        let est = until_deliveries(m, min_deliveries, point_seed(seed, i))?;
        all &= est.monitors[0].aoi.contains_3sigma(analytic);
        rows.push(row(m, i as f64, analytic, &est));
    }
    Ok(PointResult {
        rows,
        converged: all,
    })
}
