use shs_core::{busy_fraction, secondary_busy_fraction};

use crate::engine::{simulate, SimEstimate};
use crate::error::Result;
use crate::spec::{NetworkSpec, Topology};
use crate::stats::Interval;

/// What part of a server's busy time is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupancy {
    Any,
    Primary,
    Secondary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusyCheck {
    pub server: String,
    pub occupancy: Occupancy,
    pub simulated: Interval,
    pub analytic: f64,
}

impl BusyCheck {
    pub fn within_3sigma(&self) -> bool {
        self.simulated.contains_3sigma(self.analytic)
    }
}

/// Analytic busy fractions for every server that has one, paired with the
/// simulated values from `est`.
pub fn busy_fractions_against(spec: &NetworkSpec, est: &SimEstimate) -> Vec<BusyCheck> {
    let mut expected: Vec<(String, Occupancy, f64)> = Vec::new();
    let mut device = |tag: String, lambda: f64, p: f64, mu1: Option<f64>, mu2: f64| {
        if let Some(mu1) = mu1 {
            expected.push((
                format!("T[{tag}]"),
                Occupancy::Any,
                busy_fraction(lambda * (1.0 - p), mu1),
            ));
        }
        expected.push((
            format!("L[{tag}]"),
            Occupancy::Any,
            busy_fraction(lambda * p, mu2),
        ));
    };
    let mut shared: Option<(f64, f64, f64)> = None;
    match &spec.topology {
        Topology::EquitableFull { devices, .. } => {
            for (i, d) in devices.iter().enumerate() {
                device(i.to_string(), d.lambda, d.p, Some(d.mu1), d.mu2);
            }
        }
        Topology::EquitableFaithful { device: d, .. } => {
            device("0".into(), d.lambda, d.p, Some(d.mu1), d.mu2)
        }
        Topology::PriorityFull {
            primary,
            secondaries,
            ..
        } => {
            device("P".into(), primary.lambda, primary.p, None, primary.mu2);
            let mut lambda_s = 0.0;
            for (i, s) in secondaries.iter().enumerate() {
                device(i.to_string(), s.lambda, s.p, None, s.mu2);
                lambda_s += s.lambda * (1.0 - s.p);
            }
            shared = Some((primary.lambda * (1.0 - primary.p), lambda_s, primary.mu1));
        }
        Topology::PriorityFaithfulPrimary {
            primary, lambda_s, ..
        } => {
            device("P".into(), primary.lambda, primary.p, None, primary.mu2);
            shared = Some((primary.lambda * (1.0 - primary.p), *lambda_s, primary.mu1));
        }
        Topology::PriorityFaithfulSecondary {
            device: s,
            mu1,
            lambda_e,
            lambda_p_bar,
            ..
        } => {
            device("0".into(), s.lambda, s.p, None, s.mu2);
            shared = Some((*lambda_p_bar, lambda_e + s.lambda * (1.0 - s.p), *mu1));
        }
    }
    if let Some((lambda_p_bar, lambda_s, mu1)) = shared {
        expected.push((
            "T[P]".into(),
            Occupancy::Primary,
            busy_fraction(lambda_p_bar, mu1),
        ));
        expected.push((
            "T[P]".into(),
            Occupancy::Secondary,
            secondary_busy_fraction(lambda_s, mu1, lambda_p_bar),
        ));
    }
    expected
        .into_iter()
        .filter_map(|(server, occupancy, analytic)| {
            let s = est.server(&server)?;
            let simulated = match occupancy {
                Occupancy::Any => s.busy,
                Occupancy::Primary => s.busy_primary,
                Occupancy::Secondary => s.busy_secondary,
            };
            Some(BusyCheck {
                server,
                occupancy,
                simulated,
                analytic,
            })
        })
        .collect()
}

/// Simulates `spec` and compares busy fractions with their closed forms.
pub fn busy_fraction_check(spec: &NetworkSpec) -> Result<Vec<BusyCheck>> {
    let est = simulate(spec)?;
    Ok(busy_fractions_against(spec, &est))
}
