use crate::error::{Result, ShsError};
use crate::linalg::{LuFactorization, SparseMatrix};
use crate::model::ShsModel;

/// Largest condition estimate accepted from either linear system.
pub const MAX_CONDITION: f64 = 1e12;

const RESIDUAL_TOL: f64 = 1e-10;

/// Stationary distribution of the discrete chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub pi: Vec<f64>,
}

/// Stacked correlation vectors `v_s = E[x 1{s(t) = s}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationVector {
    dim: usize,
    pub v: Vec<f64>,
}

impl CorrelationVector {
    /// Correlation vector of state `s` (length `n_servers + 1`).
    pub fn state(&self, s: usize) -> &[f64] {
        &self.v[s * self.dim..(s + 1) * self.dim]
    }

    pub fn n_states(&self) -> usize {
        self.v.len() / self.dim
    }

    /// Average age at the monitor, `sum_s v_{s0}`.
    pub fn monitor_age(&self) -> f64 {
        (0..self.n_states()).map(|s| self.state(s)[0]).sum()
    }
}

fn rate_scale(m: &ShsModel) -> f64 {
    let max = m.exit_rates().into_iter().fold(0.0, f64::max);
    if max > 0.0 {
        max
    } else {
        1.0
    }
}

/// States reachable from `s1` through positive-rate transitions. Everything
/// else carries zero probability and zero correlation.
pub fn reachable_states(m: &ShsModel) -> Vec<bool> {
    let mut seen = vec![false; m.n_states()];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for t in m.transitions() {
            if t.rate > 0.0 && seen[t.from.0] && !seen[t.to.0] {
                seen[t.to.0] = true;
                changed = true;
            }
        }
    }
    seen
}

/// Dense index of each reachable state, `None` for the rest.
fn compact_index(live: &[bool]) -> (Vec<Option<usize>>, usize) {
    let mut next = 0;
    let map = live
        .iter()
        .map(|&l| {
            l.then(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    (map, next)
}

fn factor_guarded(a: &SparseMatrix, system: &'static str) -> Result<LuFactorization> {
    let lu = LuFactorization::factor_sparse(a).map_err(|_| ShsError::IllConditioned {
        system,
        condition: f64::INFINITY,
    })?;
    let cond = lu.condition_estimate();
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(ShsError::IllConditioned {
            system,
            condition: cond,
        });
    }
    Ok(lu)
}

fn check_residual(a: &SparseMatrix, x: &[f64], b: &[f64], system: &'static str) -> Result<()> {
    let ax = a.mul_vec(x);
    let scale = x.iter().chain(b).fold(1.0_f64, |m, v| m.max(v.abs()));
    let worst = ax
        .iter()
        .zip(b)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    if worst <= RESIDUAL_TOL * scale && x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ShsError::Verification {
            system,
            detail: format!("residual {worst:.3e} exceeds {:.1e}", RESIDUAL_TOL * scale),
        })
    }
}

/// Solves the global balance equations with the normalization
/// `sum pi = 1` replacing the last balance row.
pub fn solve_steady_state(m: &ShsModel) -> Result<SteadyState> {
    steady_state_on(m, &reachable_states(m))
}

fn steady_state_on(m: &ShsModel, live: &[bool]) -> Result<SteadyState> {
    let (map, n) = compact_index(live);
    let r = rate_scale(m);
    let mut entries = Vec::with_capacity(2 * m.transitions().len() + n);
    for t in m.transitions() {
        let (Some(from), Some(to)) = (map[t.from.0], map[t.to.0]) else {
            continue;
        };
        if from == to {
            continue;
        }
        let q = t.rate / r;
        entries.push((from, from, q));
        entries.push((to, from, -q));
    }
    entries.retain(|e| e.0 != n - 1);
    entries.extend((0..n).map(|j| (n - 1, j, 1.0)));
    let a = SparseMatrix::from_triplets(n, entries);
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;

    let lu = factor_guarded(&a, "steady-state")?;
    let compact = lu.solve(&b);
    check_residual(&a, &compact, &b, "steady-state")?;
    let mut pi: Vec<f64> = map.iter().map(|i| i.map_or(0.0, |i| compact[i])).collect();

    if let Some(bad) = pi.iter().find(|&&p| p < -1e-10) {
        return Err(ShsError::Verification {
            system: "steady-state",
            detail: format!("negative probability {bad:.3e}"),
        });
    }
    for p in &mut pi {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }
    Ok(SteadyState { pi })
}

/// Solves `v_s * out_s = u_s pi_s + sum_{l into s} q_l v_{src(l)} A_l`.
pub fn solve_correlation(m: &ShsModel, ss: &SteadyState) -> Result<CorrelationVector> {
    let n = m.n_states();
    if ss.pi.len() != n {
        return Err(ShsError::MalformedModel(format!(
            "steady state has {} entries for a {n}-state model",
            ss.pi.len()
        )));
    }
    correlation_on(m, ss, &reachable_states(m))
}

fn correlation_on(m: &ShsModel, ss: &SteadyState, reachable: &[bool]) -> Result<CorrelationVector> {
    let n = m.n_states();
    let (map, live) = compact_index(reachable);
    let d = m.age_dim();
    let r = rate_scale(m);
    let idx = |s: usize, k: usize| s * d + k;

    let mut entries = Vec::with_capacity(live * d + m.transitions().len() * d);
    let exits = m.exit_rates();
    for (s, slot) in map.iter().enumerate() {
        if let Some(c) = slot {
            for k in 0..d {
                entries.push((idx(*c, k), idx(*c, k), exits[s] / r));
            }
        }
    }
    for t in m.transitions() {
        let q = t.rate / r;
        let (Some(from), Some(to)) = (map[t.from.0], map[t.to.0]) else {
            continue;
        };
        if q == 0.0 {
            continue;
        }
        for (k, src) in t.reset.sources().iter().enumerate() {
            if let Some(j) = src {
                entries.push((idx(to, k), idx(from, *j), -q));
            }
        }
    }
    let mut b = vec![0.0; live * d];
    for (s, info) in m.states().iter().enumerate() {
        if let Some(c) = map[s] {
            for k in 0..d {
                if info.growth[k] {
                    b[idx(c, k)] = ss.pi[s] / r;
                }
            }
        }
    }

    let a = SparseMatrix::from_triplets(live * d, entries);
    let lu = factor_guarded(&a, "correlation")?;
    let compact = lu.solve(&b);
    check_residual(&a, &compact, &b, "correlation")?;
    let mut v = vec![0.0; n * d];
    for (s, slot) in map.iter().enumerate() {
        if let Some(c) = slot {
            v[s * d..(s + 1) * d].copy_from_slice(&compact[c * d..(c + 1) * d]);
        }
    }
    Ok(CorrelationVector { dim: d, v })
}

/// Average age of information at the monitor.
pub fn average_aoi(m: &ShsModel) -> Result<f64> {
    let live = reachable_states(m);
    let ss = steady_state_on(m, &live)?;
    let cv = correlation_on(m, &ss, &live)?;
    let delta = cv.monitor_age();
    if delta.is_finite() && delta > 0.0 {
        Ok(delta)
    } else {
        Err(ShsError::Verification {
            system: "correlation",
            detail: format!("average age {delta} is not positive and finite"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RateSymbol, ResetMap, StateId, StateInfo, Transition};

    fn tr(from: usize, to: usize, rate: f64, reset: Vec<Option<usize>>) -> Transition {
        Transition {
            from: StateId(from),
            to: StateId(to),
            symbol: RateSymbol::LocalService,
            rate,
            reset: ResetMap::new(reset),
        }
    }

    #[test]
    fn two_state_birth_death() {
        let (a, b) = (3.0, 7.0);
        let st = |l: &str| StateInfo {
            label: l.into(),
            growth: vec![true],
        };
        let m = ShsModel::new(
            0,
            vec![st("up"), st("down")],
            vec![tr(0, 1, a, vec![Some(0)]), tr(1, 0, b, vec![Some(0)])],
        )
        .unwrap();
        let ss = solve_steady_state(&m).unwrap();
        assert!((ss.pi[0] - b / (a + b)).abs() < 1e-15);
        assert!((ss.pi[1] - a / (a + b)).abs() < 1e-15);
    }

    // One server, LCFS with preemption: an arrival resets the server age,
    // a completion hands it to the monitor. A fake update keeps the server
    // busy after each delivery.
    #[test]
    fn lcfs_preemptive_single_server() {
        let (lambda, mu) = (2.0, 1.0);
        let m = ShsModel::new(
            1,
            vec![StateInfo {
                label: "s1".into(),
                growth: vec![true, true],
            }],
            vec![
                tr(0, 0, lambda, vec![Some(0), None]),
                tr(0, 0, mu, vec![Some(1), Some(1)]),
            ],
        )
        .unwrap();
        let delta = average_aoi(&m).unwrap();
        assert!((delta - (1.0 / lambda + 1.0 / mu)).abs() < 1e-12);
    }

    #[test]
    fn two_reachable_closed_classes_are_rejected() {
        let st = |l: &str| StateInfo {
            label: l.into(),
            growth: vec![true],
        };
        let m = ShsModel::new(
            0,
            vec![st("a"), st("b"), st("c")],
            vec![
                tr(0, 1, 1.0, vec![Some(0)]),
                tr(0, 2, 1.0, vec![Some(0)]),
                tr(1, 1, 1.0, vec![Some(0)]),
                tr(2, 2, 1.0, vec![Some(0)]),
            ],
        )
        .unwrap();
        match solve_steady_state(&m) {
            Err(ShsError::IllConditioned { system, condition }) => {
                assert_eq!(system, "steady-state");
                assert!(condition > MAX_CONDITION);
            }
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn unreachable_states_carry_no_mass() {
        let st = |l: &str| StateInfo {
            label: l.into(),
            growth: vec![true, true],
        };
        let m = ShsModel::new(
            1,
            vec![st("a"), st("b")],
            vec![
                tr(0, 0, 2.0, vec![Some(0), None]),
                tr(0, 0, 1.0, vec![Some(1), Some(1)]),
                tr(1, 1, 1.0, vec![Some(0), Some(1)]),
            ],
        )
        .unwrap();
        let ss = solve_steady_state(&m).unwrap();
        assert_eq!(ss.pi, vec![1.0, 0.0]);
        let cv = solve_correlation(&m, &ss).unwrap();
        assert_eq!(cv.state(1), &[0.0, 0.0]);
        assert!((cv.monitor_age() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn age_that_never_resets_is_rejected() {
        let m = ShsModel::new(
            0,
            vec![StateInfo {
                label: "s1".into(),
                growth: vec![true],
            }],
            vec![tr(0, 0, 1.0, vec![Some(0)])],
        )
        .unwrap();
        assert!(matches!(
            average_aoi(&m),
            Err(ShsError::IllConditioned { .. })
        ));
    }
}
