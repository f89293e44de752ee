use game_solvers::*;

fn device(lambda: f64) -> TypeProfile {
    TypeProfile::new("d", lambda, 10.0, 0.5, Bounds::new(1.0, 0.8))
}

fn equitable_objective(t: &TypeProfile, lambda_e: f64) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| {
        cost_equitable(&DevicePolicy::new(x[0], x[1], x[2]), t, lambda_e, 15.0)
            .map(|c| c.total())
            .unwrap_or(f64::INFINITY)
    }
}

#[test]
fn block_descent_reaches_the_grid_minimum() {
    let t = device(1.0);
    for lambda_e in [0.0, 20.0, 120.0] {
        let f = equitable_objective(&t, lambda_e);
        let lo = t.bounds.full_lo();
        let hi = t.bounds.full_hi();
        let (_, grid) = grid_minimize(&f, &lo, &hi, 0.05, 10);
        let mut best = f64::INFINITY;
        for init in [[0.5, 0.5, 0.4], [0.1, 0.9, 0.1], [0.9, 0.2, 0.7]] {
            let d = block_descent(&f, &init, &lo, &hi, &SolverConfig::default().minor());
            assert!(d.converged);
            best = best.min(d.value);
        }
        assert!(
            best <= grid * (1.0 + 1e-3),
            "lambda_e {lambda_e}: descent {best} vs grid {grid}"
        );
    }
}

#[test]
fn single_device_nash_is_the_isolated_optimum() {
    let t = device(1.0);
    let cfg = SolverConfig::default();
    let ne = nash_solve(
        std::slice::from_ref(&t),
        15.0,
        &DevicePolicy::new(0.5, 0.5, 0.4),
        &cfg,
    )
    .unwrap();
    assert!(ne.converged);
    let f = equitable_objective(&t, 0.0);
    let (_, grid) = grid_minimize(&f, &t.bounds.full_lo(), &t.bounds.full_hi(), 0.05, 10);
    let got = ne.costs[0].total();
    assert!((got - grid).abs() <= 1e-3 * grid, "{got} vs {grid}");
}

#[test]
fn identical_devices_reach_a_symmetric_equilibrium() {
    let devs = vec![device(1.0), device(1.0)];
    let ne = nash_solve(
        &devs,
        15.0,
        &DevicePolicy::new(0.3, 0.6, 0.5),
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(ne.converged);
    let (a, b) = (ne.policies[0], ne.policies[1]);
    for (x, y) in [(a.p, b.p), (a.mu1, b.mu1), (a.mu2, b.mu2)] {
        assert!((x - y).abs() < 1e-3, "{a:?} vs {b:?}");
    }
    assert!((ne.costs[0].total() - ne.costs[1].total()).abs() < 1e-4);
}

#[test]
fn best_response_is_stationary_on_the_box() {
    let t = device(1.0);
    let cfg = SolverConfig::default();
    for rho in [0.0, 0.2, 0.6] {
        let d = best_response(&t, rho, 30, 15.0, &DevicePolicy::new(0.5, 0.5, 0.4), &cfg);
        assert!(d.converged);
        let lambda_e = mf_exogenous_rate(rho, 30, 15.0);
        let f = equitable_objective(&t, lambda_e);
        let (lo, hi) = (t.bounds.full_lo(), t.bounds.full_hi());
        for c in 0..3 {
            let g = fd_gradient(&f, &d.x, c, 1e-5, lo[c], hi[c]);
            let at_lo = d.x[c] <= lo[c] + 1e-9;
            let at_hi = d.x[c] >= hi[c] - 1e-9;
            let ok = (at_lo && g >= -1e-3) || (at_hi && g <= 1e-3) || g.abs() < 1e-2;
            assert!(ok, "rho {rho} coord {c}: x {:?} grad {g}", d.x);
        }
    }
}

#[test]
fn converged_mean_field_is_consistent() {
    let types = vec![device(1.0).with_weight(0.5), device(3.0).with_weight(0.5)];
    let cfg = SolverConfig {
        multi_start: 2,
        ..SolverConfig::default()
    };
    let r = mfe_solve(&types, 30, 15.0, &cfg).unwrap();
    assert!(r.converged);
    assert!(r.residual <= cfg.eps1);
    let policies: Vec<DevicePolicy> = r.types.iter().map(|t| t.policy).collect();
    let again: Vec<DevicePolicy> = types
        .iter()
        .zip(&policies)
        .map(|(t, x)| {
            let d = best_response(t, r.rho(), 30, 15.0, x, &cfg);
            DevicePolicy::new(d.x[0], d.x[1], d.x[2])
        })
        .collect();
    let psi = consistency_equitable(&types, &again, 15.0);
    assert!(
        (psi - r.rho()).abs() <= 10.0 * cfg.eps1,
        "{psi} vs {}",
        r.rho()
    );
}

#[test]
fn silent_secondaries_leave_the_primary_alone() {
    let primary = TypeProfile::new("P", 2.0, 10.0, 0.5, Bounds::new(2.0, 0.5));
    let silent = vec![TypeProfile::new("s", 0.0, 10.0, 0.5, Bounds::new(2.0, 0.7))];
    let market = Market {
        n: 30,
        mu3: 15.0,
        alpha: 1.0,
    };
    let cfg = SolverConfig {
        multi_start: 2,
        ..SolverConfig::default()
    };
    let r = mm_mfe_solve(&primary, &silent, &market, &cfg).unwrap();
    assert!(r.converged);
    assert!(r.rho() <= cfg.eps1, "{}", r.rho());
    let pr = r.primary.unwrap();
    assert_eq!(pr.t2, 0.0);
    let solo = primary_response(&primary, &market, 0.0, &pr.policy, &cfg);
    assert!((solo.value - pr.cost.total()).abs() < 1e-6 * solo.value);
}

#[test]
fn invalid_configuration_is_rejected() {
    let bad = SolverConfig {
        gamma1: 1.5,
        ..SolverConfig::default()
    };
    assert!(mfe_solve(&[device(1.0)], 30, 15.0, &bad).is_err());
    assert!(mfe_solve(&[device(1.0)], 0, 15.0, &SolverConfig::default()).is_err());
}

#[test]
fn solo_primary_uses_its_full_transmit_budget() {
    // at p = 0 the cost 2 mu1 / (2 + mu1) + 10 (1/2 + 1/mu1 + 1/15) falls in mu1
    let primary = TypeProfile::new("P", 2.0, 10.0, 0.5, Bounds::new(2.0, 0.5));
    let cfg = SolverConfig::default();
    let d = solo_primary(
        &primary,
        15.0,
        Some(&DevicePolicy::new(0.5, 0.6, 0.3)),
        &cfg,
    );
    let f = |x: &[f64]| {
        cost_primary(
            &DevicePolicy::new(x[0], x[1], x[2]),
            &primary,
            15.0,
            0.0,
            0.0,
        )
        .map(|c| c.breakdown.total())
        .unwrap_or(f64::INFINITY)
    };
    let (_, grid) = grid_minimize(
        &f,
        &primary.bounds.full_lo(),
        &primary.bounds.full_hi(),
        0.05,
        10,
    );
    assert!(d.value <= grid * (1.0 + 1e-3), "{} vs {grid}", d.value);
    assert!((d.x[1] - 2.0).abs() < 1e-6 && d.x[0] < 1e-6, "{:?}", d.x);
}

#[test]
fn multi_start_best_response_is_no_worse_than_one_start() {
    let t = device(1.0);
    let cfg = SolverConfig::default();
    let init = DevicePolicy::new(0.9, 0.1, 0.1);
    let one = best_response(&t, 0.4, 30, 15.0, &init, &cfg);
    let many = best_response_multi(&t, 0.4, 30, 15.0, Some(&init), &cfg);
    assert!(many.value <= one.value);
}
