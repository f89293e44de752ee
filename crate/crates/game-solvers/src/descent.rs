//! Projected coordinate descent with finite-difference gradients.

/// Clamps `x` into `[lo, hi]`.
pub fn project_box(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Derivative of `f` along coordinate `coord` at `point`.
///
/// Central difference with step `h` when both neighbours lie in `[lo, hi]`
/// and evaluate finite, otherwise a one-sided difference. Returns 0 when
/// neither side is usable.
pub fn fd_gradient(
    f: &dyn Fn(&[f64]) -> f64,
    point: &[f64],
    coord: usize,
    h: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let x = point[coord];
    let mut probe = point.to_vec();
    let mut at = |v: f64| {
        probe[coord] = v;
        f(&probe)
    };
    let up = if x + h <= hi { at(x + h) } else { f64::NAN };
    let down = if x - h >= lo { at(x - h) } else { f64::NAN };
    match (up.is_finite(), down.is_finite()) {
        (true, true) => (up - down) / (2.0 * h),
        (true, false) => (up - f(point)) / h,
        (false, true) => (f(point) - down) / h,
        (false, false) => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentParams {
    /// Initial step size of each coordinate pass.
    pub gamma: f64,
    /// Stop once a pass moves no coordinate by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Gradient steps per coordinate pass.
    pub max_inner: usize,
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub sweeps: usize,
    pub evaluations: usize,
}

/// Cycles through the coordinates in index order and runs projected gradient
/// descent on each one until its steps fall below `tol`, then repeats the
/// cycle until a whole sweep is stationary.
///
/// A step is accepted only if it strictly lowers `f`; otherwise it is halved.
/// Accepted steps double the next step.
pub fn block_descent(
    f: &dyn Fn(&[f64]) -> f64,
    init: &[f64],
    lo: &[f64],
    hi: &[f64],
    params: &DescentParams,
) -> Descent {
    let evals = std::cell::Cell::new(0usize);
    let g = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let mut x: Vec<f64> = init
        .iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| project_box(v, l, h))
        .collect();
    let mut fx = g(&x);
    if !fx.is_finite() {
        return Descent {
            x,
            value: fx,
            converged: false,
            sweeps: 0,
            evaluations: evals.get(),
        };
    }
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < params.max_sweeps {
        sweeps += 1;
        let mut sweep_move: f64 = 0.0;
        for c in 0..x.len() {
            let start = x[c];
            let mut step = params.gamma;
            for _ in 0..params.max_inner {
                let h = params.fd_step * x[c].abs().max(1.0);
                let grad = fd_gradient(&g, &x, c, h, lo[c], hi[c]);
                if !grad.is_finite() || grad == 0.0 {
                    break;
                }
                let old = x[c];
                let mut accepted = false;
                while step * grad.abs() > 1e-3 * params.tol {
                    let cand = project_box(old - step * grad, lo[c], hi[c]);
                    if cand == old {
                        break;
                    }
                    x[c] = cand;
                    let fc = g(&x);
                    if fc < fx {
                        fx = fc;
                        accepted = true;
                        break;
                    }
                    x[c] = old;
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
                step *= 2.0;
                if (x[c] - old).abs() <= params.tol {
                    break;
                }
            }
            sweep_move = sweep_move.max((x[c] - start).abs());
        }
        if sweep_move <= params.tol {
            converged = true;
            break;
        }
    }
    Descent {
        x,
        value: fx,
        converged,
        sweeps,
        evaluations: evals.get(),
    }
}

/// Exhaustive search on a grid of spacing `resolution`, then a second grid of
/// spacing `resolution / refine` over one coarse cell around the best point.
/// Oracle for [`block_descent`].
pub fn grid_minimize(
    f: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
    refine: usize,
) -> (Vec<f64>, f64) {
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(&l, &h)| axis(l, h, resolution))
        .collect();
    let (mut best, mut best_f) = scan(f, &axes);
    if refine > 1 {
        let fine = resolution / refine as f64;
        let axes: Vec<Vec<f64>> = best
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&b, (&l, &h))| axis((b - resolution).max(l), (b + resolution).min(h), fine))
            .collect();
        let (x, fx) = scan(f, &axes);
        if fx < best_f {
            best = x;
            best_f = fx;
        }
    }
    (best, best_f)
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect();
    if hi - v[n] > 1e-12 * step {
        v.push(hi);
    }
    v
}

fn scan(f: &dyn Fn(&[f64]) -> f64, axes: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let mut idx = vec![0usize; axes.len()];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let mut best = point.clone();
    let mut best_f = f64::INFINITY;
    loop {
        let v = f(&point);
        if v < best_f {
            best_f = v;
            best.copy_from_slice(&point);
        }
        let mut d = axes.len();
        loop {
            if d == 0 {
                return (best, best_f);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                point[d] = axes[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = axes[d][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> DescentParams {
        DescentParams {
            gamma: 1e-2,
            tol: 1e-6,
            max_sweeps: 200,
            max_inner: 500,
            fd_step: 1e-6,
        }
    }

    #[test]
    fn projection() {
        assert_eq!(project_box(1.2, 0.0, 1.0), 1.0);
        assert_eq!(project_box(-0.1, 0.0, 1.0), 0.0);
        assert_eq!(project_box(0.4, 0.0, 1.0), 0.4);
    }

    #[test]
    fn central_difference_of_a_square() {
        let f = |x: &[f64]| x[0] * x[0];
        let g = fd_gradient(&f, &[3.0], 0, 1e-5, f64::NEG_INFINITY, f64::INFINITY);
        assert!((g - 6.0).abs() < 1e-6);
    }

    #[test]
    fn one_sided_at_the_boundary() {
        let f = |x: &[f64]| x[0] * x[0] + x[0];
        let g = fd_gradient(&f, &[0.0], 0, 1e-7, 0.0, 1.0);
        assert!((g - 1.0).abs() < 1e-6);
        let inf_below = |x: &[f64]| {
            if x[0] < 0.5 {
                f64::INFINITY
            } else {
                x[0] * x[0]
            }
        };
        let g = fd_gradient(&inf_below, &[0.5], 0, 1e-7, 0.0, 1.0);
        assert!((g - 1.0).abs() < 1e-6);
    }

    #[test]
    fn convex_quadratic_reaches_the_projected_minimizer() {
        let f = |x: &[f64]| {
            (x[0] - 0.3).powi(2) + 2.0 * (x[1] - 3.0).powi(2) + 0.5 * (x[0] - 0.3) * (x[1] - 3.0)
        };
        let d = block_descent(&f, &[0.9, 0.1], &[0.0, 0.0], &[1.0, 2.0], &params());
        assert!(d.converged);
        // x1 pinned at 2, then x0 minimizes (x0-0.3)^2 - 0.5 (x0-0.3)
        assert_eq!(d.x[1], 2.0);
        assert!((d.x[0] - 0.55).abs() < 1e-5, "{:?}", d.x);
    }

    #[test]
    fn infeasible_start_is_reported() {
        let f = |_: &[f64]| f64::INFINITY;
        let d = block_descent(&f, &[0.5], &[0.0], &[1.0], &params());
        assert!(!d.converged);
        assert_eq!(d.evaluations, 1);
    }

    #[test]
    fn grid_search_finds_an_off_grid_minimum() {
        let f = |x: &[f64]| (x[0] - 0.123).powi(2) + (x[1] - 0.777).powi(2);
        let (x, _) = grid_minimize(&f, &[0.0, 0.0], &[1.0, 1.0], 0.01, 10);
        assert!(
            (x[0] - 0.123).abs() < 1e-9 && (x[1] - 0.777).abs() < 1e-9,
            "{x:?}"
        );
    }

    #[test]
    fn axis_includes_both_ends() {
        let a = axis(0.0, 0.8, 0.01);
        assert_eq!(a.len(), 81);
        assert_eq!(*a.last().unwrap(), 0.8);
        let b = axis(0.0, 0.25, 0.1);
        assert_eq!(b.len(), 4);
        assert_eq!(*b.last().unwrap(), 0.25);
    }
}
