//! Sweep expansion and the worker pool.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, MAX_POINTS};
use crate::error::{invalid, Result};

/// Parameters a sweep axis may name.
pub const PARAMS: &[&str] = &[
    "n",
    "mu3",
    "alpha",
    "rho",
    "types.lambda",
    "types.v",
    "types.eta",
    "types.p_max",
    "types.f_max",
    "primary.lambda",
    "primary.v",
    "primary.eta",
    "primary.p_max",
    "primary.f_max",
    "model.lambda",
    "model.p",
    "model.mu1",
    "model.mu2",
    "model.mu3",
    "model.lambda_e",
    "model.lambda_s",
    "model.lambda_p_bar",
    "model.horizon",
];

/// Writes `value` into the parameter `name`. `types.*` sets every type;
/// `rho` sets `system.fixed_rho`.
pub fn set_param(cfg: &mut ExperimentConfig, name: &str, value: f64) -> Result<()> {
    let missing = |section: &str| {
        invalid(format!(
            "sweep parameter `{name}` needs a {section} section"
        ))
    };
    match name.split_once('.') {
        None => {
            let sys = cfg.system.as_mut().ok_or_else(|| missing("[system]"))?;
            match name {
                "n" => {
                    if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                        return Err(invalid(format!(
                            "`n` must be a positive integer, got {value}"
                        )));
                    }
                    sys.n = value as usize;
                }
                "mu3" => sys.mu3 = value,
                "alpha" => sys.alpha = value,
                "rho" => sys.fixed_rho = Some(value),
                _ => return Err(unknown(name)),
            }
        }
        Some(("types", field)) => {
            if cfg.types.is_empty() {
                return Err(missing("[[types]]"));
            }
            for t in &mut cfg.types {
                *type_field(t, field).ok_or_else(|| unknown(name))? = value;
            }
        }
        Some(("primary", field)) => {
            let t = cfg.primary.as_mut().ok_or_else(|| missing("[primary]"))?;
            *type_field(t, field).ok_or_else(|| unknown(name))? = value;
        }
        Some(("model", field)) => {
            let m = cfg.model.as_mut().ok_or_else(|| missing("[model]"))?;
            let slot = match field {
                "lambda" => &mut m.lambda,
                "p" => &mut m.p,
                "mu1" => &mut m.mu1,
                "mu2" => &mut m.mu2,
                "mu3" => &mut m.mu3,
                "lambda_e" => &mut m.lambda_e,
                "lambda_s" => &mut m.lambda_s,
                "lambda_p_bar" => &mut m.lambda_p_bar,
                "horizon" => &mut m.horizon,
                _ => return Err(unknown(name)),
            };
            *slot = value;
        }
        _ => return Err(unknown(name)),
    }
    Ok(())
}

fn type_field<'a>(t: &'a mut crate::config::TypeConfig, field: &str) -> Option<&'a mut f64> {
    Some(match field {
        "lambda" => &mut t.lambda,
        "v" => &mut t.v,
        "eta" => &mut t.eta,
        "p_max" => &mut t.p_max,
        "f_max" => &mut t.f_max,
        _ => return None,
    })
}

fn unknown(name: &str) -> crate::error::CliError {
    invalid(format!(
        "unknown sweep parameter `{name}`; known: {}",
        PARAMS.join(", ")
    ))
}

/// One point of the Cartesian product, first axis slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub index: usize,
    pub coords: Vec<(String, f64)>,
    pub config: ExperimentConfig,
}

pub fn expand(cfg: &ExperimentConfig) -> Result<Vec<Point>> {
    let axes: Vec<(String, Vec<f64>)> = cfg
        .sweep
        .axes
        .iter()
        .map(|a| Ok((a.param.clone(), a.points()?)))
        .collect::<Result<_>>()?;
    let total = axes
        .iter()
        .try_fold(1usize, |acc, (_, v)| {
            acc.checked_mul(v.len()).filter(|&t| t <= MAX_POINTS)
        })
        .ok_or_else(|| invalid(format!("sweep has more than {MAX_POINTS} points")))?;
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut coords = vec![(String::new(), 0.0); axes.len()];
        for (k, (name, vals)) in axes.iter().enumerate().rev() {
            coords[k] = (name.clone(), vals[rem % vals.len()]);
            rem /= vals.len();
        }
        let mut config = cfg.clone();
        for (name, v) in &coords {
            set_param(&mut config, name, *v)?;
        }
        if !axes.is_empty() {
            config.seed = point_seed(cfg.seed, index);
        }
        points.push(Point {
            index,
            coords,
            config,
        });
    }
    Ok(points)
}

/// Seed of sweep point `index`, independent of the schedule.
pub fn point_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Runs `f` on every item with up to `jobs` threads; results keep input order.
pub fn run_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every item ran"))
        .collect()
}
