//! TOML experiment configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use game_solvers::{Bounds, DevicePolicy, SolverConfig, TypeProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Aoi,
    Simulate,
    Mfe,
    Nash,
    MmMfe,
    Sweep,
    Validate,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Aoi,
        Kind::Simulate,
        Kind::Mfe,
        Kind::Nash,
        Kind::MmMfe,
        Kind::Sweep,
        Kind::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Aoi => "aoi",
            Kind::Simulate => "simulate",
            Kind::Mfe => "mfe",
            Kind::Nash => "nash",
            Kind::MmMfe => "mm-mfe",
            Kind::Sweep => "sweep",
            Kind::Validate => "validate",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Equitable,
    Primary,
    Secondary,
}

/// Rates of a single tagged device, for `aoi` and `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub topology: ModelKind,
    pub lambda: f64,
    pub p: f64,
    /// Own transmitter, or the shared `T_P` for a secondary device.
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    #[serde(default)]
    pub lambda_e: f64,
    /// Secondary load on `T_P`; the primary age does not depend on it.
    #[serde(default)]
    pub lambda_s: f64,
    #[serde(default)]
    pub lambda_p_bar: f64,
    /// Simulated time.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

fn default_horizon() -> f64 {
    1e5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    pub mu3: f64,
    #[serde(default)]
    pub alpha: f64,
    /// Evaluate best responses at this load instead of solving for a fixed point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeConfig {
    pub id: String,
    pub lambda: f64,
    pub v: f64,
    pub eta: f64,
    pub p_max: f64,
    pub f_max: f64,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

impl TypeConfig {
    pub fn profile(&self) -> TypeProfile {
        TypeProfile::new(
            self.id.clone(),
            self.lambda,
            self.v,
            self.eta,
            Bounds::new(self.p_max, self.f_max),
        )
        .with_weight(self.weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub p: f64,
    #[serde(default)]
    pub mu1: f64,
    pub mu2: f64,
}

impl PolicyConfig {
    pub fn policy(&self) -> DevicePolicy {
        DevicePolicy::new(self.p, self.mu1, self.mu2)
    }
}

/// A single run from a fixed starting point instead of multi-start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    #[serde(default)]
    pub rho: f64,
    /// Equitable devices, or the primary device.
    pub policy: Option<PolicyConfig>,
    pub secondary: Option<PolicyConfig>,
}

/// Overrides of [`SolverConfig`]; missing fields keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub eps3: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma3: Option<f64>,
    pub fd_step: Option<f64>,
    pub max_outer: Option<usize>,
    pub max_inner: Option<usize>,
    pub multi_start: Option<usize>,
}

impl SolverSection {
    pub fn resolve(&self, seed: u64) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            eps1: self.eps1.unwrap_or(d.eps1),
            eps2: self.eps2.unwrap_or(d.eps2),
            eps3: self.eps3.unwrap_or(d.eps3),
            gamma1: self.gamma1.unwrap_or(d.gamma1),
            gamma2: self.gamma2.unwrap_or(d.gamma2),
            gamma3: self.gamma3.unwrap_or(d.gamma3),
            fd_step: self.fd_step.unwrap_or(d.fd_step),
            max_outer: self.max_outer.unwrap_or(d.max_outer),
            max_inner: self.max_inner.unwrap_or(d.max_inner),
            multi_start: self.multi_start.unwrap_or(d.multi_start),
            seed,
        }
    }
}

/// Upper limit on the points of one axis and of a whole sweep.
pub const MAX_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: String,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub values: Option<Vec<f64>>,
}

impl Axis {
    /// Points of the axis; `start..=stop` by `step`, or the explicit list.
    pub fn points(&self) -> Result<Vec<f64>> {
        let name = &self.param;
        match (&self.values, self.start, self.stop, self.step) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    return Err(invalid(format!(
                        "sweep axis `{name}` has an empty value list"
                    )));
                }
                if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                    return Err(invalid(format!(
                        "sweep axis `{name}` has a non-finite value {x}"
                    )));
                }
                Ok(v.clone())
            }
            (None, Some(a), Some(b), Some(h)) => {
                if !(a.is_finite() && b.is_finite() && h.is_finite() && h > 0.0) {
                    return Err(invalid(format!(
                        "sweep axis `{name}` needs finite bounds and a step > 0"
                    )));
                }
                if b < a {
                    return Err(invalid(format!(
                        "sweep axis `{name}` is empty: stop {b} < start {a}"
                    )));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                if n > MAX_POINTS {
                    return Err(invalid(format!(
                        "sweep axis `{name}` has more than {MAX_POINTS} points"
                    )));
                }
                Ok((0..=n).map(|i| a + i as f64 * h).collect())
            }
            _ => Err(invalid(format!(
                "sweep axis `{name}` needs either `values` or all of `start`, `stop`, `step`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Experiment run at every point when `kind = "sweep"`.
    pub experiment: Option<Kind>,
    #[serde(default, rename = "axis")]
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrioritySection {
    /// Also solve the primary device alone and report transmitter utilization.
    #[serde(default)]
    pub solo_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    /// Minimum deliveries at the tagged monitor per point.
    #[serde(default = "default_deliveries")]
    pub min_deliveries: u64,
}

fn default_deliveries() -> u64 {
    1_000_000
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            min_deliveries: default_deliveries(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for sweeps; does not change results.
    #[serde(default, skip_serializing)]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
    pub model: Option<ModelConfig>,
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub types: Vec<TypeConfig>,
    pub primary: Option<TypeConfig>,
    pub init: Option<InitConfig>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub priority: PrioritySection,
    #[serde(default)]
    pub validate: ValidateSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Experiment run at each point: `sweep.experiment` for sweeps, `kind` otherwise.
    pub fn experiment(&self) -> Result<Kind> {
        match self.kind {
            Some(Kind::Sweep) => match self.sweep.experiment {
                Some(Kind::Sweep) => Err(invalid("`sweep.experiment` cannot itself be `sweep`")),
                Some(k) => Ok(k),
                None => Err(invalid("`kind = \"sweep\"` requires `sweep.experiment`")),
            },
            Some(k) => Ok(k),
            None => Err(invalid("missing `kind`")),
        }
    }

    /// SHA-256 of the canonical serialization with solver defaults filled in;
    /// formatting, comments, `description`, `out` and `jobs` do not enter it.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        let s = self.solver_config();
        c.solver = SolverSection {
            eps1: Some(s.eps1),
            eps2: Some(s.eps2),
            eps3: Some(s.eps3),
            gamma1: Some(s.gamma1),
            gamma2: Some(s.gamma2),
            gamma3: Some(s.gamma3),
            fd_step: Some(s.fd_step),
            max_outer: Some(s.max_outer),
            max_inner: Some(s.max_inner),
            multi_start: Some(s.multi_start),
        };
        let canonical = toml::to_string(&c).expect("configuration serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver.resolve(self.seed)
    }

    pub fn system(&self) -> Result<&SystemConfig> {
        self.system
            .as_ref()
            .ok_or_else(|| invalid("missing [system]"))
    }

    pub fn model(&self) -> Result<&ModelConfig> {
        self.model
            .as_ref()
            .ok_or_else(|| invalid("missing [model]"))
    }

    pub fn primary(&self) -> Result<&TypeConfig> {
        self.primary
            .as_ref()
            .ok_or_else(|| invalid("missing [primary]"))
    }

    pub fn profiles(&self) -> Result<Vec<TypeProfile>> {
        if self.types.is_empty() {
            return Err(invalid("at least one [[types]] entry is required"));
        }
        let mut ids: Vec<&str> = self.types.iter().map(|t| t.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("type ids must be unique"));
        }
        Ok(self.types.iter().map(TypeConfig::profile).collect())
    }

    /// Static checks that do not need a solver run.
    pub fn validate(&self) -> Result<()> {
        let kind = self.experiment()?;
        if self.kind == Some(Kind::Sweep) && self.sweep.axes.is_empty() {
            return Err(invalid("a sweep needs at least one [[sweep.axis]]"));
        }
        self.solver_config().validate()?;
        for a in &self.sweep.axes {
            a.points()?;
            let mut probe = self.clone();
            crate::sweep::set_param(&mut probe, &a.param, 1.0)?;
        }
        let mut names: Vec<&str> = self.sweep.axes.iter().map(|a| a.param.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("each sweep parameter may appear on one axis only"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("`jobs` must be >= 1"));
        }
        match kind {
            Kind::Aoi | Kind::Simulate => {
                self.model()?;
            }
            Kind::Mfe | Kind::Nash => {
                self.system()?;
                self.profiles()?;
            }
            Kind::MmMfe => {
                self.system()?;
                self.primary()?;
                self.profiles()?;
            }
            Kind::Validate => {
                if self.validate.min_deliveries == 0 {
                    return Err(invalid("`validate.min_deliveries` must be >= 1"));
                }
            }
            Kind::Sweep => unreachable!("resolved by experiment()"),
        }
        Ok(())
    }
}
