//! Built-in experiment configurations.

use crate::config::ExperimentConfig;
use crate::error::{invalid, Result};

pub struct Preset {
    pub name: &'static str,
    /// What the preset computes.
    pub target: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig7",
        target: "local-service probability against a fixed ES load",
        toml: include_str!("../configs/fig7.toml"),
    },
    Preset {
        name: "fig8",
        target: "equilibrium over arrival rate and ES service rate",
        toml: include_str!("../configs/fig8.toml"),
    },
    Preset {
        name: "fig9",
        target: "power/age trade-off against the AoI weight",
        toml: include_str!("../configs/fig9.toml"),
    },
    Preset {
        name: "lambda-v",
        target: "equilibrium over arrival rate and AoI weight",
        toml: include_str!("../configs/lambda-v.toml"),
    },
    Preset {
        name: "ne-vs-mfe",
        target: "finite-game Nash equilibrium against the mean-field policy",
        toml: include_str!("../configs/ne-vs-mfe.toml"),
    },
    Preset {
        name: "fig10",
        target: "major-minor equilibrium against the unit price",
        toml: include_str!("../configs/fig10.toml"),
    },
    Preset {
        name: "fig11",
        target: "major-minor equilibrium over both arrival rates",
        toml: include_str!("../configs/fig11.toml"),
    },
    Preset {
        name: "utilization",
        target: "shared transmitter utilization with and without secondaries",
        toml: include_str!("../configs/utilization.toml"),
    },
];

pub const VALIDATE: Preset = Preset {
    name: "validate",
    target: "analytic age against the faithful simulator",
    toml: include_str!("../configs/validate.toml"),
};

pub fn all() -> impl Iterator<Item = &'static Preset> {
    PRESETS.iter().chain(std::iter::once(&VALIDATE))
}

pub fn find(name: &str) -> Option<&'static Preset> {
    all().find(|p| p.name == name)
}

pub fn load(name: &str) -> Result<ExperimentConfig> {
    let p = find(name).ok_or_else(|| {
        let names: Vec<&str> = all().map(|p| p.name).collect();
        invalid(format!(
            "unknown preset `{name}`; known: {}",
            names.join(", ")
        ))
    })?;
    ExperimentConfig::parse(p.toml)
}
