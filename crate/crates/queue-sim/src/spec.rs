use crate::error::{nonnegative, positive, probability, Result};

/// Device with its own transmitter and local processor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquitableDevice {
    pub lambda: f64,
    pub p: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Primary device: owns the shared transmitter T_P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryDevice {
    pub lambda: f64,
    pub p: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Secondary device: local processor only, offloads through T_P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryDevice {
    pub lambda: f64,
    pub p: f64,
    pub mu2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    /// All devices simulated; interference at the ES is real cross traffic.
    EquitableFull {
        devices: Vec<EquitableDevice>,
        mu3: f64,
    },
    /// One tagged device; other users replaced by a Poisson stream into the ES.
    EquitableFaithful {
        device: EquitableDevice,
        mu3: f64,
        lambda_e: f64,
    },
    /// Primary plus secondaries sharing T_P and the ES.
    PriorityFull {
        primary: PrimaryDevice,
        secondaries: Vec<SecondaryDevice>,
        mu3: f64,
    },
    /// Tagged primary; secondary offloads replaced by a Poisson stream into T_P.
    PriorityFaithfulPrimary {
        primary: PrimaryDevice,
        mu3: f64,
        lambda_s: f64,
    },
    /// Tagged secondary; other secondaries and the primary offload stream
    /// replaced by Poisson streams into T_P.
    PriorityFaithfulSecondary {
        device: SecondaryDevice,
        mu1: f64,
        mu3: f64,
        lambda_e: f64,
        lambda_p_bar: f64,
    },
}

impl Topology {
    pub fn tag(&self) -> &'static str {
        match self {
            Topology::EquitableFull { .. } => "equitable-full",
            Topology::EquitableFaithful { .. } => "equitable-faithful",
            Topology::PriorityFull { .. } => "priority-full",
            Topology::PriorityFaithfulPrimary { .. }
            | Topology::PriorityFaithfulSecondary { .. } => "priority-faithful",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eq = |i: usize, d: &EquitableDevice| -> Result<()> {
            nonnegative(format!("devices[{i}].lambda"), d.lambda)?;
            probability(format!("devices[{i}].p"), d.p)?;
            nonnegative(format!("devices[{i}].mu1"), d.mu1)?;
            nonnegative(format!("devices[{i}].mu2"), d.mu2)
        };
        let prim = |d: &PrimaryDevice| -> Result<()> {
            nonnegative("primary.lambda", d.lambda)?;
            probability("primary.p", d.p)?;
            nonnegative("primary.mu1", d.mu1)?;
            nonnegative("primary.mu2", d.mu2)
        };
        let sec = |i: usize, d: &SecondaryDevice| -> Result<()> {
            nonnegative(format!("secondaries[{i}].lambda"), d.lambda)?;
            probability(format!("secondaries[{i}].p"), d.p)?;
            nonnegative(format!("secondaries[{i}].mu2"), d.mu2)
        };
        match self {
            Topology::EquitableFull { devices, mu3 } => {
                devices.iter().enumerate().try_for_each(|(i, d)| eq(i, d))?;
                positive("mu3", *mu3)
            }
            Topology::EquitableFaithful {
                device,
                mu3,
                lambda_e,
            } => {
                eq(0, device)?;
                positive("mu3", *mu3)?;
                nonnegative("lambda_e", *lambda_e)
            }
            Topology::PriorityFull {
                primary,
                secondaries,
                mu3,
            } => {
                prim(primary)?;
                secondaries
                    .iter()
                    .enumerate()
                    .try_for_each(|(i, d)| sec(i, d))?;
                positive("mu3", *mu3)
            }
            Topology::PriorityFaithfulPrimary {
                primary,
                mu3,
                lambda_s,
            } => {
                prim(primary)?;
                positive("mu3", *mu3)?;
                nonnegative("lambda_s", *lambda_s)
            }
            Topology::PriorityFaithfulSecondary {
                device,
                mu1,
                mu3,
                lambda_e,
                lambda_p_bar,
            } => {
                sec(0, device)?;
                nonnegative("mu1", *mu1)?;
                positive("mu3", *mu3)?;
                nonnegative("lambda_e", *lambda_e)?;
                nonnegative("lambda_p_bar", *lambda_p_bar)
            }
        }
    }
}

/// Fraction of the horizon discarded before estimation.
pub const WARMUP_FRACTION: f64 = 0.05;
/// Number of batches used for the batch-means confidence intervals.
pub const BATCHES: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub topology: Topology,
    pub horizon: f64,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn new(topology: Topology, horizon: f64, seed: u64) -> Self {
        Self {
            topology,
            horizon,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("horizon", self.horizon)?;
        self.topology.validate()
    }
}
