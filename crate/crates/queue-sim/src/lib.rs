//! Discrete-event simulation of LCFS-P and LCFS-PP edge-offloading networks.
//!
//! Every arrival stream and every server draws from its own ChaCha stream
//! keyed by device index, so results depend only on the network and the seed.

mod check;
mod engine;
mod error;
mod spec;
mod stats;

pub use check::{busy_fraction_check, busy_fractions_against, BusyCheck, Occupancy};
pub use engine::{sample_path, simulate, AgeJump, MonitorEstimate, ServerEstimate, SimEstimate};
pub use error::{Result, SimError};
pub use spec::{
    EquitableDevice, NetworkSpec, PrimaryDevice, SecondaryDevice, Topology, BATCHES,
    WARMUP_FRACTION,
};
pub use stats::{Interval, T_975_49};
