//! Equitable-access device: transmitter T, local processor L, shared ES.
//!
//! Age slots: 0 monitor, 1 transmitter, 2 local processor, 3 edge server.

use crate::error::{check_nonnegative, check_positive, check_probability, Result};
use crate::model::{RateSymbol::*, ShsModel, TableBuilder};

pub(crate) const X0: Option<usize> = Some(0);
pub(crate) const X1: Option<usize> = Some(1);
pub(crate) const X2: Option<usize> = Some(2);
pub(crate) const X3: Option<usize> = Some(3);
pub(crate) const Z: Option<usize> = None;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquitableRates {
    pub lambda: f64,
    pub p: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub lambda_e: f64,
}

impl EquitableRates {
    pub fn validate(&self) -> Result<()> {
        check_positive("lambda", self.lambda)?;
        check_probability("p", self.p)?;
        check_positive("mu1", self.mu1)?;
        check_positive("mu2", self.mu2)?;
        check_positive("mu3", self.mu3)?;
        check_nonnegative("lambda_e", self.lambda_e)
    }
}

/// Builds the 8-state equitable-access model.
pub fn build_equitable_model(r: &EquitableRates) -> Result<ShsModel> {
    r.validate()?;
    let lp = r.lambda * r.p;
    let lq = r.lambda * (1.0 - r.p);
    let (le, m1, m2, m3) = (r.lambda_e, r.mu1, r.mu2, r.mu3);

    let mut b = TableBuilder::new(3);
    b.state("s1: T freshest, L 2nd-freshest, ES oldest", &[1, 1, 1, 1]);
    b.state("s2: T freshest, L oldest, ES 2nd-freshest", &[1, 1, 1, 1]);
    b.state("s3: T 2nd-freshest, L freshest, ES oldest", &[1, 1, 1, 1]);
    b.state("s4: T idle, L freshest, ES 2nd-freshest", &[1, 0, 1, 1]);
    b.state("s5: T idle, L 2nd-freshest, ES freshest", &[1, 0, 1, 1]);
    b.state("s6: T idle, L freshest, ES class 2", &[1, 0, 1, 1]);
    b.state("s7: T freshest, L 2nd-freshest, ES class 2", &[1, 1, 1, 1]);
    b.state("s8: T 2nd-freshest, L freshest, ES class 2", &[1, 1, 1, 1]);

    b.row(1, LocalArrival, lp, 3, [X0, X1, Z, X3]);
    b.row(1, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(1, Exogenous, le, 7, [X0, X1, X2, X0]);
    b.row(1, Transmit, m1, 5, [X0, Z, X2, X1]);
    b.row(1, LocalService, m2, 1, [X2, X1, X2, X2]);
    b.row(1, EdgeService, m3, 1, [X3, X1, X2, X3]);

    b.row(2, LocalArrival, lp, 3, [X0, X1, Z, X3]);
    b.row(2, OffloadArrival, lq, 2, [X0, Z, X2, X3]);
    b.row(2, Exogenous, le, 7, [X0, X1, X2, X0]);
    b.row(2, Transmit, m1, 5, [X0, Z, X2, X1]);
    b.row(2, LocalService, m2, 2, [X2, X1, X2, X3]);
    b.row(2, EdgeService, m3, 2, [X3, X1, X3, X3]);

    b.row(3, LocalArrival, lp, 3, [X0, X1, Z, X3]);
    b.row(3, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(3, Exogenous, le, 8, [X0, X1, X2, X0]);
    b.row(3, Transmit, m1, 4, [X0, Z, X2, X1]);
    b.row(3, LocalService, m2, 3, [X2, X2, X2, X2]);
    b.row(3, EdgeService, m3, 3, [X3, X1, X2, X3]);

    b.row(4, LocalArrival, lp, 4, [X0, Z, Z, X3]);
    b.row(4, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(4, Exogenous, le, 6, [X0, Z, X2, X0]);
    b.row(4, LocalService, m2, 4, [X2, Z, X2, X2]);
    b.row(4, EdgeService, m3, 4, [X3, Z, X2, X3]);

    b.row(5, LocalArrival, lp, 4, [X0, Z, Z, X3]);
    b.row(5, OffloadArrival, lq, 2, [X0, Z, X2, X3]);
    b.row(5, Exogenous, le, 6, [X0, Z, X2, X0]);
    b.row(5, LocalService, m2, 5, [X2, Z, X2, X3]);
    b.row(5, EdgeService, m3, 5, [X3, Z, X3, X3]);

    b.row(6, LocalArrival, lp, 6, [X0, Z, Z, X3]);
    b.row(6, OffloadArrival, lq, 7, [X0, Z, X2, X3]);
    b.row(6, Exogenous, le, 6, [X0, Z, X2, X0]);
    b.row(6, LocalService, m2, 6, [X2, Z, X2, X2]);
    b.row(6, EdgeService, m3, 6, [X3, Z, X2, X3]);

    b.row(7, LocalArrival, lp, 8, [X0, X1, Z, X3]);
    b.row(7, OffloadArrival, lq, 7, [X0, Z, X2, X3]);
    b.row(7, Exogenous, le, 7, [X0, X1, X2, X0]);
    b.row(7, Transmit, m1, 5, [X0, Z, X2, X1]);
    b.row(7, LocalService, m2, 7, [X2, X1, X2, X2]);
    b.row(7, EdgeService, m3, 7, [X3, X1, X2, X3]);

    b.row(8, LocalArrival, lp, 8, [X0, X1, Z, X3]);
    b.row(8, OffloadArrival, lq, 7, [X0, Z, X2, X3]);
    b.row(8, Exogenous, le, 8, [X0, X1, X2, X0]);
    b.row(8, Transmit, m1, 4, [X0, Z, X2, X1]);
    b.row(8, LocalService, m2, 8, [X2, X2, X2, X2]);
    b.row(8, EdgeService, m3, 8, [X3, X1, X2, X3]);

    b.build()
}

/// One other device's offloading policy as seen by the tagged device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtherDevice {
    pub lambda: f64,
    pub p: f64,
    pub mu1: f64,
}

/// Sum of the transmitter departure rates `lambda_j (1-p_j) mu1_j / (lambda_j (1-p_j) + mu1_j)`.
pub fn exogenous_rate(others: &[OtherDevice]) -> Result<f64> {
    let mut total = 0.0;
    for o in others {
        check_nonnegative("lambda", o.lambda)?;
        check_probability("p", o.p)?;
        check_nonnegative("mu1", o.mu1)?;
        total += transmitter_throughput(o.lambda * (1.0 - o.p), o.mu1);
    }
    Ok(total)
}

/// Departure rate of an LCFS-P server, `a mu / (a + mu)`; zero when both vanish.
pub fn transmitter_throughput(arrival: f64, mu: f64) -> f64 {
    crate::occupancy::busy_fraction(arrival, mu) * mu
}
