//! Priority-access topology: a primary device owning transmitter T_P and
//! secondary devices that borrow T_P when it is not serving a class-P packet.
//!
//! Primary age slots: 0 monitor, 1 T_P, 2 L_P, 3 ES.
//! Secondary age slots: 0 monitor, 1 T_P, 2 L_S, 3 ES.

use crate::equitable::{X0, X1, X2, X3, Z};
use crate::error::{check_nonnegative, check_positive, check_probability, Result, ShsError};
use crate::model::{RateSymbol::*, ShsModel, TableBuilder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryRates {
    pub lambda_p: f64,
    pub p_p: f64,
    pub mu1p: f64,
    pub mu2p: f64,
    pub mu3: f64,
    /// Aggregate secondary offload rate. Accepted for interface symmetry and
    /// deliberately unused: secondary packets never delay a primary packet.
    pub lambda_s: f64,
}

impl PrimaryRates {
    pub fn new(lambda_p: f64, p_p: f64, mu1p: f64, mu2p: f64, mu3: f64) -> Self {
        Self {
            lambda_p,
            p_p,
            mu1p,
            mu2p,
            mu3,
            lambda_s: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("lambda_P", self.lambda_p)?;
        check_probability("p_P", self.p_p)?;
        check_positive("mu1P", self.mu1p)?;
        check_positive("mu2P", self.mu2p)?;
        check_positive("mu3", self.mu3)?;
        check_nonnegative("lambda_s", self.lambda_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryRates {
    pub lambda: f64,
    pub p: f64,
    pub mu2: f64,
    /// Rate of the shared transmitter T_P.
    pub mu1: f64,
    pub mu3: f64,
    /// Offload rate of the other secondary devices into T_P.
    pub lambda_e: f64,
    /// Primary offload stream `lambda_P (1 - p_P)`.
    pub lambda_p_bar: f64,
}

impl SecondaryRates {
    pub fn validate(&self) -> Result<()> {
        check_positive("lambda", self.lambda)?;
        check_probability("p", self.p)?;
        check_positive("mu2", self.mu2)?;
        check_positive("mu1", self.mu1)?;
        check_positive("mu3", self.mu3)?;
        check_nonnegative("lambda_e", self.lambda_e)?;
        check_nonnegative("lambda_P_bar", self.lambda_p_bar)
    }
}

/// Builds the 5-state primary model.
pub fn build_primary_model(r: &PrimaryRates) -> Result<ShsModel> {
    r.validate()?;
    let lp = r.lambda_p * r.p_p;
    let lq = r.lambda_p * (1.0 - r.p_p);
    let (m1, m2, m3) = (r.mu1p, r.mu2p, r.mu3);

    let mut b = TableBuilder::new(3);
    b.state(
        "s1: T_P freshest, L_P 2nd-freshest, ES oldest",
        &[1, 1, 1, 1],
    );
    b.state(
        "s2: T_P freshest, L_P oldest, ES 2nd-freshest",
        &[1, 1, 1, 1],
    );
    b.state(
        "s3: T_P 2nd-freshest, L_P freshest, ES oldest",
        &[1, 1, 1, 1],
    );
    b.state("s4: T_P idle, L_P freshest, ES 2nd-freshest", &[1, 0, 1, 1]);
    b.state("s5: T_P idle, L_P 2nd-freshest, ES freshest", &[1, 0, 1, 1]);

    b.row(1, LocalArrival, lp, 3, [X0, X1, Z, X3]);
    b.row(1, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(1, Transmit, m1, 5, [X0, Z, X2, X1]);
    b.row(1, LocalService, m2, 1, [X2, X1, X2, X2]);
    b.row(1, EdgeService, m3, 1, [X3, X1, X2, X3]);

    b.row(2, LocalArrival, lp, 3, [X0, X1, Z, X3]);
    b.row(2, OffloadArrival, lq, 2, [X0, Z, X2, X3]);
    b.row(2, Transmit, m1, 5, [X0, Z, X2, X1]);
    b.row(2, LocalService, m2, 2, [X2, X1, X2, X3]);
    b.row(2, EdgeService, m3, 2, [X3, X1, X3, X3]);

    b.row(3, LocalArrival, lp, 3, [X0, X1, Z, X3]);
    b.row(3, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(3, Transmit, m1, 4, [X0, Z, X2, X1]);
    b.row(3, LocalService, m2, 3, [X2, X2, X2, X2]);
    b.row(3, EdgeService, m3, 3, [X3, X1, X2, X3]);

    b.row(4, LocalArrival, lp, 4, [X0, Z, Z, X3]);
    b.row(4, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(4, LocalService, m2, 4, [X2, Z, X2, X2]);
    b.row(4, EdgeService, m3, 4, [X3, Z, X2, X3]);

    b.row(5, LocalArrival, lp, 4, [X0, Z, Z, X3]);
    b.row(5, OffloadArrival, lq, 2, [X0, Z, X2, X3]);
    b.row(5, LocalService, m2, 5, [X2, Z, X2, X3]);
    b.row(5, EdgeService, m3, 5, [X3, Z, X3, X3]);

    b.build()
}

/// Builds the 10-state secondary model.
pub fn build_secondary_model(r: &SecondaryRates) -> Result<ShsModel> {
    r.validate()?;
    let lp = r.lambda * r.p;
    let lq = r.lambda * (1.0 - r.p);
    let (le, lpp, m1, m2, m3) = (r.lambda_e, r.lambda_p_bar, r.mu1, r.mu2, r.mu3);

    let mut b = TableBuilder::new(3);
    let all = [1, 1, 1, 1];
    b.state("s1: T_P freshest, L 2nd-freshest, ES oldest", &all);
    b.state("s2: T_P freshest, L oldest, ES 2nd-freshest", &all);
    b.state("s3: T_P freshest, L 2nd-freshest, ES class P", &all);
    b.state("s4: T_P 2nd-freshest, L freshest, ES oldest", &all);
    b.state("s5: T_P class P, L freshest, ES 2nd-freshest", &all);
    b.state("s6: T_P 2nd-freshest, L freshest, ES class P", &all);
    b.state("s7: T_P class P, L freshest, ES class P", &all);
    b.state("s8: T_P class P, L 2nd-freshest, ES freshest", &all);
    b.state("s9: T_P oldest, L freshest, ES 2nd-freshest", &all);
    b.state("s10: T_P oldest, L 2nd-freshest, ES freshest", &all);

    b.row(1, LocalArrival, lp, 4, [X0, X1, Z, X3]);
    b.row(1, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(1, Exogenous, le, 9, [X0, X0, X2, X3]);
    b.row(1, PrimaryOffload, lpp, 5, [X0, X0, X2, X3]);
    b.row(1, Transmit, m1, 10, [X0, X1, X2, X1]);
    b.row(1, LocalService, m2, 1, [X2, X1, X2, X2]);
    b.row(1, EdgeService, m3, 1, [X3, X1, X2, X3]);

    b.row(2, LocalArrival, lp, 4, [X0, X1, Z, X3]);
    b.row(2, OffloadArrival, lq, 2, [X0, Z, X2, X3]);
    b.row(2, Exogenous, le, 10, [X0, X0, X2, X3]);
    b.row(2, PrimaryOffload, lpp, 8, [X0, X0, X2, X3]);
    b.row(2, Transmit, m1, 10, [X0, X1, X2, X1]);
    b.row(2, LocalService, m2, 2, [X2, X1, X2, X3]);
    b.row(2, EdgeService, m3, 2, [X3, X1, X3, X3]);

    b.row(3, LocalArrival, lp, 6, [X0, X1, Z, X3]);
    b.row(3, OffloadArrival, lq, 3, [X0, Z, X2, X3]);
    b.row(3, Exogenous, le, 6, [X0, X0, X2, X3]);
    b.row(3, PrimaryOffload, lpp, 7, [X0, X0, X2, X3]);
    b.row(3, Transmit, m1, 6, [X0, X0, X2, X3]);
    b.row(3, LocalService, m2, 3, [X2, X1, X2, X2]);
    b.row(3, EdgeService, m3, 1, [X3, X1, X2, X3]);

    b.row(4, LocalArrival, lp, 4, [X0, X1, Z, X3]);
    b.row(4, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(4, Exogenous, le, 9, [X0, X0, X2, X3]);
    b.row(4, PrimaryOffload, lpp, 5, [X0, X0, X2, X3]);
    b.row(4, Transmit, m1, 9, [X0, X1, X2, X1]);
    b.row(4, LocalService, m2, 4, [X2, X2, X2, X2]);
    b.row(4, EdgeService, m3, 4, [X3, X1, X2, X3]);

    b.row(5, LocalArrival, lp, 5, [X0, X1, Z, X3]);
    b.row(5, OffloadArrival, lq, 5, [X0, X1, X2, X3]);
    b.row(5, Exogenous, le, 5, [X0, X1, X2, X3]);
    b.row(5, PrimaryOffload, lpp, 5, [X0, X0, X2, X3]);
    b.row(5, Transmit, m1, 6, [X0, X1, X2, X1]);
    b.row(5, LocalService, m2, 5, [X2, X2, X2, X2]);
    b.row(5, EdgeService, m3, 5, [X3, X3, X2, X3]);

    b.row(6, LocalArrival, lp, 6, [X0, X1, Z, X3]);
    b.row(6, OffloadArrival, lq, 3, [X0, Z, X2, X3]);
    b.row(6, Exogenous, le, 6, [X0, X0, X2, X3]);
    b.row(6, PrimaryOffload, lpp, 7, [X0, X0, X2, X3]);
    b.row(6, Transmit, m1, 6, [X0, X0, X2, X3]);
    b.row(6, LocalService, m2, 6, [X2, X2, X2, X2]);
    b.row(6, EdgeService, m3, 4, [X3, X1, X2, X3]);

    b.row(7, LocalArrival, lp, 7, [X0, X1, Z, X3]);
    b.row(7, OffloadArrival, lq, 7, [X0, X1, X2, X3]);
    b.row(7, Exogenous, le, 7, [X0, X1, X2, X3]);
    b.row(7, PrimaryOffload, lpp, 7, [X0, X0, X2, X3]);
    b.row(7, Transmit, m1, 6, [X0, X1, X2, X1]);
    b.row(7, LocalService, m2, 7, [X2, X2, X2, X2]);
    b.row(7, EdgeService, m3, 5, [X3, X3, X2, X3]);

    b.row(8, LocalArrival, lp, 5, [X0, X1, Z, X3]);
    b.row(8, OffloadArrival, lq, 8, [X0, X1, X2, X3]);
    b.row(8, Exogenous, le, 8, [X0, X1, X2, X3]);
    b.row(8, PrimaryOffload, lpp, 8, [X0, X0, X2, X3]);
    b.row(8, Transmit, m1, 6, [X0, X1, X2, X1]);
    b.row(8, LocalService, m2, 8, [X2, X2, X2, X3]);
    b.row(8, EdgeService, m3, 8, [X3, X3, X3, X3]);

    b.row(9, LocalArrival, lp, 9, [X0, X1, Z, X3]);
    b.row(9, OffloadArrival, lq, 1, [X0, Z, X2, X3]);
    b.row(9, Exogenous, le, 9, [X0, X0, X2, X3]);
    b.row(9, PrimaryOffload, lpp, 5, [X0, X0, X2, X3]);
    b.row(9, Transmit, m1, 9, [X0, X1, X2, X1]);
    b.row(9, LocalService, m2, 9, [X2, X2, X2, X2]);
    b.row(9, EdgeService, m3, 9, [X3, X3, X2, X3]);

    b.row(10, LocalArrival, lp, 9, [X0, X1, Z, X3]);
    b.row(10, OffloadArrival, lq, 2, [X0, Z, X2, X3]);
    b.row(10, Exogenous, le, 10, [X0, X0, X2, X3]);
    b.row(10, PrimaryOffload, lpp, 8, [X0, X0, X2, X3]);
    b.row(10, Transmit, m1, 9, [X0, X1, X2, X1]);
    b.row(10, LocalService, m2, 10, [X2, X2, X2, X3]);
    b.row(10, EdgeService, m3, 10, [X3, X3, X3, X3]);

    b.build()
}

/// Relative distance from `mu1P = mu3` below which the closed form is refused.
pub const CLOSED_FORM_GAP: f64 = 1e-6;

/// Closed-form average age of the primary device.
pub fn primary_aoi_closed_form(r: &PrimaryRates) -> Result<f64> {
    r.validate()?;
    let (l, p, m1, m2, m3) = (r.lambda_p, r.p_p, r.mu1p, r.mu2p, r.mu3);
    let gap = (m1 - m3).abs();
    if gap < CLOSED_FORM_GAP * m3 {
        return Err(ShsError::ClosedFormSingular { gap });
    }
    let q = 1.0 - p;
    let t1 = (m1 + m2 + m3) / ((m1 + m2) * (m2 + m3));
    let t2 = m1 * m3 * (l + m2) / (l * (m1 + m2) * (m2 + m3) * (l * q + m2));
    let t3 = m2 * m3 * (l + m1) / (l * (m1 + m2) * (m1 - m3) * (m1 + l * p));
    let t4 = m1 * m2 * (l + m3) / (l * (m1 - m3) * (m2 + m3) * (m3 + l * p));
    Ok(t1 + t2 - t3 + t4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{average_aoi, solve_steady_state};

    #[test]
    fn shapes_of_the_tables() {
        let m = build_primary_model(&PrimaryRates::new(4.0, 0.5, 2.0, 0.5, 15.0)).unwrap();
        assert_eq!(m.n_states(), 5);
        assert_eq!(m.transitions().len(), 23);
        let s = SecondaryRates {
            lambda: 5.0,
            p: 0.5,
            mu2: 0.6,
            mu1: 2.0,
            mu3: 15.0,
            lambda_e: 10.0,
            lambda_p_bar: 2.0,
        };
        let m = build_secondary_model(&s).unwrap();
        assert_eq!(m.n_states(), 10);
        assert_eq!(m.transitions().len(), 70);
        assert!(m.states().iter().all(|st| st.growth.iter().all(|&g| g)));
    }

    #[test]
    fn closed_form_matches_linear_system_at_reference_point() {
        let r = PrimaryRates::new(4.0, 0.5, 2.0, 0.5, 15.0);
        let lin = average_aoi(&build_primary_model(&r).unwrap()).unwrap();
        let cf = primary_aoi_closed_form(&r).unwrap();
        assert!((lin - cf).abs() / lin < 1e-9, "{lin} vs {cf}");
    }

    #[test]
    fn closed_form_refuses_the_removable_singularity() {
        let r = PrimaryRates::new(4.0, 0.5, 15.0, 0.5, 15.0);
        assert!(matches!(
            primary_aoi_closed_form(&r),
            Err(ShsError::ClosedFormSingular { .. })
        ));
        assert!(average_aoi(&build_primary_model(&r).unwrap()).is_ok());
    }

    #[test]
    fn secondary_load_does_not_touch_the_primary_model() {
        let base = PrimaryRates::new(3.0, 0.3, 1.5, 0.7, 15.0);
        let loaded = PrimaryRates {
            lambda_s: 250.0,
            ..base
        };
        let a = average_aoi(&build_primary_model(&base).unwrap()).unwrap();
        let b = average_aoi(&build_primary_model(&loaded).unwrap()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn secondary_without_cross_traffic_keeps_class_p_states_empty() {
        let s = SecondaryRates {
            lambda: 5.0,
            p: 0.5,
            mu2: 0.6,
            mu1: 2.0,
            mu3: 15.0,
            lambda_e: 0.0,
            lambda_p_bar: 0.0,
        };
        let pi = solve_steady_state(&build_secondary_model(&s).unwrap())
            .unwrap()
            .pi;
        for i in [2, 4, 5, 6, 7] {
            assert_eq!(pi[i], 0.0, "s{}", i + 1);
        }
        assert!(average_aoi(&build_secondary_model(&s).unwrap()).unwrap() > 0.0);
    }

    #[test]
    fn invalid_secondary_field_is_named() {
        let s = SecondaryRates {
            lambda: 5.0,
            p: 0.5,
            mu2: 0.6,
            mu1: 2.0,
            mu3: 15.0,
            lambda_e: 0.0,
            lambda_p_bar: -2.0,
        };
        assert!(build_secondary_model(&s)
            .unwrap_err()
            .to_string()
            .contains("lambda_P_bar"));
    }
}
