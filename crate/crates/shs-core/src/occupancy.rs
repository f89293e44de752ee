//! Long-run busy fractions of preemptive single-packet servers.

/// Fraction of time an LCFS-P server with Poisson arrivals at rate `arrival`
/// and exponential service at rate `mu` is busy. Zero when both rates vanish.
pub fn busy_fraction(arrival: f64, mu: f64) -> f64 {
    let denom = arrival + mu;
    if denom > 0.0 {
        arrival / denom
    } else {
        0.0
    }
}

/// Fraction of time the shared transmitter serves secondary packets when
/// primary packets arrive at `lambda_p_bar`, secondary packets at `lambda_s`,
/// and primary packets preempt secondary ones.
pub fn secondary_busy_fraction(lambda_s: f64, mu1: f64, lambda_p_bar: f64) -> f64 {
    let a = lambda_s + mu1 + lambda_p_bar;
    let b = mu1 + lambda_p_bar;
    if a > 0.0 && b > 0.0 {
        lambda_s / a * (mu1 / b)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((busy_fraction(5.0, 0.8) - 5.0 / 5.8).abs() < 1e-15);
        assert_eq!(busy_fraction(0.0, 0.0), 0.0);
        assert_eq!(busy_fraction(0.0, 1.0), 0.0);
        let t2 = secondary_busy_fraction(10.0, 1.0, 1.0);
        assert!((t2 - 10.0 / 12.0 * 0.5).abs() < 1e-15);
        assert_eq!(secondary_busy_fraction(0.0, 0.0, 0.0), 0.0);
    }

    // Three-state chain: idle, secondary in service, primary in service.
    #[test]
    fn secondary_fraction_matches_three_state_chain() {
        let (ls, mu, a) = (3.0, 2.0, 0.7);
        // balance: idle out (ls + a) = mu (sec + prim); sec out (a + mu) = ls idle
        let prim = a / (a + mu);
        let idle = (1.0 - prim) / (1.0 + ls / (a + mu));
        let sec = ls * idle / (a + mu);
        assert!((secondary_busy_fraction(ls, mu, a) - sec).abs() < 1e-15);
        assert!((idle * (ls + a) - mu * (sec + prim)).abs() < 1e-15);
    }
}
