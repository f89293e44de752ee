/// Two-sided 97.5% quantile of Student's t with 49 degrees of freedom.
pub const T_975_49: f64 = 2.009_575_237_129_21;

/// Equal-width batches over `[start, end)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BatchClock {
    pub start: f64,
    pub width: f64,
    pub count: usize,
}

impl BatchClock {
    pub fn new(start: f64, end: f64, count: usize) -> Self {
        Self {
            start,
            width: (end - start) / count as f64,
            count,
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.width * self.count as f64
    }

    fn index(&self, t: f64) -> usize {
        (((t - self.start) / self.width).floor().max(0.0) as usize).min(self.count - 1)
    }

    /// Calls `f(batch, a, b)` for each batch-aligned piece of `[t0, t1]`
    /// inside the measurement window.
    pub fn split(&self, t0: f64, t1: f64, mut f: impl FnMut(usize, f64, f64)) {
        let mut a = t0.max(self.start);
        let end = t1.min(self.end());
        while a < end {
            let i = self.index(a);
            let edge = if i + 1 == self.count {
                self.end()
            } else {
                self.start + self.width * (i + 1) as f64
            };
            let b = end.min(edge);
            if b > a {
                f(i, a, b);
            }
            // guard against a boundary that rounds onto `a`
            a = if b > a { b } else { next_up(a) };
        }
    }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

/// Time average with batch-means confidence half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    /// 95% half-width, Student t with `BATCHES - 1` degrees of freedom.
    pub ci95: f64,
    /// Three standard errors.
    pub ci3sigma: f64,
}

impl Interval {
    pub fn from_batches(areas: &[f64], width: f64) -> Self {
        let n = areas.len() as f64;
        let means: Vec<f64> = areas.iter().map(|a| a / width).collect();
        let mean = means.iter().sum::<f64>() / n;
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        Self {
            mean,
            ci95: T_975_49 * se,
            ci3sigma: 3.0 * se,
        }
    }

    pub fn contains_3sigma(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.ci3sigma
    }

    /// `|x - mean|` in standard errors.
    pub fn z_score(&self, x: f64) -> f64 {
        let se = self.ci3sigma / 3.0;
        if se > 0.0 {
            (x - self.mean).abs() / se
        } else if x == self.mean {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_the_window_exactly() {
        let clock = BatchClock::new(1.0, 11.0, 5);
        let mut pieces = Vec::new();
        clock.split(0.0, 20.0, |i, a, b| pieces.push((i, a, b)));
        assert_eq!(pieces.len(), 5);
        let total: f64 = pieces.iter().map(|(_, a, b)| b - a).sum();
        assert!((total - 10.0).abs() < 1e-12);
        assert_eq!(pieces[0], (0, 1.0, 3.0));

        let mut inner = Vec::new();
        clock.split(2.5, 3.5, |i, a, b| inner.push((i, a, b)));
        assert_eq!(inner, vec![(0, 2.5, 3.0), (1, 3.0, 3.5)]);
    }

    #[test]
    fn interval_of_constant_batches_has_zero_width() {
        let iv = Interval::from_batches(&[2.0; 50], 2.0);
        assert_eq!(iv.mean, 1.0);
        assert_eq!(iv.ci95, 0.0);
        assert_eq!(iv.z_score(1.0), 0.0);
        assert!(iv.z_score(1.1).is_infinite());
    }

    const _: () = assert!(T_975_49 > 1.959_96 && T_975_49 < 2.0106);
}
