//! Small numerical kernels shared by every module: compensated summation,
//! log-sum-exp and the `p log(p/q)` term with the fixed 0/∞ conventions.

/// Neumaier-compensated accumulator.
///
/// Aggregation order changes the result by at most a few ulps of the total,
/// which keeps identity residuals independent of evaluation order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if !t.is_finite() {
            // Infinities and NaN bypass compensation.
            self.sum = t;
            self.compensation = 0.0;
            return;
        }
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        if self.sum.is_finite() {
            self.sum + self.compensation
        } else {
            self.sum
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().total()
}

/// `log Σ exp(a_i)` with max-shift. Empty input or all `-∞` gives `-∞`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if !max.is_finite() {
        return max;
    }
    max + sum(terms.iter().map(|&a| (a - max).exp())).ln()
}

/// `p · ln(p/q)` with `0·ln(0/q) = 0` and `p·ln(p/0) = +∞` for `p > 0`.
#[inline]
pub fn rel_entropy_term(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

/// `p · ln p` with `0·ln 0 = 0`.
#[inline]
pub fn xlogx(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(values), 2.0);
    }

    #[test]
    fn log_sum_exp_is_shift_stable() {
        let v = log_sum_exp([1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, 0.0]), 0.0);
    }

    #[test]
    fn relative_entropy_conventions() {
        assert_eq!(rel_entropy_term(0.0, 0.0), 0.0);
        assert_eq!(rel_entropy_term(0.0, 0.3), 0.0);
        assert_eq!(rel_entropy_term(0.5, 0.0), f64::INFINITY);
        assert_eq!(xlogx(0.0), 0.0);
    }
}
