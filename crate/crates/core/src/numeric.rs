//! Small numeric helpers shared across modules: log-factorials, binomials and
//! compensated summation with a fixed order.

use statrs::function::factorial;

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    factorial::ln_factorial(n)
}

/// Binomial coefficient as an exact integer. Panics on overflow, which cannot
/// happen for the pulse orders used here (`n <= 60`).
pub fn binomial_i128(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> f64 {
    binomial_i128(n, k) as f64
}

/// Neumaier-compensated accumulator. Terms are folded in the order they are
/// added, so results are reproducible for a fixed iteration order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator in iteration order.
pub fn stable_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `(1 - exp(-b x)) / x`, continuous at `x = 0` where it equals `b`.
pub fn one_minus_exp_ratio(x: f64, b: f64) -> f64 {
    let y = b * x;
    if y.abs() < 1e-8 {
        b * (1.0 - y / 2.0 + y * y / 6.0)
    } else {
        -(-y).exp_m1() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial_i128(6, 3), 20);
        assert_eq!(binomial_i128(60, 30), 118264581564861424);
        assert_eq!(binomial_i128(3, 5), 0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s = stable_sum([1.0, 1e-16, 1e-16, -1.0]);
        assert!((s - 2e-16).abs() < 1e-30);
    }

    #[test]
    fn ratio_limit() {
        assert_eq!(one_minus_exp_ratio(0.0, 0.3), 0.3);
        let x = 1e-3;
        let direct = (1.0 - (-0.3f64 * x).exp()) / x;
        assert!((one_minus_exp_ratio(x, 0.3) - direct).abs() < 1e-12);
    }
}
