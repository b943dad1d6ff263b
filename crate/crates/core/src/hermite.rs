//! Hermite polynomials, scaled Hermite functions and their Fourier images.
//!
//! The scaled family used throughout the crate is
//!
//! ```text
//! psi_n^a(mu) = (sqrt(2 a pi) 2^n n!)^(-1/2) H_n(mu / sqrt(2a)) exp(-mu^2 / (4a))
//! ```
//!
//! which is orthonormal in `L2(R)` for every `a > 0`. Under the unitary
//! transform its image is `(2a)^(1/4) (-i)^n h_n(sqrt(2a) lambda)`, where
//! `h_n` is the classical orthonormal Hermite function.
//!
//! Normalisation constants are carried in log form. Large indices go through
//! the orthonormal three-term recurrence with the Gaussian weight folded in
//! and a running exponent, so neither `2^n n!` nor `H_n` is ever formed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ln_factorial;

/// Largest polynomial index accepted by the evaluators.
pub const MAX_HERMITE_INDEX: usize = 200;

/// Above this index `psi_scaled_eval` switches from the direct formula to the
/// weighted recurrence.
const DIRECT_INDEX_LIMIT: usize = 40;

const MAX_MULTIPLICATION_ORDER: usize = 30;

const RESCALE_THRESHOLD: f64 = 1e100;

/// Scale parameter and truncation index of a scaled Hermite basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    alpha: f64,
    max_index: usize,
}

impl BasisSpec {
    pub fn new(alpha: f64, max_index: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!(
                "basis scale must be positive and finite, got {alpha}"
            )));
        }
        if max_index > MAX_HERMITE_INDEX {
            return Err(Error::Domain(format!(
                "basis index {max_index} exceeds the supported maximum {MAX_HERMITE_INDEX}"
            )));
        }
        Ok(Self { alpha, max_index })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `psi_0^a(mu), ..., psi_K^a(mu)` with `K = max_index`, in one recurrence pass.
    pub fn eval_all(&self, mu: f64) -> Vec<f64> {
        let s = (2.0 * self.alpha).sqrt();
        let y = mu / s;
        let mut out = vec![0.0; self.max_index + 1];
        hermite_functions_weighted(y, -0.5 * y * y, &mut out);
        let scale = (2.0 * self.alpha).powf(-0.25);
        out.iter_mut().for_each(|v| *v *= scale);
        out
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.max_index {
            return Err(Error::Domain(format!(
                "basis index {n} exceeds the basis truncation {}",
                self.max_index
            )));
        }
        Ok(())
    }
}

/// Physicists' Hermite polynomial `H_n(mu)` by the three-term recurrence.
pub fn hermite_eval(n: usize, mu: f64) -> Result<f64> {
    check_hermite_index(n)?;
    Ok(hermite_unchecked(n, mu))
}

fn check_hermite_index(n: usize) -> Result<()> {
    if n > MAX_HERMITE_INDEX {
        return Err(Error::Domain(format!(
            "Hermite index {n} exceeds the supported maximum {MAX_HERMITE_INDEX}"
        )));
    }
    Ok(())
}

fn hermite_unchecked(n: usize, mu: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * mu;
    for k in 1..n {
        let next = 2.0 * mu * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = H_k(x) / sqrt(sqrt(pi) 2^k k!) * exp(log_weight)` for
/// `k < out.len()`.
///
/// With `log_weight = -x^2/2` these are the orthonormal Hermite functions.
/// The weight never multiplies an unscaled polynomial value: the recurrence
/// is rescaled whenever it grows past `1e100` and the accumulated exponent is
/// applied per output in log form.
pub fn hermite_functions_weighted(x: f64, log_weight: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = log_weight;
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    out[0] = apply_log_scale(cur, log_scale);
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_THRESHOLD {
            prev /= RESCALE_THRESHOLD;
            cur /= RESCALE_THRESHOLD;
            log_scale += RESCALE_THRESHOLD.ln();
        }
        out[k + 1] = apply_log_scale(cur, log_scale);
    }
}

/// Single-index form of [`hermite_functions_weighted`].
pub fn hermite_function_weighted(n: usize, x: f64, log_weight: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    hermite_functions_weighted(x, log_weight, &mut buf);
    buf[n]
}

#[inline]
fn apply_log_scale(v: f64, log_scale: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * (v.abs().ln() + log_scale).exp()
    }
}

/// `(-i)^n`.
pub fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Scaled orthonormal Hermite function `psi_n^a(mu)`.
pub fn psi_scaled_eval(spec: &BasisSpec, n: usize, mu: f64) -> Result<f64> {
    spec.check_index(n)?;
    Ok(psi_scaled_unchecked(spec.alpha, n, mu))
}

pub(crate) fn psi_scaled_unchecked(alpha: f64, n: usize, mu: f64) -> f64 {
    if n <= DIRECT_INDEX_LIMIT {
        psi_scaled_direct(alpha, n, mu)
    } else {
        psi_scaled_recurrence(alpha, n, mu)
    }
}

fn psi_scaled_direct(alpha: f64, n: usize, mu: f64) -> f64 {
    let y = mu / (2.0 * alpha).sqrt();
    if y.abs() > 1e6 {
        return 0.0;
    }
    let ln_norm = -0.5
        * (0.5 * (2.0 * alpha * std::f64::consts::PI).ln()
            + n as f64 * std::f64::consts::LN_2
            + ln_factorial(n as u64));
    let h = hermite_unchecked(n, y);
    apply_log_scale(h, ln_norm - 0.5 * y * y)
}

fn psi_scaled_recurrence(alpha: f64, n: usize, mu: f64) -> f64 {
    let y = mu / (2.0 * alpha).sqrt();
    (2.0 * alpha).powf(-0.25) * hermite_function_weighted(n, y, -0.5 * y * y)
}

/// Unitary Fourier image of `psi_n^a` at frequency `lambda`.
pub fn psi_hat_eval(spec: &BasisSpec, n: usize, lambda: f64) -> Result<Complex64> {
    spec.check_index(n)?;
    Ok(psi_hat_unchecked(spec.alpha, n, lambda))
}

pub(crate) fn psi_hat_unchecked(alpha: f64, n: usize, lambda: f64) -> Complex64 {
    let s = (2.0 * alpha).sqrt();
    let x = s * lambda;
    let mag = (2.0 * alpha).powf(0.25) * hermite_function_weighted(n, x, -0.5 * x * x);
    minus_i_pow(n) * mag
}

/// Tensor basis element `psi_{2n+1}^T(x1) psi_m^{T*}(x2)`, odd in `x1`.
pub fn theta_eval(t: f64, t_star: f64, n: usize, m: usize, x1: f64, x2: f64) -> Result<f64> {
    if !(t > 0.0) || !(t_star > t) {
        return Err(Error::Parameter(format!(
            "tensor basis needs T* > T > 0, got T = {t}, T* = {t_star}"
        )));
    }
    if 2 * n + 1 > MAX_HERMITE_INDEX || m > MAX_HERMITE_INDEX {
        return Err(Error::Domain(format!(
            "tensor basis index ({n}, {m}) exceeds the supported maximum"
        )));
    }
    Ok(psi_scaled_unchecked(t, 2 * n + 1, x1) * psi_scaled_unchecked(t_star, m, x2))
}

/// Residual of the Hermite multiplication theorem
/// `H_m(l mu) = l^m sum_k m!/(k!(m-2k)!) (1 - l^-2)^k H_{m-2k}(mu)`.
pub fn hermite_multiplication_check(m: usize, lambda: f64, mu: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::Parameter(
            "multiplication theorem requires a nonzero scale".into(),
        ));
    }
    if m > MAX_MULTIPLICATION_ORDER {
        return Err(Error::Domain(format!(
            "multiplication check supports orders up to {MAX_MULTIPLICATION_ORDER}, got {m}"
        )));
    }
    let lhs = hermite_unchecked(m, lambda * mu);
    let shrink = 1.0 - lambda.powi(-2);
    let mut acc = 0.0;
    for k in 0..=m / 2 {
        let ln_c = ln_factorial(m as u64) - ln_factorial(k as u64) - ln_factorial((m - 2 * k) as u64);
        acc += ln_c.exp() * shrink.powi(k as i32) * hermite_unchecked(m - 2 * k, mu);
    }
    let rhs = lambda.powi(m as i32) * acc;
    Ok((lhs - rhs).abs())
}
