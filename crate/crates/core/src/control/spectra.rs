//! Target spectra `phi`, their pulse approximations `phi^l`, and the
//! frequency-domain response `z` of the one-dimensional dipole system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{binomial_i128, one_minus_exp_ratio, CompensatedSum};
use crate::quadrature::QuadratureRule;

use super::pulse::{pulse_weight, Pulse};

const SMALL_RATIO: f64 = 1e-6;
const SERIES_LIMIT: f64 = 0.5;
const DIRECT_SUM_THRESHOLD: f64 = 4.0;

/// `sqrt(2 / pi)`.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// `ln((e^a - 1) / a)` for `a >= 0`.
fn ln_growth(a: f64) -> f64 {
    if a < SMALL_RATIO {
        (1.0 + a / 2.0 + a * a / 6.0).ln()
    } else if a > 1.0 {
        a + (-(-a).exp_m1()).ln() - a.ln()
    } else {
        (a.exp_m1() / a).ln()
    }
}

/// `(e^a - 1) / a - 1` without cancellation for small `a`.
fn growth_minus_one(a: f64) -> f64 {
    if a < SERIES_LIMIT {
        let mut term = 1.0;
        let mut acc = 0.0;
        for k in 1..40 {
            term *= a / (k as f64 + 1.0);
            acc += term;
            if term < 1e-18 * acc {
                break;
            }
        }
        acc
    } else {
        (a.exp_m1() - a) / a
    }
}

/// `exp(log_mag)` with the sign of `lambda^(2p+1)`, times `i`.
fn odd_power_times_i(lambda: f64, log_mag: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, lambda.signum() * log_mag.exp())
}

/// `phi_{2p+1}(lambda) = i lambda^(2p+1) exp(-T lambda^2)`.
pub fn phi_eval(p: usize, t: f64, lambda: f64) -> Complex64 {
    let k = (2 * p + 1) as f64;
    odd_power_times_i(lambda, k * lambda.abs().ln() - t * lambda * lambda)
}

/// `phi^l_{2p+1}(lambda) = phi_{2p+1}(lambda) ((e^a - 1) / a)^(p+1)`, `a = lambda^2 / l`.
pub fn phi_l_eval(p: usize, l: u32, t: f64, lambda: f64) -> Complex64 {
    let k = (2 * p + 1) as f64;
    let a = lambda * lambda / l as f64;
    let log_mag = k * lambda.abs().ln() - t * lambda * lambda + (p as f64 + 1.0) * ln_growth(a);
    odd_power_times_i(lambda, log_mag)
}

/// `phi_{2p+1}(lambda) - phi^l_{2p+1}(lambda)`, evaluated without cancellation.
pub fn phi_difference_eval(p: usize, l: u32, t: f64, lambda: f64) -> Complex64 {
    let a = lambda * lambda / l as f64;
    if a < SERIES_LIMIT {
        let e = ((p as f64 + 1.0) * growth_minus_one(a).ln_1p()).exp_m1();
        -phi_eval(p, t, lambda) * e
    } else {
        phi_eval(p, t, lambda) - phi_l_eval(p, l, t, lambda)
    }
}

/// Measured `||phi_{2p+1} - phi^l_{2p+1}||` in `L2(R)`.
///
/// The integrand is even; it is integrated over `[0, Lambda]` with composite
/// Gauss–Legendre, where `Lambda` is chosen from the decay rate
/// `T - (p + 1) / l`. That rate must be positive.
pub fn phi_difference_norm(p: usize, l: u32, t: f64) -> Result<f64> {
    let rate = t - (p as f64 + 1.0) / l as f64;
    if !(rate > 0.0) {
        return Err(Error::Parameter(format!(
            "phi difference is not square integrable for p = {p}, l = {l}, T = {t}"
        )));
    }
    let k = (2 * p + 1) as f64;
    let mut cutoff = 1.0f64;
    while rate * cutoff * cutoff - k * cutoff.ln() < 80.0 {
        cutoff *= 1.25;
    }
    let panels = 64;
    let rule = QuadratureRule::gauss_legendre(32, 0.5 * cutoff / panels as f64)?;
    let mut acc = CompensatedSum::new();
    for panel in 0..panels {
        let centre = cutoff * (panel as f64 + 0.5) / panels as f64;
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            acc.add(w * phi_difference_eval(p, l, t, centre + x).norm_sqr());
        }
    }
    Ok((2.0 * acc.value()).sqrt())
}

/// Upper bound `e^(3/4) / sqrt(pi) * 2^p (p+1) (p+1)! / (l T^(p + 7/4))`.
pub fn phi_difference_bound(p: usize, l: u32, t: f64) -> f64 {
    let pf = p as f64;
    let fact: f64 = (1..=p + 1).map(|k| k as f64).product();
    (0.75f64).exp() / std::f64::consts::PI.sqrt() * 2f64.powi(p as i32) * (pf + 1.0) * fact
        / (l as f64 * t.powf(pf + 1.75))
}

/// `int_0^t exp(-(t - xi) s) v_l^p(xi) d xi` for `s = sigma1^2`.
///
/// Complete intervals are aggregated through `D = expm1(s / l)`:
/// `l^p e^(-t s) (D / a) sum_i B_i D^i` with exact integers
/// `B_i = sum_{j<K} w_j C(j, i)`. For `s / l` above a threshold the terms are
/// summed per interval in exponent form instead.
fn pulse_heat_integral(pulse: &Pulse, t: f64, s: f64) -> f64 {
    let p = pulse.order();
    let l = pulse.resolution() as f64;
    if !(t > 0.0) {
        return 0.0;
    }
    let complete = ((t * l).floor() as usize).min(p + 1);
    let partial = if complete <= p && (complete as f64) / l < t {
        let rest = t - complete as f64 / l;
        pulse_weight(p, complete) as f64 * pulse.amplitude() * one_minus_exp_ratio(s, rest)
    } else {
        0.0
    };
    if complete == 0 {
        return partial;
    }
    let a = s / l;
    let full = if a > DIRECT_SUM_THRESHOLD {
        let tail = -(-a).exp_m1() / s;
        let mut acc = CompensatedSum::new();
        for j in 0..complete {
            let lead = -(t - (j as f64 + 1.0) / l) * s;
            acc.add(pulse_weight(p, j) as f64 * (lead + tail.ln()).exp());
        }
        acc.value() * pulse.amplitude()
    } else {
        let d = a.exp_m1();
        let d_over_a = if a < SMALL_RATIO {
            1.0 + a / 2.0 + a * a / 6.0
        } else {
            d / a
        };
        let mut poly = 0.0;
        for i in (0..complete).rev() {
            let b: i128 = (i..complete)
                .map(|j| pulse_weight(p, j) * binomial_i128(j as u64, i as u64))
                .sum();
            poly = poly * d + b as f64;
        }
        l.powi(p as i32) * (-t * s).exp() * d_over_a * poly
    };
    full + partial
}

/// `z_l^p(sigma1, t) = -sqrt(2/pi) i sigma1 int_0^t exp(-(t - xi) sigma1^2) v_l^p(xi) d xi`.
pub fn z_at(p: usize, l: u32, t: f64, sigma1: f64) -> Result<Complex64> {
    let pulse = Pulse::new(p, l)?;
    Ok(z_with_pulse(&pulse, t, sigma1))
}

pub(crate) fn z_with_pulse(pulse: &Pulse, t: f64, sigma1: f64) -> Complex64 {
    if sigma1 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let integral = pulse_heat_integral(pulse, t, sigma1 * sigma1);
    Complex64::new(0.0, -SQRT_2_OVER_PI * sigma1 * integral)
}

/// Terminal value `z_l^p(sigma1, T)`.
pub fn z_terminal(p: usize, l: u32, t: f64, sigma1: f64) -> Result<Complex64> {
    z_at(p, l, t, sigma1)
}
