//! Piecewise-constant pulses approximating `(-1)^p delta^(p)` in time.
//!
//! `v_l^p` takes the value `(-1)^(p-j) C(p, j) l^(p+1)` on `[j/l, (j+1)/l)`
//! for `j = 0..=p` and vanishes elsewhere. Moments against polynomials are
//! formed from exact integer sums.

use crate::error::{Error, Result};
use crate::numeric::binomial_i128;

use super::params::MAX_PULSE_ORDER;

/// Largest polynomial degree accepted by [`delta_moment_residual`].
pub const MAX_MOMENT_DEGREE: usize = 6;

/// Signed integer weight `(-1)^(p-j) C(p, j)` of interval `j`.
pub fn pulse_weight(p: usize, j: usize) -> i128 {
    let c = binomial_i128(p as u64, j as u64);
    if (p - j) % 2 == 0 {
        c
    } else {
        -c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    p: usize,
    l: u32,
}

impl Pulse {
    pub fn new(p: usize, l: u32) -> Result<Self> {
        if p > MAX_PULSE_ORDER {
            return Err(Error::Domain(format!(
                "pulse order {p} exceeds the supported maximum {MAX_PULSE_ORDER}"
            )));
        }
        if l == 0 {
            return Err(Error::Parameter("pulse resolution l must be positive".into()));
        }
        Ok(Self { p, l })
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn resolution(&self) -> u32 {
        self.l
    }

    pub fn support_end(&self) -> f64 {
        (self.p as f64 + 1.0) / self.l as f64
    }

    /// Height `l^(p+1)` shared by all intervals before the signed weight.
    pub fn amplitude(&self) -> f64 {
        (self.l as f64).powi(self.p as i32 + 1)
    }

    /// Index of the interval containing `xi`, with right-continuity at breakpoints.
    pub fn interval(&self, xi: f64) -> Option<usize> {
        if !(xi >= 0.0) {
            return None;
        }
        let j = (xi * self.l as f64).floor();
        if j <= self.p as f64 {
            Some(j as usize)
        } else {
            None
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self.interval(xi) {
            Some(j) => pulse_weight(self.p, j) as f64 * self.amplitude(),
            None => 0.0,
        }
    }
}

/// `v_l^p(xi)`.
pub fn pulse_eval(p: usize, l: u32, xi: f64) -> Result<f64> {
    Ok(Pulse::new(p, l)?.eval(xi))
}

/// Exact integer `S_d = sum_j w_j ((j+1)^(d+1) - j^(d+1))`.
fn moment_sum(p: usize, d: usize) -> i128 {
    (0..=p)
        .map(|j| {
            let j = j as i128;
            pulse_weight(p, j as usize) * ((j + 1).pow(d as u32 + 1) - j.pow(d as u32 + 1))
        })
        .sum()
}

/// `int_0^inf v_l^p(xi) xi^d d xi = S_d l^(p-d) / (d + 1)`.
pub fn pulse_moment(p: usize, l: u32, d: usize) -> f64 {
    let s = moment_sum(p, d) as f64;
    s * (l as f64).powi(p as i32 - d as i32) / (d as f64 + 1.0)
}

/// `|int v_l^p q - q^(p)(0)|` for a polynomial with coefficients `q[0] + q[1] xi + ...`.
pub fn delta_moment_residual(p: usize, l: u32, q: &[f64]) -> Result<f64> {
    Pulse::new(p, l)?;
    if q.len() > MAX_MOMENT_DEGREE + 1 {
        return Err(Error::Parameter(format!(
            "polynomial degree {} exceeds the supported maximum {MAX_MOMENT_DEGREE}",
            q.len() - 1
        )));
    }
    let integral: f64 = q
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(d, c)| c * pulse_moment(p, l, d))
        .sum();
    let target = q.get(p).map_or(0.0, |c| c * factorial(p));
    Ok((integral - target).abs())
}

fn factorial(p: usize) -> f64 {
    (1..=p).map(|k| k as f64).product()
}
