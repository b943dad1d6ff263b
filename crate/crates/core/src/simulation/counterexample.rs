//! An `L2` control whose response leaves `L2`.
//!
//! The control `u(x2, t) = (T - t)^(-5/8) 1{|x2| < 2 sqrt(T - t)}` is square
//! integrable but unbounded. Its terminal response obeys the pointwise bound
//!
//! ```text
//! |W_u(x, T)| >= 2^(9/8) / (e^2 pi) |x1| / |x|^(9/4) Gamma(9/8) Q(9/8, |x|^2 / (2T))
//! ```
//!
//! and near the origin `|W_u| >= c |x1| / |x|^(9/4)`, `c = Gamma(9/8) / (e^2 pi)`,
//! whose square is not integrable at `x = 0`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::quadrature::QuadratureRule;

pub const MAX_LEVELS: usize = 8;

const SHAPE: f64 = 1.125;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub level: usize,
    pub inner_radius: f64,
    /// Lower-bound norm over `inner_radius <= |x| <= outer radius`.
    pub norm: f64,
    /// Lower-bound norm over the newest annulus `[eps_k, eps_(k-1)]`.
    pub increment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub x1: f64,
    pub x2: f64,
    pub quadrature_value: f64,
    pub lower_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub t: f64,
    pub outer_radius: f64,
    pub constant: f64,
    pub rows: Vec<CounterexampleRow>,
    pub increment_ratios: Vec<f64>,
    pub spot_checks: Vec<SpotCheck>,
}

/// `c = Gamma(9/8) / (e^2 pi)`.
pub fn lower_bound_constant() -> f64 {
    gamma(SHAPE) / (std::f64::consts::E.powi(2) * std::f64::consts::PI)
}

/// Largest radius with `Q(9/8, r^2 / (2T)) >= 2^(-9/8)`, where the near-origin
/// bound `c |x1| / |x|^(9/4)` is valid.
pub fn validity_radius(t: f64) -> f64 {
    let level = 2f64.powf(-SHAPE);
    let (mut lo, mut hi) = (0.0f64, 50.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma_ur(SHAPE, mid) >= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (2.0 * t * lo).sqrt()
}

/// Full lower bound at `x`.
pub fn lower_bound(t: f64, x1: f64, x2: f64) -> f64 {
    let r2 = x1 * x1 + x2 * x2;
    2f64.powf(SHAPE) / (std::f64::consts::E.powi(2) * std::f64::consts::PI) * x1.abs() / r2.powf(1.125)
        * gamma(SHAPE)
        * gamma_ur(SHAPE, r2 / (2.0 * t))
}

/// `||c x1 / |x|^(9/4)||` over the annulus `a <= |x| <= b`, by Gauss–Legendre
/// in `ln r` and in the angle.
fn annulus_norm(c: f64, a: f64, b: f64) -> Result<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let radial = QuadratureRule::gauss_legendre(48, 0.5 * (lb - la))?;
    let angular = QuadratureRule::gauss_legendre(48, std::f64::consts::PI)?;
    let mid = 0.5 * (la + lb);
    let mut acc = CompensatedSum::new();
    for (&s, &ws) in radial.nodes().iter().zip(radial.weights()) {
        let r = (mid + s).exp();
        for (&th, &wt) in angular.nodes().iter().zip(angular.weights()) {
            let x1 = r * th.cos();
            let v = c * x1.abs() / r.powf(2.25);
            // area element r dr dtheta with dr = r ds
            acc.add(ws * wt * v * v * r * r);
        }
    }
    Ok(acc.value().sqrt())
}

/// `W_u(x, T)` by quadrature of the time integral
/// `x1 / (4 sqrt(pi)) int_0^T exp(-x1^2/(4 xi)) xi^(-17/8) (erf(a + 1) - erf(a - 1)) d xi`,
/// `a = x2 / (2 sqrt(xi))`, in the variable `ln xi`.
pub fn response_by_quadrature(t: f64, x1: f64, x2: f64) -> Result<f64> {
    if x1 == 0.0 {
        return Ok(0.0);
    }
    let lo = (x1 * x1 / 3000.0).min(t * 1e-3).ln();
    let hi = t.ln();
    let panels = 400;
    let width = (hi - lo) / panels as f64;
    let rule = QuadratureRule::gauss_legendre(16, 0.5 * width)?;
    let mut acc = CompensatedSum::new();
    for k in 0..panels {
        let centre = lo + (k as f64 + 0.5) * width;
        for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
            let xi = (centre + s).exp();
            let a = x2 / (2.0 * xi.sqrt());
            let v = (-x1 * x1 / (4.0 * xi)).exp() * xi.powf(-1.125) * (erf(a + 1.0) - erf(a - 1.0));
            acc.add(w * v);
        }
    }
    Ok(x1 / (4.0 * std::f64::consts::PI.sqrt()) * acc.value())
}

/// Truncated lower-bound norms over `eps 2^-k <= |x| <= eps`, `k = 1..=levels`,
/// plus spot comparisons of the quadrature response with the full bound at
/// `|x| = 1e-2` and `1e-3`.
pub fn counterexample_norms(t: f64, levels: usize) -> Result<CounterexampleReport> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("T must be positive, got {t}")));
    }
    if levels == 0 || levels > MAX_LEVELS {
        return Err(Error::Parameter(format!(
            "refinement levels must be in 1..={MAX_LEVELS}, got {levels}"
        )));
    }
    let c = lower_bound_constant();
    let eps = validity_radius(t);
    let mut rows = Vec::with_capacity(levels);
    let mut squared = CompensatedSum::new();
    for k in 1..=levels {
        let outer = eps * 0.5f64.powi(k as i32 - 1);
        let inner = eps * 0.5f64.powi(k as i32);
        let inc = annulus_norm(c, inner, outer)?;
        squared.add(inc * inc);
        rows.push(CounterexampleRow {
            level: k,
            inner_radius: inner,
            norm: squared.value().sqrt(),
            increment: inc,
        });
    }
    let increment_ratios = rows.windows(2).map(|w| w[1].increment / w[0].increment).collect();
    let mut spot_checks = Vec::new();
    for &r in &[1e-2, 1e-3] {
        for &angle in &[std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_6] {
            let (x1, x2) = (r * f64::cos(angle), r * f64::sin(angle));
            let q = response_by_quadrature(t, x1, x2)?;
            let b = lower_bound(t, x1, x2);
            spot_checks.push(SpotCheck {
                x1,
                x2,
                quadrature_value: q,
                lower_bound: b,
                pass: q.abs() > b,
            });
        }
    }
    Ok(CounterexampleReport {
        t,
        outer_radius: eps,
        constant: c,
        rows,
        increment_ratios,
        spot_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn annulus_matches_radial_integral() {
        // ||c x1 / |x|^(9/4)||^2 over [a, b] = 2 pi c^2 (a^-1/2 - b^-1/2)
        let c = lower_bound_constant();
        let (a, b) = (0.01f64, 0.3f64);
        let exact = (2.0 * std::f64::consts::PI * c * c * (a.powf(-0.5) - b.powf(-0.5))).sqrt();
        assert_relative_eq!(annulus_norm(c, a, b).unwrap(), exact, max_relative = 1e-12);
    }

    #[test]
    fn validity_radius_solves_threshold() {
        let eps = validity_radius(2.0);
        assert_relative_eq!(
            gamma_ur(1.125, eps * eps / 4.0),
            2f64.powf(-1.125),
            max_relative = 1e-10
        );
    }

    #[test]
    fn level_guard() {
        assert!(counterexample_norms(2.0, 0).is_err());
        assert!(counterexample_norms(2.0, 9).is_err());
    }
}
