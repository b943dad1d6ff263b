//! Target coefficients `W_nm`, the triangular change of basis `h_p^n`, and
//! the control coefficients `g_pm = sum_{n>=p} W_nm h_p^n`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PhysicalField;
use crate::hermite::{psi_scaled_unchecked, MAX_HERMITE_INDEX};
use crate::numeric::{ln_factorial, CompensatedSum};
use crate::quadrature::{TensorRule, DECAY_TOLERANCE};

use super::params::{ControlParams, MAX_PULSE_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Quadrature,
    Grid,
    ClosedForm,
}

/// Where the residual `W_0^T = W^T - W_0(., T)` comes from.
pub enum ResidualTarget<'a> {
    Callback(&'a dyn Fn(f64, f64) -> f64),
    Field(&'a PhysicalField),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// `(N + 1) x (M + 1)` target coefficients.
    pub w_nm: Array2<f64>,
    /// `h[[p, n]]` for `n >= p`; zero below the diagonal.
    pub h_pn: Array2<f64>,
    /// `(N + 1) x (M + 1)` control coefficients.
    pub g_pm: Array2<f64>,
    pub w_provenance: Array2<Provenance>,
    pub g_provenance: Provenance,
}

impl CoefficientSet {
    /// Builds `h` and `g` from target coefficients.
    pub fn from_targets(params: &ControlParams, w_nm: Array2<f64>, provenance: Provenance) -> Result<Self> {
        check_dims(params, &w_nm)?;
        let h_pn = h_matrix(params.n, params.t)?;
        let g_pm = g_from(&w_nm, &h_pn);
        let w_provenance = Array2::from_elem(w_nm.dim(), provenance);
        Ok(Self {
            w_nm,
            h_pn,
            g_pm,
            w_provenance,
            g_provenance: provenance,
        })
    }

    /// Closed-form coefficients of the built-in example; `g` uses its own
    /// closed form rather than the sum.
    pub fn example(params: &ControlParams) -> Result<Self> {
        let w_nm = Array2::from_shape_fn((params.n + 1, params.m + 1), |(n, m)| {
            example_wnm_unchecked(n, m, params.t, params.t_star)
        });
        let h_pn = h_matrix(params.n, params.t)?;
        let g_pm = Array2::from_shape_fn((params.n + 1, params.m + 1), |(p, m)| {
            example_g_pm_unchecked(p, m, params.n, params.t, params.t_star)
        });
        Ok(Self {
            w_nm,
            h_pn,
            g_pm,
            w_provenance: Array2::from_elem((params.n + 1, params.m + 1), Provenance::ClosedForm),
            g_provenance: Provenance::ClosedForm,
        })
    }

    /// All-zero coefficients.
    pub fn zero(params: &ControlParams) -> Result<Self> {
        Self::from_targets(
            params,
            Array2::zeros((params.n + 1, params.m + 1)),
            Provenance::ClosedForm,
        )
    }

    pub fn n(&self) -> usize {
        self.w_nm.nrows() - 1
    }

    pub fn m(&self) -> usize {
        self.w_nm.ncols() - 1
    }

    /// Largest deviation of stored `g` from `g` recomputed out of stored `W` and `h`.
    pub fn g_consistency(&self) -> f64 {
        let g = g_from(&self.w_nm, &self.h_pn);
        g.iter()
            .zip(self.g_pm.iter())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

fn check_dims(params: &ControlParams, w: &Array2<f64>) -> Result<()> {
    if w.dim() != (params.n + 1, params.m + 1) {
        return Err(Error::Shape {
            expected: format!("{}x{}", params.n + 1, params.m + 1),
            actual: format!("{}x{}", w.nrows(), w.ncols()),
        });
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite target coefficient".into()));
    }
    Ok(())
}

/// Signed value from a log magnitude.
fn signed_exp(negative: bool, ln_mag: f64) -> f64 {
    let v = ln_mag.exp();
    if negative {
        -v
    } else {
        v
    }
}

fn hermite_poly(m: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..m {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed-form target coefficients of the built-in example.
pub fn example_wnm(n: usize, m: usize, t: f64, t_star: f64) -> Result<f64> {
    check_scales(t, t_star)?;
    if 2 * n + 1 > MAX_HERMITE_INDEX || m > MAX_HERMITE_INDEX {
        return Err(Error::Domain(format!("index ({n}, {m}) exceeds the supported maximum")));
    }
    Ok(example_wnm_unchecked(n, m, t, t_star))
}

fn check_scales(t: f64, t_star: f64) -> Result<()> {
    if !(t > 0.0 && t_star > t) {
        return Err(Error::Parameter(format!("need T* > T > 0, got T = {t}, T* = {t_star}")));
    }
    Ok(())
}

/// Argument `sqrt(2 T T* / (T*^2 - T^2))` of the `x2` Hermite factor.
pub fn example_hermite_argument(t: f64, t_star: f64) -> f64 {
    (2.0 * t * t_star / (t_star * t_star - t * t)).sqrt()
}

/// `x2`-dependent part shared by `W_nm` and `g_pm`:
/// `(-1)^m (2^m m!)^(-1/2) (dT / (T* + T))^(m/2) H_m(arg)` as (negative, ln|.|).
fn example_m_factor(m: usize, t: f64, t_star: f64) -> (bool, f64) {
    let mf = m as f64;
    let h = hermite_poly(m, example_hermite_argument(t, t_star));
    let ln = -0.5 * (mf * std::f64::consts::LN_2 + ln_factorial(m as u64))
        + 0.5 * mf * ((t_star - t) / (t_star + t)).ln()
        + h.abs().ln();
    ((m % 2 == 1) != (h < 0.0), ln)
}

fn example_wnm_unchecked(n: usize, m: usize, t: f64, t_star: f64) -> f64 {
    let s = t_star + t;
    let k = (2 * n + 1) as f64;
    let ln_pre = 0.5 * (0.5 * (2.0 * std::f64::consts::PI * t_star).ln() - 1.0 - s.ln()) + t_star / s;
    let ln_n = -k * std::f64::consts::LN_2 - 0.5 * ln_factorial(2 * n as u64 + 1);
    let (neg_m, ln_m) = example_m_factor(m, t, t_star);
    // (-1)^(m+1) = -(-1)^m
    signed_exp(!neg_m, ln_pre + ln_n + ln_m)
}

/// `h_p^n = (2T/pi)^(1/4) (-1)^(p+1) (2 sqrt(2T))^(2p+1) / ((n-p)! (2p+1)!) sqrt((2n+1)! / 2^(2n+1))`.
pub fn compute_h_pn(p: usize, n: usize, t: f64) -> Result<f64> {
    if n > MAX_PULSE_ORDER {
        return Err(Error::Domain(format!(
            "index n = {n} exceeds the supported maximum {MAX_PULSE_ORDER}"
        )));
    }
    if p > n {
        return Err(Error::Parameter(format!("h_p^n needs p <= n, got p = {p}, n = {n}")));
    }
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("T must be positive, got {t}")));
    }
    Ok(h_unchecked(p, n, t))
}

fn h_unchecked(p: usize, n: usize, t: f64) -> f64 {
    let kp = (2 * p + 1) as f64;
    let kn = (2 * n + 1) as f64;
    let ln = 0.25 * (2.0 * t / std::f64::consts::PI).ln() + kp * (2.0 * (2.0 * t).sqrt()).ln()
        - ln_factorial((n - p) as u64)
        - ln_factorial(2 * p as u64 + 1)
        + 0.5 * (ln_factorial(2 * n as u64 + 1) - kn * std::f64::consts::LN_2);
    signed_exp(p % 2 == 0, ln)
}

fn h_matrix(n_max: usize, t: f64) -> Result<Array2<f64>> {
    let mut h = Array2::zeros((n_max + 1, n_max + 1));
    for p in 0..=n_max {
        for n in p..=n_max {
            h[[p, n]] = compute_h_pn(p, n, t)?;
        }
    }
    Ok(h)
}

fn g_from(w: &Array2<f64>, h: &Array2<f64>) -> Array2<f64> {
    let n_max = w.nrows() - 1;
    Array2::from_shape_fn(w.dim(), |(p, m)| {
        (p..=n_max)
            .map(|n| w[[n, m]] * h[[p, n]])
            .collect::<CompensatedSum>()
            .value()
    })
}

/// `g_pm^N = sum_{n=p}^N W_nm h_p^n` for stored targets.
pub fn compute_g_pm(coeffs: &CoefficientSet, params: &ControlParams) -> Result<Array2<f64>> {
    check_dims(params, &coeffs.w_nm)?;
    let h = h_matrix(params.n, params.t)?;
    Ok(g_from(&coeffs.w_nm, &h))
}

/// Closed-form control coefficients of the built-in example.
pub fn example_g_pm(p: usize, m: usize, n_max: usize, t: f64, t_star: f64) -> Result<f64> {
    check_scales(t, t_star)?;
    if p > n_max {
        return Err(Error::Parameter(format!("need p <= N, got p = {p}, N = {n_max}")));
    }
    if n_max > MAX_PULSE_ORDER || m > MAX_HERMITE_INDEX {
        return Err(Error::Domain(format!(
            "index (N, m) = ({n_max}, {m}) exceeds the supported maximum"
        )));
    }
    Ok(example_g_pm_unchecked(p, m, n_max, t, t_star))
}

/// Inner sum `sum_{n=p}^N 1 / (8^n (n - p)!)`.
pub fn example_g_tail(p: usize, n_max: usize) -> f64 {
    (p..=n_max)
        .map(|n| (-(n as f64) * 8f64.ln() - ln_factorial((n - p) as u64)).exp())
        .collect::<CompensatedSum>()
        .value()
}

fn example_g_pm_unchecked(p: usize, m: usize, n_max: usize, t: f64, t_star: f64) -> f64 {
    let s = t_star + t;
    let ln_pre = 0.5 * (0.5 * (4.0 * t_star * t.powi(3)).ln() - 1.0 - s.ln()) + t_star / s;
    let (neg_m, ln_m) = example_m_factor(m, t, t_star);
    let ln_p = p as f64 * (8.0 * t).ln() - ln_factorial(2 * p as u64 + 1);
    let ln_tail = example_g_tail(p, n_max).ln();
    signed_exp(neg_m != (p % 2 == 1), ln_pre + ln_m + ln_p + ln_tail)
}

/// `<W_0^T, Theta_nm>` for a single pair.
pub fn compute_wnm_quadrature(target: &ResidualTarget<'_>, params: &ControlParams, n: usize, m: usize) -> Result<f64> {
    let sub = ControlParams { n, m, ..*params };
    let all = compute_wnm_matrix(target, &sub, None)?;
    Ok(all[[n, m]])
}

/// `<W_0^T, Theta_nm>` for all `n <= N`, `m <= M`.
///
/// Callbacks are integrated with a tensor rule (the default Gauss–Legendre
/// rule unless one is given); fields use the midpoint rule of their grid.
/// Integrands that do not decay at the edge of the domain are logged.
pub fn compute_wnm_matrix(
    target: &ResidualTarget<'_>,
    params: &ControlParams,
    rule: Option<&TensorRule>,
) -> Result<Array2<f64>> {
    params.validate()?;
    let (x1, x2, weights1, weights2, samples) = match target {
        ResidualTarget::Callback(f) => {
            let owned;
            let rule = match rule {
                Some(r) => r,
                None => {
                    owned = TensorRule::default_for(params.t, params.t_star)?;
                    &owned
                }
            };
            let samples = rule.sample(f)?;
            check_decay(&samples, rule.x1.len(), rule.x2.len());
            (
                rule.x1.nodes().to_vec(),
                rule.x2.nodes().to_vec(),
                rule.x1.weights().to_vec(),
                rule.x2.weights().to_vec(),
                samples,
            )
        }
        ResidualTarget::Field(field) => {
            let g = field.grid();
            let samples: Vec<f64> = field.values().iter().copied().collect();
            check_decay(&samples, g.n1, g.n2);
            (
                g.x1_coords(),
                g.x2_coords(),
                vec![g.h1(); g.n1],
                vec![g.h2(); g.n2],
                samples,
            )
        }
    };
    let n2 = x2.len();
    let mut out = Array2::zeros((params.n + 1, params.m + 1));
    let b: Vec<Vec<f64>> = (0..=params.m)
        .map(|m| {
            x2.iter()
                .zip(&weights2)
                .map(|(&x, &w)| w * psi_scaled_unchecked(params.t_star, m, x))
                .collect()
        })
        .collect();
    for n in 0..=params.n {
        let a: Vec<f64> = x1
            .iter()
            .zip(&weights1)
            .map(|(&x, &w)| w * psi_scaled_unchecked(params.t, 2 * n + 1, x))
            .collect();
        // rows reduced against every m-profile at once
        let mut acc = vec![CompensatedSum::new(); params.m + 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            let row = &samples[i * n2..(i + 1) * n2];
            for (m, bm) in b.iter().enumerate() {
                let mut inner = CompensatedSum::new();
                for (v, bj) in row.iter().zip(bm) {
                    inner.add(v * bj);
                }
                acc[m].add(ai * inner.value());
            }
        }
        for (m, s) in acc.iter().enumerate() {
            out[[n, m]] = s.value();
        }
    }
    Ok(out)
}

fn check_decay(samples: &[f64], n1: usize, n2: usize) {
    let peak = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut edge = 0.0f64;
    for i in 0..n1 {
        edge = edge.max(samples[i * n2].abs()).max(samples[i * n2 + n2 - 1].abs());
    }
    for j in 0..n2 {
        edge = edge.max(samples[j].abs()).max(samples[(n1 - 1) * n2 + j].abs());
    }
    if edge > DECAY_TOLERANCE * peak.max(1.0) {
        log::warn!(
            "residual target has magnitude {edge:.3e} on the quadrature boundary; coefficients may be inaccurate"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn h00_closed_form() {
        let t = 2.0;
        let expected = -(2.0 * t / std::f64::consts::PI).powf(0.25) * 2.0 * t.sqrt();
        assert_relative_eq!(compute_h_pn(0, 0, t).unwrap(), expected, max_relative = 1e-14);
        assert!(compute_h_pn(1, 0, t).is_err());
        assert!(compute_h_pn(0, 61, t).is_err());
    }

    #[test]
    fn wnm_sign_structure() {
        let arg = example_hermite_argument(2.0, 6.0);
        assert_relative_eq!(arg, 0.75f64.sqrt(), max_relative = 1e-15);
        for m in 0..8 {
            let w = example_wnm(0, m, 2.0, 6.0).unwrap();
            let expect = if m % 2 == 0 { -1.0 } else { 1.0 } * hermite_poly(m, arg).signum();
            assert_eq!(w.signum(), expect);
        }
    }

    #[test]
    fn wnm_decay_ratio() {
        for n in 0..6 {
            let r = example_wnm(n + 1, 2, 2.0, 6.0).unwrap() / example_wnm(n, 2, 2.0, 6.0).unwrap();
            let nf = n as f64;
            assert_relative_eq!(
                r.abs(),
                1.0 / (4.0 * ((2.0 * nf + 3.0) * (2.0 * nf + 2.0)).sqrt()),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn tail_sum() {
        assert_relative_eq!(example_g_tail(4, 4), 8f64.powi(-4));
        assert_relative_eq!(example_g_tail(0, 40), (0.125f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn single_term_g() {
        let params = ControlParams::new(2.0, 6.0, 0, 3, 10).unwrap();
        let w = Array2::from_shape_fn((1, 4), |(_, m)| m as f64 - 1.5);
        let set = CoefficientSet::from_targets(&params, w.clone(), Provenance::Quadrature).unwrap();
        let h00 = compute_h_pn(0, 0, 2.0).unwrap();
        for m in 0..4 {
            assert_eq!(set.g_pm[[0, m]], w[[0, m]] * h00);
        }
    }
}
