//! The synthesized boundary control and its admissibility profile.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{hermite_functions_weighted, minus_i_pow};
use crate::numeric::CompensatedSum;

use super::coefficients::CoefficientSet;
use super::params::ControlParams;
use super::pulse::Pulse;

/// Version tag written into serialized controls.
pub const FORMAT_VERSION: u32 = 1;

/// `sqrt(pi / 2)`.
pub const SQRT_PI_OVER_2: f64 = 1.253_314_137_315_500_3;

/// Physical kernels `U_m(x2, xi)`, `m = 0..=M`: the inverse `x2`-transform of
/// `f_m(., xi) = exp((T - xi) s^2) psihat_m^{T*}(s)`.
///
/// `U_m = (2T*)^(1/4) hbar_m(y) R^(m/2) exp(-x2^2 / (4 (dT + xi))) / sqrt(2 (dT + xi))`
/// with `R = (T* + T - xi) / (dT + xi)`, `y = x2 sqrt(T* / (2 (dT + xi)(T* + T - xi)))`
/// and `hbar_m` the normalized Hermite polynomial.
pub fn control_kernels(params: &ControlParams, x2: f64, xi: f64, out: &mut [f64]) {
    let d = params.delta_t() + xi;
    let rest = params.t_star + params.t - xi;
    let y = x2 * (params.t_star / (2.0 * d * rest)).sqrt();
    hermite_functions_weighted(y, -x2 * x2 / (4.0 * d), out);
    let ratio = (rest / d).sqrt();
    let mut scale = (2.0 * params.t_star).powf(0.25) / (2.0 * d).sqrt();
    for v in out.iter_mut() {
        *v *= scale;
        scale *= ratio;
    }
}

/// Spectral kernels `f_m(sigma2, xi) = exp((T - xi) sigma2^2) psihat_m^{T*}(sigma2)`.
pub fn spectral_kernels(params: &ControlParams, sigma2: f64, xi: f64, out: &mut [Complex64]) {
    let x = (2.0 * params.t_star).sqrt() * sigma2;
    let mut buf = vec![0.0; out.len()];
    hermite_functions_weighted(x, -(params.delta_t() + xi) * sigma2 * sigma2, &mut buf);
    let scale = (2.0 * params.t_star).powf(0.25);
    for (m, (o, b)) in out.iter_mut().zip(&buf).enumerate() {
        *o = minus_i_pow(m) * (scale * b);
    }
}

/// Closed-form boundary control `u(x2, xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedControl {
    params: ControlParams,
    g_pm: Array2<f64>,
    pulses: Vec<Pulse>,
}

#[derive(Serialize, Deserialize)]
struct ControlFile {
    format_version: u32,
    params: ControlParams,
    g_pm: Vec<Vec<f64>>,
}

impl SynthesizedControl {
    pub fn new(params: ControlParams, g_pm: Array2<f64>) -> Result<Self> {
        params.validate()?;
        if g_pm.dim() != (params.n + 1, params.m + 1) {
            return Err(Error::Shape {
                expected: format!("{}x{}", params.n + 1, params.m + 1),
                actual: format!("{}x{}", g_pm.nrows(), g_pm.ncols()),
            });
        }
        if g_pm.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite control coefficient".into()));
        }
        let pulses = (0..=params.n)
            .map(|p| Pulse::new(p, params.l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, g_pm, pulses })
    }

    pub fn params(&self) -> &ControlParams {
        &self.params
    }

    pub fn g_pm(&self) -> &Array2<f64> {
        &self.g_pm
    }

    pub(crate) fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    fn check_time(&self, xi: f64) -> Result<()> {
        if !(0.0..=self.params.t).contains(&xi) {
            return Err(Error::Parameter(format!(
                "control time {xi} outside [0, {}]",
                self.params.t
            )));
        }
        Ok(())
    }

    /// `c_m(xi) = -sqrt(pi/2) sum_p g_pm v_l^p(xi)`.
    fn time_weights(&self, xi: f64) -> Vec<f64> {
        let mut c = vec![0.0; self.params.m + 1];
        for (p, pulse) in self.pulses.iter().enumerate() {
            let v = pulse.eval(xi);
            if v != 0.0 {
                for (m, cm) in c.iter_mut().enumerate() {
                    *cm += self.g_pm[[p, m]] * v;
                }
            }
        }
        c.iter_mut().for_each(|v| *v *= -SQRT_PI_OVER_2);
        c
    }

    /// `u(x2, xi)`.
    pub fn eval(&self, x2: f64, xi: f64) -> Result<f64> {
        self.check_time(xi)?;
        let c = self.time_weights(xi);
        if c.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        let mut k = vec![0.0; self.params.m + 1];
        control_kernels(&self.params, x2, xi, &mut k);
        Ok(c.iter().zip(&k).map(|(a, b)| a * b).collect::<CompensatedSum>().value())
    }

    /// `u(x2, xi)` for many `x2` at a single time.
    pub fn profile(&self, x2: &[f64], xi: f64) -> Result<Vec<f64>> {
        self.check_time(xi)?;
        let c = self.time_weights(xi);
        if c.iter().all(|v| *v == 0.0) {
            return Ok(vec![0.0; x2.len()]);
        }
        let mut k = vec![0.0; self.params.m + 1];
        Ok(x2
            .iter()
            .map(|&x| {
                control_kernels(&self.params, x, xi, &mut k);
                c.iter().zip(&k).map(|(a, b)| a * b).collect::<CompensatedSum>().value()
            })
            .collect())
    }

    /// Unitary `x2`-transform of `u(., xi)` at `sigma2`.
    pub fn eval_hat(&self, sigma2: f64, xi: f64) -> Result<Complex64> {
        self.check_time(xi)?;
        let c = self.time_weights(xi);
        let mut f = vec![Complex64::new(0.0, 0.0); self.params.m + 1];
        spectral_kernels(&self.params, sigma2, xi, &mut f);
        Ok(c.iter().zip(&f).map(|(a, b)| b * *a).sum())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ControlFile {
            format_version: FORMAT_VERSION,
            params: self.params,
            g_pm: self.g_pm.outer_iter().map(|r| r.to_vec()).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ControlFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported control format version {}",
                file.format_version
            )));
        }
        let rows = file.g_pm.len();
        let cols = file.g_pm.first().map_or(0, Vec::len);
        if file.g_pm.iter().any(|r| r.len() != cols) {
            return Err(Error::Format("ragged coefficient matrix".into()));
        }
        let flat: Vec<f64> = file.g_pm.into_iter().flatten().collect();
        let g = Array2::from_shape_vec((rows, cols), flat).map_err(|e| Error::Format(e.to_string()))?;
        Self::new(file.params, g)
    }
}

pub fn synthesize(params: &ControlParams, coeffs: &CoefficientSet) -> Result<SynthesizedControl> {
    SynthesizedControl::new(*params, coeffs.g_pm.clone())
}

/// Per-`x2` supremum over time of `|u|` and its norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityProfile {
    pub x2: Vec<f64>,
    pub sup_profile: Vec<f64>,
    pub sup_norm: f64,
    pub l2_of_sup: f64,
}

/// Time samples resolving every pulse interval: uniform points inside each
/// `[j/l, (j+1)/l)` including the left breakpoint and a point just before
/// the right one.
pub fn admissibility_times(params: &ControlParams, xi_samples: usize) -> Vec<f64> {
    let l = params.l as f64;
    let per = (xi_samples / (params.n + 1)).max(4);
    let mut out = Vec::with_capacity(per * (params.n + 1));
    for j in 0..=params.n {
        let lo = j as f64 / l;
        let hi = ((j + 1) as f64 / l).min(params.t);
        if lo >= params.t {
            break;
        }
        let left_limit = hi - (hi - lo) * 1e-9;
        for k in 0..per {
            out.push(lo + (left_limit - lo) * k as f64 / (per - 1) as f64);
        }
    }
    out
}

/// `g(x2) = sup_xi |u(x2, xi)|` on the uniform grid `x2`, its maximum and
/// its discrete `L2` norm with the grid spacing.
pub fn admissibility_profile(u: &SynthesizedControl, x2: &[f64], xi_samples: usize) -> Result<AdmissibilityProfile> {
    let p = u.params();
    let need = 4 * (p.n + 1) * p.l as usize;
    if xi_samples < need {
        return Err(Error::Parameter(format!(
            "admissibility profile needs at least {need} time samples, got {xi_samples}"
        )));
    }
    if x2.len() < 2 {
        return Err(Error::Parameter(
            "admissibility profile needs at least two x2 samples".into(),
        ));
    }
    let mut sup = vec![0.0f64; x2.len()];
    for xi in admissibility_times(p, xi_samples) {
        for (s, v) in sup.iter_mut().zip(u.profile(x2, xi)?) {
            *s = s.max(v.abs());
        }
    }
    let dx = x2[1] - x2[0];
    let sup_norm = sup.iter().fold(0.0f64, |a, b| a.max(*b));
    let l2 = (sup.iter().map(|v| v * v).collect::<CompensatedSum>().value() * dx).sqrt();
    Ok(AdmissibilityProfile {
        x2: x2.to_vec(),
        sup_profile: sup,
        sup_norm,
        l2_of_sup: l2,
    })
}
