//! State generated by a synthesized control, without time stepping.
//!
//! In frequency space the response is separable,
//! `V(sigma, t) = -sqrt(pi/2) sum_m (sum_p g_pm z_p(sigma1, t)) f_m(sigma2, t)`.
//! The same structure holds in physical space with `z_p` replaced by the
//! one-dimensional dipole response `y_p(x1, t)` and `f_m` by `U_m(x2, t)`.

use ndarray::Array2;
use num_complex::Complex64;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::field::{GridSpec, PhysicalField, SpectralField};

use super::coefficients::CoefficientSet;
use super::params::ControlParams;
use super::pulse::{pulse_weight, Pulse};
use super::spectra::z_with_pulse;
use super::synthesis::{control_kernels, spectral_kernels, SynthesizedControl, SQRT_PI_OVER_2};

fn check_time(params: &ControlParams, t: f64) -> Result<()> {
    if !(t >= 0.0 && t <= params.t) {
        return Err(Error::Parameter(format!("response time {t} outside (0, {}]", params.t)));
    }
    Ok(())
}

/// Frequency-domain response at time `t` on the frequency grid of `grid`.
pub fn assemble_control_response(
    params: &ControlParams,
    coeffs: &CoefficientSet,
    grid: &GridSpec,
    t: f64,
) -> Result<SpectralField> {
    let u = SynthesizedControl::new(*params, coeffs.g_pm.clone())?;
    control_response_spectral(&u, grid, t)
}

pub fn control_response_spectral(u: &SynthesizedControl, grid: &GridSpec, t: f64) -> Result<SpectralField> {
    let params = u.params();
    check_time(params, t)?;
    grid.validate()?;
    if t == 0.0 {
        return Ok(SpectralField::zeros(*grid, 0.0));
    }
    let m_count = params.m + 1;
    // a[i, m] = sum_p g_pm z_p(sigma1_i, t)
    let mut a = Array2::<Complex64>::zeros((grid.n1, m_count));
    for i in 0..grid.n1 {
        let s1 = grid.sigma1(i);
        for (p, pulse) in u.pulses().iter().enumerate() {
            let z = z_with_pulse(pulse, t, s1);
            if z.norm() == 0.0 {
                continue;
            }
            for m in 0..m_count {
                a[[i, m]] += z * u.g_pm()[[p, m]];
            }
        }
    }
    let mut f = Array2::<Complex64>::zeros((grid.n2, m_count));
    let mut buf = vec![Complex64::new(0.0, 0.0); m_count];
    for j in 0..grid.n2 {
        spectral_kernels(params, grid.sigma2(j), t, &mut buf);
        for m in 0..m_count {
            f[[j, m]] = buf[m];
        }
    }
    let mut values = a.dot(&f.t());
    values.mapv_inplace(|v| v * -SQRT_PI_OVER_2);
    SpectralField::new(*grid, values, t)
}

/// `Y(x, s) = sgn(x) erfc(|x| / (2 sqrt s))`, zero for `s <= 0`.
fn step_response(x: f64, s: f64) -> f64 {
    if s <= 0.0 || x == 0.0 {
        return 0.0;
    }
    x.signum() * erfc(x.abs() / (2.0 * s.sqrt()))
}

/// Physical-space response of the one-dimensional dipole system to `v_l^p`:
/// `y_p(x1, t) = l^(p+1) sum_j w_j [Y(x1, t - j/l) - Y(x1, t - (j+1)/l)]`.
///
/// The sum cancels heavily once `t` is well past the pulse support; use it
/// inside or just after the support and the spectral route elsewhere.
pub fn dipole_response(pulse: &Pulse, x1: f64, t: f64) -> f64 {
    let p = pulse.order();
    let l = pulse.resolution() as f64;
    let mut acc = 0.0;
    for j in 0..=p {
        let lo = j as f64 / l;
        if lo >= t {
            break;
        }
        let hi = (j + 1) as f64 / l;
        acc += pulse_weight(p, j) as f64 * (step_response(x1, t - lo) - step_response(x1, t - hi));
    }
    acc * pulse.amplitude()
}

/// Physical-space response at time `t` sampled on `grid` through the
/// closed-form dipole kernel.
pub fn control_response_physical(u: &SynthesizedControl, grid: &GridSpec, t: f64) -> Result<PhysicalField> {
    let params = u.params();
    check_time(params, t)?;
    grid.validate()?;
    if t == 0.0 {
        return Ok(PhysicalField::zeros(*grid, 0.0));
    }
    let m_count = params.m + 1;
    let mut a = Array2::<f64>::zeros((grid.n1, m_count));
    for i in 0..grid.n1 {
        let x1 = grid.x1(i);
        for (p, pulse) in u.pulses().iter().enumerate() {
            let y = dipole_response(pulse, x1, t);
            if y == 0.0 {
                continue;
            }
            for m in 0..m_count {
                a[[i, m]] += y * u.g_pm()[[p, m]];
            }
        }
    }
    let mut k = Array2::<f64>::zeros((grid.n2, m_count));
    let mut buf = vec![0.0; m_count];
    for j in 0..grid.n2 {
        control_kernels(params, grid.x2(j), t, &mut buf);
        for m in 0..m_count {
            k[[j, m]] = buf[m];
        }
    }
    let mut values = a.dot(&k.t());
    values.mapv_inplace(|v| v * -SQRT_PI_OVER_2);
    PhysicalField::new(*grid, values, t)
}
