//! Three-term upper bound on the terminal error of the example problem.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::ln_factorial;

use super::params::ControlParams;

pub const FROZEN_BASIS_CONSTANT: f64 = 2.622851155438146;
pub const FROZEN_TAIL_CONSTANT: f64 = 2.350732202502537;
pub const FROZEN_PULSE_CONSTANT: f64 = 15.31493739172921;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Truncation of the `x2` basis at order `M`.
    pub basis_truncation_term: f64,
    /// Truncation of the `x1` basis at order `N`.
    pub coefficient_tail_term: f64,
    /// Pulse resolution `l`.
    pub pulse_term: f64,
    pub total: f64,
    /// Whether the decimal constants for `(T, T*) = (2, 6)` were used.
    pub frozen: bool,
}

impl ErrorBudget {
    fn from_terms(a: f64, b: f64, c: f64, frozen: bool) -> Self {
        Self {
            basis_truncation_term: a,
            coefficient_tail_term: b,
            pulse_term: c,
            total: a + b + c,
            frozen,
        }
    }
}

fn tail_factor(n: usize) -> f64 {
    let k = (2 * n + 3) as f64;
    (-(k * std::f64::consts::LN_2) - 0.5 * ln_factorial(2 * n as u64 + 3)).exp()
}

/// Budget with the printed decimal constants for `(T, T*) = (2, 6)`;
/// the generic expression for any other pair.
pub fn error_budget(params: &ControlParams) -> Result<ErrorBudget> {
    params.validate()?;
    params.check_guard()?;
    if params.t == 2.0 && params.t_star == 6.0 {
        Ok(frozen_terms(params))
    } else {
        Ok(generic_terms(params))
    }
}

/// Budget from the generic expression in `(T, T*)`, regardless of the pair.
pub fn error_budget_generic(params: &ControlParams) -> Result<ErrorBudget> {
    params.validate()?;
    params.check_guard()?;
    Ok(generic_terms(params))
}

fn frozen_terms(params: &ControlParams) -> ErrorBudget {
    ErrorBudget::from_terms(
        FROZEN_BASIS_CONSTANT * 0.5f64.powf(params.m as f64 / 2.0),
        FROZEN_TAIL_CONSTANT * tail_factor(params.n),
        FROZEN_PULSE_CONSTANT / params.l as f64,
        true,
    )
}

fn generic_terms(params: &ControlParams) -> ErrorBudget {
    let (t, ts) = (params.t, params.t_star);
    let dt = params.delta_t();
    let s = ts + t;
    let pi = std::f64::consts::PI;
    let lead = (pi * ts / 2.0).powf(0.25) * (ts * ts / (ts * ts - t * t)).exp() / t.sqrt();
    let basis = lead * (-0.375f64).exp() * (dt / s).powf((params.m as f64 + 1.0) / 2.0);
    let tail = lead * ((0.25f64).cosh() / std::f64::consts::E).sqrt() * tail_factor(params.n);
    let pulse = lead * 11.0 * (0.875f64).exp()
        / (t.sqrt() * (32.0 * pi.powi(3)).powf(0.25) * (s.sqrt() - dt.sqrt()))
        / params.l as f64;
    ErrorBudget::from_terms(basis, tail, pulse, false)
}
