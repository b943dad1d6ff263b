use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::MAX_HERMITE_INDEX;

/// Largest pulse order (and hence `N`) accepted by the coefficient algebra.
pub const MAX_PULSE_ORDER: usize = 60;

/// Control horizon, auxiliary scale, truncation orders and pulse resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub l: u32,
}

impl ControlParams {
    pub fn new(t: f64, t_star: f64, n: usize, m: usize, l: u32) -> Result<Self> {
        let p = Self { t, t_star, n, m, l };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `T* = 3 T`.
    pub fn with_default_scale(t: f64, n: usize, m: usize, l: u32) -> Result<Self> {
        Self::new(t, default_t_star(t), n, m, l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Parameter(format!(
                "control time T must be positive, got {}",
                self.t
            )));
        }
        if !(self.t_star > self.t && self.t_star.is_finite()) {
            return Err(Error::Parameter(format!(
                "auxiliary scale must satisfy T* > T, got T = {}, T* = {}",
                self.t, self.t_star
            )));
        }
        if self.l == 0 {
            return Err(Error::Parameter("pulse resolution l must be positive".into()));
        }
        if self.n > MAX_PULSE_ORDER {
            return Err(Error::Domain(format!(
                "N = {} exceeds the supported maximum {MAX_PULSE_ORDER}",
                self.n
            )));
        }
        if 2 * self.n + 1 > MAX_HERMITE_INDEX || self.m > MAX_HERMITE_INDEX {
            return Err(Error::Domain(format!(
                "truncation (N, M) = ({}, {}) exceeds the Hermite index limit",
                self.n, self.m
            )));
        }
        Ok(())
    }

    pub fn delta_t(&self) -> f64 {
        self.t_star - self.t
    }

    /// Smallest admissible resolution `2 (N + 2) / T` for the error budget.
    pub fn min_resolution(&self) -> f64 {
        2.0 * (self.n as f64 + 2.0) / self.t
    }

    pub fn guard_satisfied(&self) -> bool {
        self.l as f64 >= self.min_resolution()
    }

    pub fn check_guard(&self) -> Result<()> {
        if self.guard_satisfied() {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "pulse resolution guard l >= 2(N+2)/T violated: l = {}, N = {}, T = {} requires l >= {}",
                self.l,
                self.n,
                self.t,
                self.min_resolution()
            )))
        }
    }

    /// End of the support of the highest-order pulse, `(N + 1) / l`.
    pub fn pulse_support_end(&self) -> f64 {
        (self.n as f64 + 1.0) / self.l as f64
    }
}

pub fn default_t_star(t: f64) -> f64 {
    3.0 * t
}
