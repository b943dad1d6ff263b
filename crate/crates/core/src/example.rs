//! Closed forms of the built-in example problem.
//!
//! Initial and target states are odd in `x1`:
//!
//! ```text
//! W0(x) = -9/8 e^(-5/8) (8 pi T^3)^(-1/4) x1 exp(-|x|^2 / (8T))
//! WT(x) = -e^(-5/8) (8 pi T^3)^(-1/4) (exp(-|x|^2/(4T) - x2/sqrt(T)) sinh(x1 / (2 sqrt T))
//!                                    + x1/2 exp(-|x|^2 / (12 T)))
//! ```

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceExample {
    pub t: f64,
}

impl Default for ReferenceExample {
    fn default() -> Self {
        Self { t: 2.0 }
    }
}

impl ReferenceExample {
    pub fn new(t: f64) -> Self {
        Self { t }
    }

    fn amplitude(&self) -> f64 {
        -(-0.625f64).exp() * (8.0 * std::f64::consts::PI * self.t.powi(3)).powf(-0.25)
    }

    pub fn initial(&self, x1: f64, x2: f64) -> f64 {
        let r2 = x1 * x1 + x2 * x2;
        1.125 * self.amplitude() * x1 * (-r2 / (8.0 * self.t)).exp()
    }

    /// Heat evolution of the initial state to time `s`:
    /// `x1 exp(-|x|^2/(4a))` with `a = 2T` evolves to
    /// `x1 (a / (a + s))^2 exp(-|x|^2 / (4 (a + s)))`.
    pub fn free_evolution(&self, x1: f64, x2: f64, s: f64) -> f64 {
        let a = 2.0 * self.t;
        let r2 = x1 * x1 + x2 * x2;
        1.125 * self.amplitude() * x1 * (a / (a + s)).powi(2) * (-r2 / (4.0 * (a + s))).exp()
    }

    /// Residual `W^T - W_0(., T)`.
    pub fn residual(&self, x1: f64, x2: f64) -> f64 {
        let r2 = x1 * x1 + x2 * x2;
        let st = self.t.sqrt();
        self.amplitude() * (-r2 / (4.0 * self.t) - x2 / st).exp() * (x1 / (2.0 * st)).sinh()
    }

    pub fn target(&self, x1: f64, x2: f64) -> f64 {
        self.residual(x1, x2) + self.free_evolution(x1, x2, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_evolution_at_t_matches_closed_form() {
        let ex = ReferenceExample::default();
        let t = ex.t;
        let c = -(-0.625f64).exp() * (8.0 * std::f64::consts::PI * t.powi(3)).powf(-0.25);
        for &(x1, x2) in &[(0.3, -1.0), (2.2, 4.0), (-1.5, 0.5)] {
            let r2: f64 = x1 * x1 + x2 * x2;
            let expected = c * x1 / 2.0 * (-r2 / (12.0 * t)).exp();
            assert_relative_eq!(ex.free_evolution(x1, x2, t), expected, max_relative = 1e-14);
        }
        assert_eq!(ex.free_evolution(0.7, 0.1, 0.0), ex.initial(0.7, 0.1));
    }

    #[test]
    fn states_are_odd() {
        let ex = ReferenceExample::default();
        assert_eq!(ex.target(1.1, 0.4), -ex.target(-1.1, 0.4));
        assert_eq!(ex.initial(1.1, 0.4), -ex.initial(-1.1, 0.4));
    }
}
