use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::control::ControlParams;
use crate::error::{Error, Result};
use crate::field::GridSpec;

/// Empirical bound on the gap between discrete grid norms at the default
/// resolution and the continuum norms the analytic bounds refer to.
pub const GRID_SLACK: f64 = 1e-3;

/// Relative tolerance applied to the right-hand side of every bound check.
pub const BOUND_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSource {
    /// Built-in example state.
    Example,
    Zero,
    /// CSV of half-plane samples (`x1,x2,value`, `x1 > 0` rows of the grid).
    File(PathBuf),
}

/// How the target coefficients are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientRoute {
    /// Closed form when both states are the built-in example, grid otherwise.
    #[default]
    Auto,
    ClosedForm,
    /// Tensor Gauss–Legendre on the closed-form residual (example only).
    Quadrature,
    /// Midpoint rule on the sampled residual.
    Grid,
    /// All-zero coefficients.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ControlParams,
    #[serde(default)]
    pub grid: GridSpec,
    pub initial: StateSource,
    pub target: StateSource,
    #[serde(default)]
    pub coefficients: CoefficientRoute,
    #[serde(default)]
    pub trace_epsilons: Option<Vec<f64>>,
    #[serde(default)]
    pub time_probes: Option<Vec<f64>>,
    /// Time samples for the admissibility profile; defaults to `4 (N + 1) l`.
    #[serde(default)]
    pub admissibility_samples: Option<usize>,
}

impl ExperimentConfig {
    /// Built-in example at the default grid.
    pub fn example(params: ControlParams) -> Self {
        Self {
            params,
            grid: GridSpec::default(),
            initial: StateSource::Example,
            target: StateSource::Example,
            coefficients: CoefficientRoute::Auto,
            trace_epsilons: None,
            time_probes: None,
            admissibility_samples: None,
        }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = grid;
        self
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.trace_epsilons.clone().unwrap_or_else(|| {
            let h = self.grid.h1();
            vec![4.0 * h, 2.0 * h, h]
        })
    }

    pub fn probes(&self) -> Vec<f64> {
        self.time_probes.clone().unwrap_or_else(|| {
            let t = self.params.t;
            vec![t / 4.0, t / 2.0, t]
        })
    }

    pub fn xi_samples(&self) -> usize {
        self.admissibility_samples
            .unwrap_or(4 * (self.params.n + 1) * self.params.l as usize)
    }

    pub fn resolved_route(&self) -> CoefficientRoute {
        match self.coefficients {
            CoefficientRoute::Auto => {
                if self.initial == StateSource::Example && self.target == StateSource::Example {
                    CoefficientRoute::ClosedForm
                } else {
                    CoefficientRoute::Grid
                }
            }
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        let t = self.params.t;
        if let Some(bad) = self.probes().iter().find(|s| !(**s > 0.0 && **s <= t)) {
            return Err(Error::Parameter(format!("time probe {bad} outside (0, {t}]")));
        }
        let half = 0.5 * self.grid.h1();
        if let Some(bad) = self.epsilons().iter().find(|e| !(**e >= half * (1.0 - 1e-12))) {
            return Err(Error::Parameter(format!(
                "trace offset {bad} is below half a cell width ({half})"
            )));
        }
        let example_only = matches!(
            self.coefficients,
            CoefficientRoute::ClosedForm | CoefficientRoute::Quadrature
        );
        if example_only && (self.initial != StateSource::Example || self.target != StateSource::Example) {
            return Err(Error::Parameter(
                "closed-form and quadrature coefficients require the built-in example states".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let cfg = ExperimentConfig::example(ControlParams::new(2.0, 6.0, 3, 3, 10).unwrap());
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"initial\":\"example\""));
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let file: StateSource = serde_json::from_str(r#"{"file": "w.csv"}"#).unwrap();
        assert_eq!(file, StateSource::File("w.csv".into()));
    }

    #[test]
    fn defaults_and_validation() {
        let mut cfg = ExperimentConfig::example(ControlParams::new(2.0, 6.0, 3, 3, 10).unwrap());
        assert_eq!(cfg.probes(), vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.resolved_route(), CoefficientRoute::ClosedForm);
        cfg.time_probes = Some(vec![2.5]);
        assert!(cfg.validate().is_err());
        cfg.time_probes = None;
        cfg.trace_epsilons = Some(vec![1e-4]);
        assert!(cfg.validate().is_err());
        cfg.trace_epsilons = None;
        cfg.target = StateSource::Zero;
        assert_eq!(cfg.resolved_route(), CoefficientRoute::Grid);
        cfg.coefficients = CoefficientRoute::ClosedForm;
        assert!(cfg.validate().is_err());
    }
}
