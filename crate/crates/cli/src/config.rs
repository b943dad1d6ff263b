//! Run configuration: a JSON file merged under command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use heatctl::control::{default_t_star, ControlParams};
use heatctl::simulation::{CoefficientRoute, ExperimentConfig, StateSource};
use heatctl::GridSpec;
use serde::{Deserialize, Serialize};

pub const DEFAULT_T: f64 = 2.0;
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_RESOLUTION: u32 = 10;
pub const DEFAULT_LEVELS: usize = 6;
pub const DEFAULT_MAX_ORDER: usize = 12;
pub const DEFAULT_ALPHAS: [f64; 2] = [2.0, 6.0];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[serde(rename = "T_star")]
    pub t_star: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub l: Option<u32>,
}

impl ParamOverrides {
    /// Fields set in `top` win over `self`.
    pub fn overlay(&self, top: &ParamOverrides) -> ParamOverrides {
        ParamOverrides {
            t: top.t.or(self.t),
            t_star: top.t_star.or(self.t_star),
            n: top.n.or(self.n),
            m: top.m.or(self.m),
            l: top.l.or(self.l),
        }
    }

    pub fn resolve(&self) -> Result<ControlParams> {
        let t = self.t.unwrap_or(DEFAULT_T);
        Ok(ControlParams::new(
            t,
            self.t_star.unwrap_or_else(|| default_t_star(t)),
            self.n.unwrap_or(DEFAULT_ORDER),
            self.m.unwrap_or(DEFAULT_ORDER),
            self.l.unwrap_or(DEFAULT_RESOLUTION),
        )?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridOverrides {
    /// Points per axis.
    pub n: Option<usize>,
    /// Half-width of the square domain.
    pub halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Export {
    pub csv: bool,
    pub json: bool,
    pub plot_scripts: bool,
}

impl Default for Export {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
            plot_scripts: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisCheckConfig {
    pub max_order: Option<usize>,
    pub alphas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub levels: Option<usize>,
    pub t: Option<f64>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamOverrides,
    pub grid: GridOverrides,
    pub initial: Option<StateSource>,
    pub target: Option<StateSource>,
    pub coefficients: Option<CoefficientRoute>,
    pub trace_epsilons: Option<Vec<f64>>,
    pub time_probes: Option<Vec<f64>>,
    pub admissibility_samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub quiet: Option<bool>,
    pub export: Export,
    pub basis_check: BasisCheckConfig,
    pub counterexample: CounterexampleConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let d = GridSpec::default();
        let h = self.grid.halfwidth.unwrap_or(d.halfwidth_x1);
        let n = self.grid.n.unwrap_or(d.n1);
        Ok(GridSpec::square(h, n)?)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let params = self.params.resolve()?;
        let mut cfg = ExperimentConfig::example(params).with_grid(self.grid()?);
        if let Some(s) = &self.initial {
            cfg.initial = s.clone();
        }
        if let Some(s) = &self.target {
            cfg.target = s.clone();
        }
        if let Some(r) = self.coefficients {
            cfg.coefficients = r;
        }
        cfg.trace_epsilons = self.trace_epsilons.clone();
        cfg.time_probes = self.time_probes.clone();
        cfg.admissibility_samples = self.admissibility_samples;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `example`, `zero`, or a path to a half-plane CSV.
pub fn parse_state(s: &str) -> Result<StateSource, String> {
    Ok(match s {
        "example" => StateSource::Example,
        "zero" => StateSource::Zero,
        path => StateSource::File(PathBuf::from(path)),
    })
}

pub fn parse_route(s: &str) -> Result<CoefficientRoute, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned()))
        .map_err(|_| format!("unknown coefficient route '{s}' (auto, closed-form, quadrature, grid, zero)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_coarse_example() {
        let cfg = RunConfig::default().experiment().unwrap();
        assert_eq!(cfg.params, ControlParams::new(2.0, 6.0, 3, 3, 10).unwrap());
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!(cfg.initial, StateSource::Example);
    }

    #[test]
    fn overlay_prefers_the_top_layer() {
        let file = ParamOverrides {
            n: Some(6),
            l: Some(50),
            ..Default::default()
        };
        let flags = ParamOverrides {
            l: Some(200),
            ..Default::default()
        };
        let p = file.overlay(&flags).resolve().unwrap();
        assert_eq!((p.n, p.m, p.l), (6, 3, 200));
    }

    #[test]
    fn file_format() {
        let text = r#"{"params": {"N": 6, "M": 6, "l": 200}, "grid": {"n": 256}, "target": "zero",
                       "export": {"plot_scripts": false}}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.params.m, Some(6));
        assert_eq!(cfg.grid.n, Some(256));
        assert_eq!(cfg.target, Some(StateSource::Zero));
        assert!(cfg.export.csv && !cfg.export.plot_scripts);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_state("zero").unwrap(), StateSource::Zero);
        assert_eq!(parse_state("w.csv").unwrap(), StateSource::File("w.csv".into()));
        assert_eq!(parse_route("closed-form").unwrap(), CoefficientRoute::ClosedForm);
        assert!(parse_route("fast").is_err());
    }
}
