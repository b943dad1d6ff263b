use serde::{Deserialize, Serialize};

use crate::control::coefficients::{compute_wnm_matrix, CoefficientSet, Provenance, ResidualTarget};
use crate::control::response::{control_response_physical, control_response_spectral};
use crate::control::synthesis::{admissibility_profile, synthesize, AdmissibilityProfile};
use crate::control::{error_budget, ControlParams, ErrorBudget, SynthesizedControl};
use crate::error::{Error, Result};
use crate::example::ReferenceExample;
use crate::field::{boundary_trace, odd_extend, GridSpec, PhysicalField, SpectralField};
use crate::io::read_half_plane_csv;
use crate::numeric::CompensatedSum;
use crate::quadrature::TensorRule;
use crate::transform::{propagate_free, SpectralPlan};

use super::config::{CoefficientRoute, ExperimentConfig, StateSource, BOUND_RTOL, GRID_SLACK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundCheck {
    /// `lhs <= rhs (1 + 1e-9) + slack`.
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let pass = lhs <= rhs * (1.0 + BOUND_RTOL) + slack;
        Self {
            name: name.into(),
            lhs,
            rhs,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceError {
    pub epsilon: f64,
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub params: ControlParams,
    pub grid: GridSpec,
    pub coefficient_route: CoefficientRoute,
    pub measured_error: f64,
    /// Present for the built-in example states when the resolution guard holds.
    pub budget: Option<ErrorBudget>,
    pub grid_slack: f64,
    pub trace_errors: Vec<TraceError>,
    /// Checks that decide `passed`.
    pub bound_checks: Vec<BoundCheck>,
    /// Recorded but not gating: trace monotonicity depends on whether the
    /// offsets resolve the boundary layer at each probe.
    pub diagnostics: Vec<BoundCheck>,
    pub sup_control: f64,
    pub l2_of_sup: f64,
    pub passed: bool,
}

/// Report together with the fields it was computed from.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub target: PhysicalField,
    pub end_state: PhysicalField,
    pub difference: PhysicalField,
    pub control: SynthesizedControl,
    pub coefficients: CoefficientSet,
    pub admissibility: AdmissibilityProfile,
}

/// Prepared experiment: states, coefficients and control on one grid.
pub struct Experiment {
    cfg: ExperimentConfig,
    plan: SpectralPlan,
    initial: PhysicalField,
    initial_spectrum: SpectralField,
    target: PhysicalField,
    coefficients: CoefficientSet,
    control: SynthesizedControl,
}

fn load_state(
    source: &StateSource,
    grid: &GridSpec,
    example: &ReferenceExample,
    initial: bool,
) -> Result<PhysicalField> {
    match source {
        StateSource::Example => PhysicalField::from_fn(*grid, 0.0, |a, b| {
            if initial {
                example.initial(a, b)
            } else {
                example.target(a, b)
            }
        }),
        StateSource::Zero => Ok(PhysicalField::zeros(*grid, 0.0)),
        StateSource::File(path) => {
            let half = read_half_plane_csv(path, grid)?;
            odd_extend(&half, &vec![0.0; grid.n2])
        }
    }
}

impl Experiment {
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let params = cfg.params;
        let grid = cfg.grid;
        let example = ReferenceExample::new(params.t);
        let plan = SpectralPlan::new(grid)?;
        let initial = load_state(&cfg.initial, &grid, &example, true)?;
        let target = load_state(&cfg.target, &grid, &example, false)?.with_time_tag(params.t);
        let initial_spectrum = plan.forward(&initial)?;
        let coefficients = match cfg.resolved_route() {
            CoefficientRoute::ClosedForm => CoefficientSet::example(&params)?,
            CoefficientRoute::Quadrature => {
                let f = move |a: f64, b: f64| example.residual(a, b);
                let rule = TensorRule::default_for(params.t, params.t_star)?;
                let w = compute_wnm_matrix(&ResidualTarget::Callback(&f), &params, Some(&rule))?;
                CoefficientSet::from_targets(&params, w, Provenance::Quadrature)?
            }
            CoefficientRoute::Grid => {
                let free = plan.inverse(&propagate_free(&initial_spectrum, params.t)?)?;
                let residual = target.sub(&free)?;
                let w = compute_wnm_matrix(&ResidualTarget::Field(&residual), &params, None)?;
                CoefficientSet::from_targets(&params, w, Provenance::Grid)?
            }
            CoefficientRoute::Zero => CoefficientSet::zero(&params)?,
            CoefficientRoute::Auto => unreachable!("route resolved above"),
        };
        let control = synthesize(&params, &coefficients)?;
        Ok(Self {
            cfg: cfg.clone(),
            plan,
            initial,
            initial_spectrum,
            target,
            coefficients,
            control,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn control(&self) -> &SynthesizedControl {
        &self.control
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coefficients
    }

    pub fn initial(&self) -> &PhysicalField {
        &self.initial
    }

    pub fn target(&self) -> &PhysicalField {
        &self.target
    }

    /// Free evolution `W_0(., t)` in frequency space.
    pub fn free_spectrum(&self, t: f64) -> Result<SpectralField> {
        propagate_free(&self.initial_spectrum, t)
    }

    pub fn free_state(&self, t: f64) -> Result<PhysicalField> {
        self.plan.inverse(&self.free_spectrum(t)?)
    }

    /// Control response `W_u(., t)` in frequency space.
    pub fn control_spectrum(&self, t: f64) -> Result<SpectralField> {
        control_response_spectral(&self.control, &self.cfg.grid, t)
    }

    /// Control response in physical space. Inside the pulse support the
    /// closed-form dipole kernel is sampled directly, which avoids the
    /// ringing of a truncated spectrum; afterwards the spectral route is used.
    pub fn control_state(&self, t: f64) -> Result<PhysicalField> {
        if t < self.cfg.params.pulse_support_end() {
            control_response_physical(&self.control, &self.cfg.grid, t)
        } else {
            self.plan.inverse(&self.control_spectrum(t)?)
        }
    }

    pub fn state(&self, t: f64) -> Result<PhysicalField> {
        self.free_state(t)?.add(&self.control_state(t)?)
    }

    /// `||trace_eps W(., t) - u(., t-)||` over the `x2` grid for every probe and offset.
    ///
    /// The state at `t` only sees the control on `[0, t)`, so the comparison
    /// uses the left limit, which differs from `u(., t)` at pulse breakpoints.
    pub fn trace_consistency(&self) -> Result<Vec<TraceError>> {
        let eps = self.cfg.epsilons();
        if eps.len() < 2 {
            return Err(Error::Parameter("trace consistency needs at least two offsets".into()));
        }
        let x2 = self.cfg.grid.x2_coords();
        let h2 = self.cfg.grid.h2();
        let mut out = Vec::new();
        for t in self.cfg.probes() {
            let w = self.state(t)?;
            let u = self.control.profile(&x2, left_limit(t))?;
            for &e in &eps {
                let tr = boundary_trace(&w, e)?;
                let s: CompensatedSum = tr.iter().zip(&u).map(|(a, b)| (a - b) * (a - b)).collect();
                out.push(TraceError {
                    epsilon: e,
                    t,
                    error: (s.value() * h2).sqrt(),
                });
            }
        }
        Ok(out)
    }

    pub fn admissibility(&self) -> Result<AdmissibilityProfile> {
        admissibility_profile(&self.control, &self.cfg.grid.x2_coords(), self.cfg.xi_samples())
    }

    /// Free-evolution contraction and the control-response estimate
    /// `||W_u(., t)|| <= 2 t^(1/4) ||sup_t |u| ||` at every probe.
    pub fn response_bound_checks(&self, profile: &AdmissibilityProfile) -> Result<Vec<BoundCheck>> {
        let w0_norm = self.initial.l2_norm();
        let mut out = Vec::new();
        for t in self.cfg.probes() {
            let free = self.free_spectrum(t)?.l2_norm();
            out.push(BoundCheck::new(
                format!("free-contraction t={t}"),
                free,
                w0_norm,
                GRID_SLACK,
            ));
            let resp = self.control_spectrum(t)?.l2_norm();
            out.push(BoundCheck::new(
                format!("control-response t={t}"),
                resp,
                2.0 * t.powf(0.25) * profile.l2_of_sup,
                GRID_SLACK,
            ));
        }
        Ok(out)
    }

    pub fn run(&self) -> Result<ExperimentOutcome> {
        let params = self.cfg.params;
        let free = self.free_state(params.t)?;
        let response_spec = self.control_spectrum(params.t)?;
        let response = self.plan.inverse(&response_spec)?;
        let end_state = free.add(&response)?;
        let difference = self.target.sub(&end_state)?;
        let measured_error = difference.l2_norm();

        let example_states = self.cfg.initial == StateSource::Example && self.cfg.target == StateSource::Example;
        let budget = if example_states && params.guard_satisfied() {
            Some(error_budget(&params)?)
        } else {
            None
        };
        let mut checks = Vec::new();
        if let Some(b) = &budget {
            checks.push(BoundCheck::new("budget", measured_error, b.total, GRID_SLACK));
        }
        let scale = response_spec.l2_norm().max(1.0);
        checks.push(BoundCheck::new(
            "parseval",
            (response_spec.l2_norm() - response.l2_norm()).abs(),
            1e-10 * scale,
            0.0,
        ));
        checks.push(BoundCheck::new("odd-symmetry", end_state.odd_defect(), 1e-10, 0.0));
        let admissibility = self.admissibility()?;
        checks.extend(self.response_bound_checks(&admissibility)?);
        let trace_errors = self.trace_consistency()?;
        let diagnostics = trace_monotonicity(&trace_errors);

        let passed = checks.iter().all(|c| c.pass);
        let report = ExperimentReport {
            params,
            grid: self.cfg.grid,
            coefficient_route: self.cfg.resolved_route(),
            measured_error,
            budget,
            grid_slack: GRID_SLACK,
            trace_errors,
            bound_checks: checks,
            diagnostics,
            sup_control: admissibility.sup_norm,
            l2_of_sup: admissibility.l2_of_sup,
            passed,
        };
        Ok(ExperimentOutcome {
            report,
            target: self.target.clone(),
            end_state,
            difference,
            control: self.control.clone(),
            coefficients: self.coefficients.clone(),
            admissibility,
        })
    }
}

fn left_limit(t: f64) -> f64 {
    (t - 1e-9 * t.max(1.0)).max(0.0)
}

/// One check per probe: errors must not grow as the offset shrinks.
/// Offsets are taken in the order given, which is expected to be decreasing.
pub fn trace_monotonicity(errors: &[TraceError]) -> Vec<BoundCheck> {
    let mut probes: Vec<f64> = errors.iter().map(|e| e.t).collect();
    probes.dedup();
    probes
        .into_iter()
        .map(|t| {
            let seq: Vec<f64> = errors.iter().filter(|e| e.t == t).map(|e| e.error).collect();
            let worst = seq.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            BoundCheck::new(format!("trace-decreasing t={t}"), worst, 0.0, GRID_SLACK)
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    Experiment::prepare(cfg)?.run()
}

pub fn trace_consistency(cfg: &ExperimentConfig) -> Result<Vec<TraceError>> {
    Experiment::prepare(cfg)?.trace_consistency()
}

pub fn response_bound_checks(cfg: &ExperimentConfig) -> Result<Vec<BoundCheck>> {
    let exp = Experiment::prepare(cfg)?;
    let profile = exp.admissibility()?;
    exp.response_bound_checks(&profile)
}
