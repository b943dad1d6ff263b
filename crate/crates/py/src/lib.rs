//! Python bindings: parameters, basis functions, spectral identities,
//! control synthesis, experiments and the counterexample table.

use heatctl::control::{self, CoefficientSet, ControlParams, ErrorBudget, SynthesizedControl};
use heatctl::simulation::{self, ExperimentConfig, ExperimentReport};
use heatctl::{BasisSpec, GridSpec};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: heatctl::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "ControlParams", module = "heatctl", frozen)]
pub struct PyControlParams {
    inner: ControlParams,
}

#[pymethods]
impl PyControlParams {
    /// `t_star` defaults to `3 t`.
    #[new]
    #[pyo3(signature = (t = 2.0, t_star = None, n = 3, m = 3, l = 10))]
    fn new(t: f64, t_star: Option<f64>, n: usize, m: usize, l: u32) -> PyResult<Self> {
        let inner =
            ControlParams::new(t, t_star.unwrap_or_else(|| control::default_t_star(t)), n, m, l).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter(T)]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter(T_star)]
    fn t_star(&self) -> f64 {
        self.inner.t_star
    }

    #[getter(N)]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter(M)]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn l(&self) -> u32 {
        self.inner.l
    }

    fn min_resolution(&self) -> f64 {
        self.inner.min_resolution()
    }

    fn guard_satisfied(&self) -> bool {
        self.inner.guard_satisfied()
    }

    /// Raises `ValueError` when `l < 2 (N + 2) / T`.
    fn check_guard(&self) -> PyResult<()> {
        self.inner.check_guard().map_err(err)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ControlParams(T={}, T_star={}, N={}, M={}, l={})",
            p.t, p.t_star, p.n, p.m, p.l
        )
    }
}

#[pyclass(name = "ErrorBudget", module = "heatctl", frozen)]
pub struct PyErrorBudget {
    inner: ErrorBudget,
}

#[pymethods]
impl PyErrorBudget {
    #[getter]
    fn basis_truncation_term(&self) -> f64 {
        self.inner.basis_truncation_term
    }

    #[getter]
    fn coefficient_tail_term(&self) -> f64 {
        self.inner.coefficient_tail_term
    }

    #[getter]
    fn pulse_term(&self) -> f64 {
        self.inner.pulse_term
    }

    #[getter]
    fn total(&self) -> f64 {
        self.inner.total
    }

    #[getter]
    fn frozen(&self) -> bool {
        self.inner.frozen
    }

    fn __repr__(&self) -> String {
        format!("ErrorBudget(total={:.16e})", self.inner.total)
    }
}

#[pyclass(name = "SynthesizedControl", module = "heatctl", frozen)]
pub struct PyControl {
    inner: SynthesizedControl,
}

#[pymethods]
impl PyControl {
    /// `u(x2, xi)` for `0 <= xi <= T`.
    fn eval(&self, x2: f64, xi: f64) -> PyResult<f64> {
        self.inner.eval(x2, xi).map_err(err)
    }

    fn profile(&self, x2: Vec<f64>, xi: f64) -> PyResult<Vec<f64>> {
        self.inner.profile(&x2, xi).map_err(err)
    }

    #[getter]
    fn g_pm(&self) -> Vec<Vec<f64>> {
        self.inner.g_pm().outer_iter().map(|r| r.to_vec()).collect()
    }

    #[getter]
    fn params(&self) -> PyControlParams {
        PyControlParams {
            inner: *self.inner.params(),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: SynthesizedControl::from_json(text).map_err(err)?,
        })
    }
}

#[pyclass(name = "ExperimentReport", module = "heatctl", frozen)]
pub struct PyReport {
    inner: ExperimentReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn measured_error(&self) -> f64 {
        self.inner.measured_error
    }

    #[getter]
    fn budget(&self) -> Option<PyErrorBudget> {
        self.inner.budget.map(|inner| PyErrorBudget { inner })
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    #[getter]
    fn sup_control(&self) -> f64 {
        self.inner.sup_control
    }

    #[getter]
    fn l2_of_sup(&self) -> f64 {
        self.inner.l2_of_sup
    }

    /// `(name, lhs, rhs, pass)` for every gating check.
    #[getter]
    fn checks(&self) -> Vec<(String, f64, f64, bool)> {
        self.inner
            .bound_checks
            .iter()
            .map(|c| (c.name.clone(), c.lhs, c.rhs, c.pass))
            .collect()
    }

    /// `(epsilon, t, error)` for every boundary-trace sample.
    #[getter]
    fn trace_errors(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .trace_errors
            .iter()
            .map(|e| (e.epsilon, e.t, e.error))
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Physicists' Hermite polynomial.
#[pyfunction]
fn hermite(n: usize, x: f64) -> PyResult<f64> {
    heatctl::hermite_eval(n, x).map_err(err)
}

#[pyfunction]
fn psi_scaled(alpha: f64, n: usize, mu: f64) -> PyResult<f64> {
    let spec = BasisSpec::new(alpha, n).map_err(err)?;
    heatctl::psi_scaled_eval(&spec, n, mu).map_err(err)
}

/// Unitary Fourier image of the scaled Hermite function.
#[pyfunction]
fn psi_hat(alpha: f64, n: usize, lam: f64) -> PyResult<Complex64> {
    let spec = BasisSpec::new(alpha, n).map_err(err)?;
    heatctl::psi_hat_eval(&spec, n, lam).map_err(err)
}

#[pyfunction]
fn pulse(p: usize, l: u32, xi: f64) -> PyResult<f64> {
    control::pulse_eval(p, l, xi).map_err(err)
}

#[pyfunction]
fn delta_moment_residual(p: usize, l: u32, q: Vec<f64>) -> PyResult<f64> {
    control::delta_moment_residual(p, l, &q).map_err(err)
}

/// `phi^l_{2p+1}(lam)`.
#[pyfunction]
fn phi_l(p: usize, l: u32, t: f64, lam: f64) -> Complex64 {
    control::phi_l_eval(p, l, t, lam)
}

#[pyfunction]
fn z_terminal(p: usize, l: u32, t: f64, sigma1: f64) -> PyResult<Complex64> {
    control::z_terminal(p, l, t, sigma1).map_err(err)
}

#[pyfunction]
fn error_budget(params: PyRef<'_, PyControlParams>) -> PyResult<PyErrorBudget> {
    Ok(PyErrorBudget {
        inner: control::error_budget(&params.inner).map_err(err)?,
    })
}

/// Control for the built-in example states with closed-form coefficients.
#[pyfunction]
fn synthesize_example(params: PyRef<'_, PyControlParams>) -> PyResult<PyControl> {
    let coeffs = CoefficientSet::example(&params.inner).map_err(err)?;
    Ok(PyControl {
        inner: control::synthesize(&params.inner, &coeffs).map_err(err)?,
    })
}

/// Full experiment for the built-in example on a square grid.
#[pyfunction]
#[pyo3(signature = (params, grid_n = 512, halfwidth = 40.0))]
fn run_example(
    py: Python<'_>,
    params: PyRef<'_, PyControlParams>,
    grid_n: usize,
    halfwidth: f64,
) -> PyResult<PyReport> {
    let grid = GridSpec::square(halfwidth, grid_n).map_err(err)?;
    let cfg = ExperimentConfig::example(params.inner).with_grid(grid);
    let report = py
        .detach(|| simulation::run_experiment(&cfg).map(|o| o.report))
        .map_err(err)?;
    Ok(PyReport { inner: report })
}

/// `(level, inner_radius, norm, increment)` rows.
#[pyfunction]
#[pyo3(signature = (t = 2.0, levels = 6))]
fn counterexample(t: f64, levels: usize) -> PyResult<Vec<(usize, f64, f64, f64)>> {
    let r = simulation::counterexample_norms(t, levels).map_err(err)?;
    Ok(r.rows
        .iter()
        .map(|row| (row.level, row.inner_radius, row.norm, row.increment))
        .collect())
}

#[pymodule]
#[pyo3(name = "heatctl")]
fn heatctl_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyControlParams>()?;
    m.add_class::<PyErrorBudget>()?;
    m.add_class::<PyControl>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(psi_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(psi_hat, m)?)?;
    m.add_function(wrap_pyfunction!(pulse, m)?)?;
    m.add_function(wrap_pyfunction!(delta_moment_residual, m)?)?;
    m.add_function(wrap_pyfunction!(phi_l, m)?)?;
    m.add_function(wrap_pyfunction!(z_terminal, m)?)?;
    m.add_function(wrap_pyfunction!(error_budget, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_example, m)?)?;
    m.add_function(wrap_pyfunction!(run_example, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    Ok(())
}
