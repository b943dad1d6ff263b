//! Orthonormality and Fourier-image suites for the scaled Hermite basis.

use anyhow::Result;
use heatctl::quadrature::QuadratureRule;
use heatctl::{psi_hat_eval, BasisSpec};
use serde::{Deserialize, Serialize};

pub const ORTHONORMALITY_TOL: f64 = 1e-8;
pub const TRANSFORM_TOL: f64 = 1e-10;

/// Frequencies in units of `1 / sqrt(2 alpha)`.
const FREQUENCIES: [f64; 6] = [-2.3, -1.1, 0.0, 0.6, 1.9, 3.2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub invariant: String,
    pub alpha: f64,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisCheckReport {
    pub max_order: usize,
    pub alphas: Vec<f64>,
    pub results: Vec<InvariantResult>,
    pub passed: bool,
}

impl BasisCheckReport {
    /// `invariant (alpha=a)` for every failing entry.
    pub fn failed_invariants(&self) -> Vec<String> {
        self.results
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{} (alpha={})", r.invariant, r.alpha))
            .collect()
    }
}

struct Sampled {
    rule: QuadratureRule,
    /// `values[k][n] = psi_n(node_k)`.
    values: Vec<Vec<f64>>,
}

fn sample(spec: &BasisSpec, normalization: f64) -> Result<Sampled> {
    let s = (2.0 * spec.alpha()).sqrt();
    let k = spec.max_index() as f64;
    let rule = QuadratureRule::gauss_legendre(400 + 20 * spec.max_index(), ((2.0 * k + 1.0).sqrt() + 10.0) * s)?;
    let values = rule
        .nodes()
        .iter()
        .map(|&x| spec.eval_all(x).into_iter().map(|v| v * normalization).collect())
        .collect();
    Ok(Sampled { rule, values })
}

fn orthonormality_defect(s: &Sampled, order: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..=order {
        for m in n..=order {
            let ip: f64 = s
                .values
                .iter()
                .zip(s.rule.weights())
                .map(|(v, w)| w * v[n] * v[m])
                .sum();
            let delta = if n == m { 1.0 } else { 0.0 };
            worst = worst.max((ip - delta).abs());
        }
    }
    worst
}

/// Quadrature of `psi_n(x) e^(-i lambda x) / sqrt(2 pi)` against the closed-form image.
fn transform_defect(spec: &BasisSpec, s: &Sampled) -> Result<f64> {
    let scale = 1.0 / (2.0 * spec.alpha()).sqrt();
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut worst: f64 = 0.0;
    for c in FREQUENCIES {
        let lambda = c * scale;
        for n in 0..=spec.max_index() {
            let (mut re, mut im) = (0.0, 0.0);
            for ((x, w), v) in s.rule.nodes().iter().zip(s.rule.weights()).zip(&s.values) {
                let a = w * v[n] * norm;
                re += a * (lambda * x).cos();
                im -= a * (lambda * x).sin();
            }
            let hat = psi_hat_eval(spec, n, lambda)?;
            worst = worst.max((hat.re - re).abs().max((hat.im - im).abs()));
        }
    }
    Ok(worst)
}

/// Runs both suites for every scale. `normalization` multiplies every
/// sampled basis value and exists to exercise the failure path.
pub fn run(max_order: usize, alphas: &[f64], normalization: f64) -> Result<BasisCheckReport> {
    let mut results = Vec::new();
    for &alpha in alphas {
        let spec = BasisSpec::new(alpha, max_order)?;
        let sampled = sample(&spec, normalization)?;
        let worst = orthonormality_defect(&sampled, max_order);
        results.push(InvariantResult {
            invariant: "orthonormality".into(),
            alpha,
            worst,
            tolerance: ORTHONORMALITY_TOL,
            pass: worst < ORTHONORMALITY_TOL,
        });
        let worst = transform_defect(&spec, &sampled)?;
        results.push(InvariantResult {
            invariant: "fourier-image".into(),
            alpha,
            worst,
            tolerance: TRANSFORM_TOL,
            pass: worst < TRANSFORM_TOL,
        });
    }
    let passed = results.iter().all(|r| r.pass);
    Ok(BasisCheckReport {
        max_order,
        alphas: alphas.to_vec(),
        results,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suites_pass() {
        let r = run(12, &[2.0, 6.0], 1.0).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.results.len(), 4);
    }

    #[test]
    fn corrupted_normalization_is_named() {
        let r = run(4, &[2.0], 1.0 + 1e-6).unwrap();
        assert!(!r.passed);
        assert!(r.failed_invariants().iter().any(|f| f.starts_with("orthonormality")));
    }

    #[test]
    fn order_limit_is_reported() {
        assert!(run(500, &[2.0], 1.0).is_err());
    }
}
