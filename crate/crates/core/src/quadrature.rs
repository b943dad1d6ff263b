//! One- and two-dimensional quadrature on truncated symmetric intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Nodes per axis of the default rule.
pub const DEFAULT_NODES: usize = 400;

/// Boundary magnitude above which an integrand is reported as not decayed.
pub const DECAY_TOLERANCE: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain_halfwidth: f64,
}

impl QuadratureRule {
    /// Build a rule from explicit nodes and weights on `[-halfwidth, halfwidth]`.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, domain_halfwidth: f64) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Shape {
                expected: format!("{} weights", nodes.len()),
                actual: format!("{} weights", weights.len()),
            });
        }
        if nodes.is_empty() {
            return Err(Error::Parameter("quadrature rule needs at least one node".into()));
        }
        if !(domain_halfwidth > 0.0 && domain_halfwidth.is_finite()) {
            return Err(Error::Parameter(format!(
                "domain halfwidth must be positive, got {domain_halfwidth}"
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Parameter("quadrature weights must be positive".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("quadrature nodes must be strictly increasing".into()));
        }
        Ok(Self {
            nodes,
            weights,
            domain_halfwidth,
        })
    }

    /// Gauss–Legendre rule with `n` nodes mapped to `[-halfwidth, halfwidth]`.
    ///
    /// Roots of `P_n` are found by Newton iteration from the Tricomi initial
    /// guess; weights are `2 / ((1 - x^2) P_n'(x)^2)`.
    pub fn gauss_legendre(n: usize, halfwidth: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("Gauss-Legendre rule needs n >= 1".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // descending roots fill the upper half; mirror into the lower half
            nodes[n - 1 - i] = x * halfwidth;
            nodes[i] = -x * halfwidth;
            weights[n - 1 - i] = w * halfwidth;
            weights[i] = w * halfwidth;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self::new(nodes, weights, halfwidth)
    }

    /// Composite midpoint rule with `n` equal cells.
    pub fn uniform_midpoint(n: usize, halfwidth: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("midpoint rule needs n >= 1".into()));
        }
        let h = 2.0 * halfwidth / n as f64;
        let nodes = (0..n).map(|i| -halfwidth + (i as f64 + 0.5) * h).collect();
        Self::new(nodes, vec![h; n], halfwidth)
    }

    /// Default rule for a basis with scales `t` and `t_star`: 400 Gauss–Legendre
    /// nodes on `[-L, L]`, `L = 8 sqrt(2 max(t, t_star))`.
    pub fn default_for(t: f64, t_star: f64) -> Result<Self> {
        Self::gauss_legendre(DEFAULT_NODES, default_halfwidth(t, t_star))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain_halfwidth(&self) -> f64 {
        self.domain_halfwidth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)` in ascending node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::Numeric(format!("non-finite integrand {v} at x = {x}")));
            }
            acc.add(w * v);
        }
        Ok(acc.value())
    }
}

pub fn default_halfwidth(t: f64, t_star: f64) -> f64 {
    8.0 * (2.0 * t.max(t_star)).sqrt()
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `<f, g>` under `rule`, summed in ascending node order.
///
/// The product is spot-sampled at both ends of the domain; magnitudes above
/// [`DECAY_TOLERANCE`] are logged as an accuracy warning.
pub fn inner_product<F, G>(rule: &QuadratureRule, f: F, g: G) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let l = rule.domain_halfwidth;
    let edge = (f(-l) * g(-l)).abs().max((f(l) * g(l)).abs());
    if edge > DECAY_TOLERANCE {
        log::warn!("integrand has magnitude {edge:.3e} at the domain boundary |x| = {l}");
    }
    let mut acc = CompensatedSum::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(x) * g(x);
        if v.is_nan() {
            return Err(Error::Numeric(format!("NaN integrand at x = {x}")));
        }
        acc.add(w * v);
    }
    Ok(acc.value())
}

/// Tensor product of two one-dimensional rules.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorRule {
    pub x1: QuadratureRule,
    pub x2: QuadratureRule,
}

impl TensorRule {
    pub fn new(x1: QuadratureRule, x2: QuadratureRule) -> Self {
        Self { x1, x2 }
    }

    pub fn default_for(t: f64, t_star: f64) -> Result<Self> {
        let r = QuadratureRule::default_for(t, t_star)?;
        Ok(Self::new(r.clone(), r))
    }

    /// Samples `f` on the tensor grid, row-major in `x1`.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<Vec<f64>> {
        let n2 = self.x2.len();
        let mut out = Vec::with_capacity(self.x1.len() * n2);
        for &a in self.x1.nodes() {
            for &b in self.x2.nodes() {
                let v = f(a, b);
                if v.is_nan() {
                    return Err(Error::Numeric(format!("NaN integrand at ({a}, {b})")));
                }
                out.push(v);
            }
        }
        Ok(out)
    }

    /// `sum_ij w_i w_j F_ij a_i b_j` for pre-sampled values `F` and separable
    /// factors `a(x1_i)`, `b(x2_j)`.
    pub fn separable_moment(&self, samples: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let n2 = self.x2.len();
        let mut outer = CompensatedSum::new();
        for (i, (&wi, &ai)) in self.x1.weights().iter().zip(a).enumerate() {
            if ai == 0.0 {
                continue;
            }
            let row = &samples[i * n2..(i + 1) * n2];
            let mut inner = CompensatedSum::new();
            for ((&v, &wj), &bj) in row.iter().zip(self.x2.weights()).zip(b) {
                inner.add(v * wj * bj);
            }
            outer.add(wi * ai * inner.value());
        }
        outer.value()
    }

    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<f64> {
        let samples = self.sample(f)?;
        let ones1 = vec![1.0; self.x1.len()];
        let ones2 = vec![1.0; self.x2.len()];
        Ok(self.separable_moment(&samples, &ones1, &ones2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let r = QuadratureRule::gauss_legendre(5, 1.0).unwrap();
        // exact up to degree 9
        let v = r.integrate(|x| x.powi(8) + x.powi(3)).unwrap();
        assert_relative_eq!(v, 2.0 / 9.0, epsilon = 1e-15);
        let s: f64 = r.weights().iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn large_rule_is_ordered_and_symmetric() {
        let r = QuadratureRule::gauss_legendre(400, 3.0).unwrap();
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        for i in 0..200 {
            assert_eq!(r.nodes()[i], -r.nodes()[399 - i]);
        }
        let s: f64 = r.weights().iter().sum();
        assert_relative_eq!(s, 6.0, epsilon = 1e-12);
        let g = r.integrate(|x| (-x * x).exp()).unwrap();
        assert_relative_eq!(
            g,
            std::f64::consts::PI.sqrt() * statrs::function::erf::erf(3.0),
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(QuadratureRule::new(vec![0.0, 0.0], vec![1.0, 1.0], 1.0).is_err());
        assert!(QuadratureRule::new(vec![0.0, 1.0], vec![1.0, -1.0], 1.0).is_err());
        assert!(QuadratureRule::new(vec![0.0], vec![1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn nan_is_reported() {
        let r = QuadratureRule::uniform_midpoint(8, 1.0).unwrap();
        let err = inner_product(&r, |x| if x > 0.5 { f64::NAN } else { 1.0 }, |_| 1.0);
        assert!(matches!(err, Err(Error::Numeric(_))));
    }

    #[test]
    fn tensor_gaussian() {
        let t = TensorRule::default_for(2.0, 6.0).unwrap();
        let v = t.integrate(|a, b| (-(a * a + b * b)).exp()).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-12);
    }
}
