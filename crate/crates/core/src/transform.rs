//! Unitary Fourier transforms between cell-centred physical grids and their
//! symmetric frequency grids, and free heat propagation in frequency space.
//!
//! With `x_i = x0 + i h` and `sigma_k = s0 + k ds`, `h ds = 2 pi / n`, the
//! discrete transform
//!
//! ```text
//! V_k = h / sqrt(2 pi) * sum_i W_i exp(-i x_i sigma_k)
//! ```
//!
//! factors into pre-twiddle, FFT and post-twiddle. Because `x0 ds` and
//! `s0 h` are both `-(n - 1) pi / n`, every twiddle is an exact rational
//! multiple of `pi` and is reduced modulo `2 pi` in integer arithmetic.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{cell_centre, frequency, GridSpec, PhysicalField, SpectralField};

/// One-dimensional unitary transform on `n` cell centres of `[-L, L]`.
pub struct AxisTransform {
    n: usize,
    halfwidth: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    pre_fwd: Vec<Complex64>,
    post_fwd: Vec<Complex64>,
    pre_inv: Vec<Complex64>,
    post_inv: Vec<Complex64>,
}

impl std::fmt::Debug for AxisTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxisTransform")
            .field("n", &self.n)
            .field("halfwidth", &self.halfwidth)
            .finish()
    }
}

/// `exp(i pi q / (2n))` with `q` reduced modulo `4n`.
fn phase(q: i128, n: usize) -> Complex64 {
    let m = 4 * n as i128;
    let r = q.rem_euclid(m);
    let angle = std::f64::consts::PI * r as f64 / (2 * n) as f64;
    Complex64::from_polar(1.0, angle)
}

impl AxisTransform {
    pub fn new(n: usize, halfwidth: f64, planner: &mut FftPlanner<f64>) -> Self {
        let h = 2.0 * halfwidth / n as f64;
        let ds = 2.0 * std::f64::consts::PI / (n as f64 * h);
        let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let nm1 = n as i128 - 1;
        let idx = |i: usize| i as i128;
        let pre_fwd = (0..n).map(|i| phase(2 * idx(i) * nm1, n)).collect();
        let post_fwd = (0..n)
            .map(|k| h * c * phase(-(nm1 * nm1 - 2 * idx(k) * nm1), n))
            .collect();
        let pre_inv = (0..n).map(|k| phase(-2 * idx(k) * nm1, n)).collect();
        let post_inv = (0..n)
            .map(|i| ds * c * phase(nm1 * nm1 - 2 * idx(i) * nm1, n))
            .collect();
        Self {
            n,
            halfwidth,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            pre_fwd,
            post_fwd,
            pre_inv,
            post_inv,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        cell_centre(self.halfwidth, self.n, i)
    }

    pub fn sigma(&self, k: usize) -> f64 {
        let h = 2.0 * self.halfwidth / self.n as f64;
        frequency(2.0 * std::f64::consts::PI / (self.n as f64 * h), self.n, k)
    }

    /// In-place forward transform of `n` samples.
    pub fn forward(&self, buf: &mut [Complex64]) {
        buf.iter_mut().zip(&self.pre_fwd).for_each(|(v, p)| *v *= p);
        self.forward.process(buf);
        buf.iter_mut().zip(&self.post_fwd).for_each(|(v, p)| *v *= p);
    }

    /// In-place inverse of [`AxisTransform::forward`].
    pub fn inverse(&self, buf: &mut [Complex64]) {
        buf.iter_mut().zip(&self.pre_inv).for_each(|(v, p)| *v *= p);
        self.inverse.process(buf);
        buf.iter_mut().zip(&self.post_inv).for_each(|(v, p)| *v *= p);
    }
}

/// Reusable pair of axis transforms for one grid.
#[derive(Debug)]
pub struct SpectralPlan {
    grid: GridSpec,
    axis1: AxisTransform,
    axis2: AxisTransform,
}

impl SpectralPlan {
    pub fn new(grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid,
            axis1: AxisTransform::new(grid.n1, grid.halfwidth_x1, &mut planner),
            axis2: AxisTransform::new(grid.n2, grid.halfwidth_x2, &mut planner),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        if *grid != self.grid {
            return Err(Error::Shape {
                expected: format!("{:?}", self.grid),
                actual: format!("{grid:?}"),
            });
        }
        Ok(())
    }

    fn apply(&self, data: &mut Array2<Complex64>, inverse: bool) {
        let run = |ax: &AxisTransform, buf: &mut [Complex64]| {
            if inverse {
                ax.inverse(buf)
            } else {
                ax.forward(buf)
            }
        };
        for mut row in data.axis_iter_mut(Axis(0)) {
            let slice = row.as_slice_mut().expect("standard layout");
            run(&self.axis2, slice);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.grid.n1];
        for j in 0..self.grid.n2 {
            for (i, c) in col.iter_mut().enumerate() {
                *c = data[[i, j]];
            }
            run(&self.axis1, &mut col);
            for (i, c) in col.iter().enumerate() {
                data[[i, j]] = *c;
            }
        }
    }

    pub fn forward(&self, w: &PhysicalField) -> Result<SpectralField> {
        self.check(w.grid())?;
        let mut data = w.values().mapv(|v| Complex64::new(v, 0.0));
        self.apply(&mut data, false);
        SpectralField::new(self.grid, data, w.time_tag())
    }

    /// Inverse transform; the imaginary part is discarded.
    pub fn inverse(&self, v: &SpectralField) -> Result<PhysicalField> {
        let (re, _) = self.inverse_complex(v)?;
        PhysicalField::new(self.grid, re, v.time_tag().max(0.0))
    }

    /// Inverse transform returning real part and the largest imaginary magnitude.
    pub fn inverse_complex(&self, v: &SpectralField) -> Result<(Array2<f64>, f64)> {
        self.check(v.grid())?;
        if v.values().iter().any(|z| !z.is_finite()) {
            return Err(Error::Numeric("non-finite spectral input".into()));
        }
        let mut data = v.values().clone();
        self.apply(&mut data, true);
        let imag = data.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        Ok((data.mapv(|z| z.re), imag))
    }
}

pub fn transform_forward(w: &PhysicalField) -> Result<SpectralField> {
    SpectralPlan::new(*w.grid())?.forward(w)
}

pub fn transform_inverse(v: &SpectralField) -> Result<PhysicalField> {
    SpectralPlan::new(*v.grid())?.inverse(v)
}

/// Multiplies by `exp(-t |sigma|^2)` and tags the result with `t`.
pub fn propagate_free(v0: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!(
            "propagation time must be nonnegative, got {t}"
        )));
    }
    let g = *v0.grid();
    let d1: Vec<f64> = g.sigma1_coords().iter().map(|s| (-t * s * s).exp()).collect();
    let d2: Vec<f64> = g.sigma2_coords().iter().map(|s| (-t * s * s).exp()).collect();
    let values = Array2::from_shape_fn((g.n1, g.n2), |(i, j)| v0.values()[[i, j]] * (d1[i] * d2[j]));
    SpectralField::new(g, values, t)
}

/// Smoothing estimate for free evolution: returns the measured norm of
/// `D^a W0(., t)` and its upper bound
/// `e^t ((1 + |a|) / (2 t e))^((1 + |a|) / 2) ||W0||`.
pub fn smoothing_derivative_bound_check(w0: &PhysicalField, t: f64, alpha: (u32, u32)) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("smoothing check needs t > 0, got {t}")));
    }
    let v0 = transform_forward(w0)?;
    let g = *v0.grid();
    let s1 = g.sigma1_coords();
    let s2 = g.sigma2_coords();
    let mut acc = crate::numeric::CompensatedSum::new();
    for (i, a) in s1.iter().enumerate() {
        for (j, b) in s2.iter().enumerate() {
            let mult = a.powi(alpha.0 as i32) * b.powi(alpha.1 as i32) * (-t * (a * a + b * b)).exp();
            acc.add((mult * v0.values()[[i, j]]).norm_sqr());
        }
    }
    let lhs = (acc.value() * g.frequency_cell_area()).sqrt();
    let k = 1.0 + alpha.0 as f64 + alpha.1 as f64;
    let rhs = t.exp() * (k / (2.0 * t * std::f64::consts::E)).powf(k / 2.0) * w0.l2_norm();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axis_round_trip() {
        let mut planner = FftPlanner::new();
        let ax = AxisTransform::new(64, 10.0, &mut planner);
        let orig: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((-(ax.x(i) - 1.0).powi(2)).exp(), 0.3 * ax.x(i).sin()))
            .collect();
        let mut buf = orig.clone();
        ax.forward(&mut buf);
        ax.inverse(&mut buf);
        for (a, b) in orig.iter().zip(&buf) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn gaussian_is_fixed_point() {
        let g = GridSpec::square(20.0, 128).unwrap();
        let w = PhysicalField::from_fn(g, 0.0, |a, b| (-(a * a + b * b) / 2.0).exp()).unwrap();
        let v = transform_forward(&w).unwrap();
        for i in 0..g.n1 {
            for j in 0..g.n2 {
                let (a, b) = (g.sigma1(i), g.sigma2(j));
                let expect = (-(a * a + b * b) / 2.0).exp();
                assert!((v.values()[[i, j]] - expect).norm() < 1e-13);
            }
        }
        assert_relative_eq!(v.l2_norm(), w.l2_norm(), max_relative = 1e-12);
    }

    #[test]
    fn propagation_rejects_negative_time() {
        let g = GridSpec::square(5.0, 16).unwrap();
        let v = SpectralField::zeros(g, 0.0);
        assert!(propagate_free(&v, -1.0).is_err());
        assert_eq!(propagate_free(&v, 0.0).unwrap().values(), v.values());
    }

    #[test]
    fn smoothing_zero_field() {
        let g = GridSpec::square(5.0, 16).unwrap();
        let w = PhysicalField::zeros(g, 0.0);
        assert_eq!(smoothing_derivative_bound_check(&w, 1.0, (1, 0)).unwrap(), (0.0, 0.0));
        assert!(smoothing_derivative_bound_check(&w, 0.0, (0, 0)).is_err());
    }
}
