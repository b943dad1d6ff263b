//! Uniform grids and the sampled fields that live on them.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Cell-centred grid on `[-L1, L1] x [-L2, L2]`.
///
/// Samples sit at `x_i = -L + (i + 1/2) h`, so no sample lies on `x1 = 0`.
/// The matching frequency grid is `sigma_k = (k - n/2 + 1/2) dsigma` with
/// `dsigma = 2 pi / (n h)`, symmetric about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub halfwidth_x1: f64,
    pub halfwidth_x2: f64,
    pub n1: usize,
    pub n2: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            halfwidth_x1: 40.0,
            halfwidth_x2: 40.0,
            n1: 512,
            n2: 512,
        }
    }
}

impl GridSpec {
    pub fn new(halfwidth_x1: f64, halfwidth_x2: f64, n1: usize, n2: usize) -> Result<Self> {
        let g = Self {
            halfwidth_x1,
            halfwidth_x2,
            n1,
            n2,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn square(halfwidth: f64, n: usize) -> Result<Self> {
        Self::new(halfwidth, halfwidth, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, name) in [(self.n1, "n1"), (self.n2, "n2")] {
            if n < 16 || !n.is_power_of_two() {
                return Err(Error::Parameter(format!(
                    "{name} must be a power of two and at least 16, got {n}"
                )));
            }
        }
        for (l, name) in [(self.halfwidth_x1, "x1"), (self.halfwidth_x2, "x2")] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Parameter(format!(
                    "halfwidth along {name} must be positive, got {l}"
                )));
            }
        }
        Ok(())
    }

    pub fn h1(&self) -> f64 {
        2.0 * self.halfwidth_x1 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        2.0 * self.halfwidth_x2 / self.n2 as f64
    }

    pub fn x1(&self, i: usize) -> f64 {
        cell_centre(self.halfwidth_x1, self.n1, i)
    }

    pub fn x2(&self, j: usize) -> f64 {
        cell_centre(self.halfwidth_x2, self.n2, j)
    }

    pub fn x1_coords(&self) -> Vec<f64> {
        (0..self.n1).map(|i| self.x1(i)).collect()
    }

    pub fn x2_coords(&self) -> Vec<f64> {
        (0..self.n2).map(|j| self.x2(j)).collect()
    }

    pub fn dsigma1(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.n1 as f64 * self.h1())
    }

    pub fn dsigma2(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.n2 as f64 * self.h2())
    }

    pub fn sigma1(&self, k: usize) -> f64 {
        frequency(self.dsigma1(), self.n1, k)
    }

    pub fn sigma2(&self, k: usize) -> f64 {
        frequency(self.dsigma2(), self.n2, k)
    }

    pub fn sigma1_coords(&self) -> Vec<f64> {
        (0..self.n1).map(|k| self.sigma1(k)).collect()
    }

    pub fn sigma2_coords(&self) -> Vec<f64> {
        (0..self.n2).map(|k| self.sigma2(k)).collect()
    }

    pub fn cell_area(&self) -> f64 {
        self.h1() * self.h2()
    }

    pub fn frequency_cell_area(&self) -> f64 {
        self.dsigma1() * self.dsigma2()
    }

    fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    fn check_shape(&self, actual: (usize, usize)) -> Result<()> {
        if actual != self.shape() {
            return Err(Error::Shape {
                expected: format!("{}x{}", self.n1, self.n2),
                actual: format!("{}x{}", actual.0, actual.1),
            });
        }
        Ok(())
    }
}

pub(crate) fn cell_centre(halfwidth: f64, n: usize, i: usize) -> f64 {
    let h = 2.0 * halfwidth / n as f64;
    -halfwidth + (i as f64 + 0.5) * h
}

pub(crate) fn frequency(dsigma: f64, n: usize, k: usize) -> f64 {
    (k as f64 - n as f64 / 2.0 + 0.5) * dsigma
}

/// Real samples of a state on the full plane. Index `[i, j]` is `(x1_i, x2_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    values: Array2<f64>,
    time_tag: f64,
}

impl PhysicalField {
    pub fn new(grid: GridSpec, values: Array2<f64>, time_tag: f64) -> Result<Self> {
        grid.validate()?;
        grid.check_shape(values.dim())?;
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite sample {v} at ({}, {})",
                grid.x1(i),
                grid.x2(j)
            )));
        }
        if !(time_tag >= 0.0) {
            return Err(Error::Parameter(format!(
                "time tag must be nonnegative, got {time_tag}"
            )));
        }
        Ok(Self { grid, values, time_tag })
    }

    pub fn zeros(grid: GridSpec, time_tag: f64) -> Self {
        Self {
            grid,
            values: Array2::zeros((grid.n1, grid.n2)),
            time_tag,
        }
    }

    /// Samples `f(x1, x2)` at every cell centre.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, time_tag: f64, f: F) -> Result<Self> {
        let x1 = grid.x1_coords();
        let x2 = grid.x2_coords();
        let values = Array2::from_shape_fn((grid.n1, grid.n2), |(i, j)| f(x1[i], x2[j]));
        Self::new(grid, values, time_tag)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn time_tag(&self) -> f64 {
        self.time_tag
    }

    pub fn with_time_tag(mut self, t: f64) -> Self {
        self.time_tag = t;
        self
    }

    pub fn l2_norm(&self) -> f64 {
        let acc: CompensatedSum = self.values.iter().map(|v| v * v).collect();
        (acc.value() * self.grid.cell_area()).sqrt()
    }

    /// Pointwise `self - other`; grids must match.
    pub fn sub(&self, other: &PhysicalField) -> Result<PhysicalField> {
        if self.grid != other.grid {
            return Err(Error::Shape {
                expected: format!("{:?}", self.grid),
                actual: format!("{:?}", other.grid),
            });
        }
        Ok(PhysicalField {
            grid: self.grid,
            values: &self.values - &other.values,
            time_tag: self.time_tag,
        })
    }

    pub fn add(&self, other: &PhysicalField) -> Result<PhysicalField> {
        if self.grid != other.grid {
            return Err(Error::Shape {
                expected: format!("{:?}", self.grid),
                actual: format!("{:?}", other.grid),
            });
        }
        Ok(PhysicalField {
            grid: self.grid,
            values: &self.values + &other.values,
            time_tag: self.time_tag,
        })
    }

    /// `max |F(x1, x2) + F(-x1, x2)|`, zero for an exactly odd field.
    pub fn odd_defect(&self) -> f64 {
        let n1 = self.grid.n1;
        let mut worst: f64 = 0.0;
        for i in 0..n1 / 2 {
            let a = self.values.index_axis(Axis(0), i);
            let b = self.values.index_axis(Axis(0), n1 - 1 - i);
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x + y).abs());
            }
        }
        worst
    }
}

/// Complex samples on the frequency grid paired with a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    values: Array2<Complex64>,
    time_tag: f64,
}

impl SpectralField {
    pub fn new(grid: GridSpec, values: Array2<Complex64>, time_tag: f64) -> Result<Self> {
        grid.validate()?;
        grid.check_shape(values.dim())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite spectral sample".into()));
        }
        Ok(Self { grid, values, time_tag })
    }

    pub fn zeros(grid: GridSpec, time_tag: f64) -> Self {
        Self {
            grid,
            values: Array2::zeros((grid.n1, grid.n2)),
            time_tag,
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: GridSpec, time_tag: f64, f: F) -> Result<Self> {
        let s1 = grid.sigma1_coords();
        let s2 = grid.sigma2_coords();
        let values = Array2::from_shape_fn((grid.n1, grid.n2), |(i, j)| f(s1[i], s2[j]));
        Self::new(grid, values, time_tag)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn time_tag(&self) -> f64 {
        self.time_tag
    }

    pub fn with_time_tag(mut self, t: f64) -> Self {
        self.time_tag = t;
        self
    }

    pub fn l2_norm(&self) -> f64 {
        let acc: CompensatedSum = self.values.iter().map(|v| v.norm_sqr()).collect();
        (acc.value() * self.grid.frequency_cell_area()).sqrt()
    }

    /// Largest `|V(-sigma1, sigma2) + V(sigma1, sigma2)|`, zero for the image
    /// of a field odd in `x1`.
    pub fn odd_defect(&self) -> f64 {
        let n1 = self.grid.n1;
        let mut worst: f64 = 0.0;
        for i in 0..n1 {
            for (j, v) in self.values.index_axis(Axis(0), i).iter().enumerate() {
                worst = worst.max((v + self.values[[n1 - 1 - i, j]]).norm());
            }
        }
        worst
    }
}

pub trait L2Norm {
    fn l2_norm(&self) -> f64;
}

impl L2Norm for PhysicalField {
    fn l2_norm(&self) -> f64 {
        PhysicalField::l2_norm(self)
    }
}

impl L2Norm for SpectralField {
    fn l2_norm(&self) -> f64 {
        SpectralField::l2_norm(self)
    }
}

/// Discrete `L2` norm, `sqrt(sum |v|^2 * cell area)` in ascending index order.
pub fn l2_norm<F: L2Norm>(field: &F) -> f64 {
    field.l2_norm()
}

/// Samples of a state on the right half plane `x1 > 0`: the upper `n1 / 2`
/// rows of a full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneField {
    grid: GridSpec,
    values: Array2<f64>,
}

impl HalfPlaneField {
    pub fn new(grid: GridSpec, values: Array2<f64>) -> Result<Self> {
        grid.validate()?;
        let expected = (grid.n1 / 2, grid.n2);
        if values.dim() != expected {
            return Err(Error::Shape {
                expected: format!("{}x{}", expected.0, expected.1),
                actual: format!("{}x{}", values.dim().0, values.dim().1),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite half-plane sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let half = grid.n1 / 2;
        let x2 = grid.x2_coords();
        let values = Array2::from_shape_fn((half, grid.n2), |(i, j)| f(grid.x1(half + i), x2[j]));
        Self::new(grid, values)
    }

    /// Restriction of a full-plane field to `x1 > 0`.
    pub fn restrict(field: &PhysicalField) -> Self {
        let half = field.grid.n1 / 2;
        Self {
            grid: field.grid,
            values: field.values.slice(ndarray::s![half.., ..]).to_owned(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

/// Odd reflection across `x1 = 0`.
///
/// The boundary values only enter the singular part of the extension, which
/// is never sampled; they are validated and otherwise ignored.
pub fn odd_extend(f: &HalfPlaneField, boundary_trace: &[f64]) -> Result<PhysicalField> {
    let grid = f.grid;
    if boundary_trace.len() != grid.n2 {
        return Err(Error::Shape {
            expected: format!("{} boundary values", grid.n2),
            actual: format!("{}", boundary_trace.len()),
        });
    }
    if let Some(v) = boundary_trace.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite boundary value {v}")));
    }
    let half = grid.n1 / 2;
    let values = Array2::from_shape_fn((grid.n1, grid.n2), |(i, j)| {
        if i >= half {
            f.values[[i - half, j]]
        } else {
            -f.values[[half - 1 - i, j]]
        }
    });
    PhysicalField::new(grid, values, 0.0)
}

/// Values of `W` at `x1 = epsilon` for every `x2` sample, by linear
/// interpolation between the neighbouring cell centres.
pub fn boundary_trace(field: &PhysicalField, epsilon: f64) -> Result<Vec<f64>> {
    let g = field.grid;
    let h = g.h1();
    let upper = g.x1(g.n1 - 1);
    if !(epsilon >= 0.5 * h * (1.0 - 1e-12)) || epsilon > upper {
        return Err(Error::Parameter(format!(
            "trace offset {epsilon} must lie in [{}, {upper}]",
            0.5 * h
        )));
    }
    let s = ((epsilon + g.halfwidth_x1) / h - 0.5).max((g.n1 / 2) as f64);
    let i0 = (s.floor() as usize).min(g.n1 - 2);
    let frac = s - i0 as f64;
    let a = field.values.index_axis(Axis(0), i0);
    let b = field.values.index_axis(Axis(0), i0 + 1);
    Ok(a.iter().zip(b.iter()).map(|(&lo, &hi)| lo + frac * (hi - lo)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small() -> GridSpec {
        GridSpec::square(4.0, 16).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::square(1.0, 24).is_err());
        assert!(GridSpec::square(1.0, 8).is_err());
        assert!(GridSpec::square(-1.0, 16).is_err());
        let g = small();
        assert_relative_eq!(g.x1(0), -3.75);
        assert_relative_eq!(g.x1(15), 3.75);
        assert_relative_eq!(g.sigma1(0), -g.sigma1(15));
    }

    #[test]
    fn odd_extension_mirrors() {
        let g = small();
        let f = HalfPlaneField::from_fn(g, |x1, x2| x1 * (-(x1 * x1 + x2 * x2)).exp()).unwrap();
        let w = odd_extend(&f, &vec![0.0; 16]).unwrap();
        assert_eq!(w.odd_defect(), 0.0);
        let direct = PhysicalField::from_fn(g, 0.0, |x1, x2| x1 * (-(x1 * x1 + x2 * x2)).exp()).unwrap();
        assert_eq!(w.values(), direct.values());
        assert!(odd_extend(&f, &[0.0; 3]).is_err());
    }

    #[test]
    fn trace_interpolates() {
        let g = small();
        let w = PhysicalField::from_fn(g, 0.0, |x1, x2| 2.0 * x1 + x2).unwrap();
        let tr = boundary_trace(&w, 0.6).unwrap();
        for (j, v) in tr.iter().enumerate() {
            assert_relative_eq!(*v, 1.2 + g.x2(j), epsilon = 1e-12);
        }
        assert!(boundary_trace(&w, 0.1).is_err());
        assert!(boundary_trace(&w, 10.0).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let g = small();
        assert!(PhysicalField::from_fn(g, 0.0, |x1, _| 1.0 / (x1 - g.x1(3))).is_err());
    }
}
