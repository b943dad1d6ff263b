//! Bounded Dirichlet boundary controls for the heat equation on a half plane.
//!
//! A state on `x1 > 0` is odd-extended to the whole plane, where the
//! boundary control acts as a dipole line source. The control is built from
//! a scaled Hermite expansion of the residual target: each `x1` Hermite mode
//! is reproduced by a finite-difference pulse in time, each `x2` mode by a
//! Gaussian-Hermite profile. Every time integral is evaluated in closed form,
//! so the terminal state is obtained without time stepping.
//!
//! Module overview:
//!
//! * [`hermite`], [`quadrature`]: basis evaluation and inner products.
//! * [`field`], [`transform`]: grids, sampled fields, unitary FFTs, free
//!   propagation.
//! * [`control`]: pulses, spectra, coefficients, the synthesized control,
//!   its response and the error budget.
//! * [`simulation`]: end-to-end experiments and numerical checks.
//! * [`io`]: CSV/JSON export and plot scripts.

pub mod control;
pub mod error;
pub mod example;
pub mod field;
pub mod hermite;
pub mod io;
pub mod numeric;
pub mod quadrature;
pub mod simulation;
pub mod transform;

pub use error::{Error, Result};
pub use field::{boundary_trace, l2_norm, odd_extend, GridSpec, HalfPlaneField, PhysicalField, SpectralField};
pub use hermite::{hermite_eval, psi_hat_eval, psi_scaled_eval, theta_eval, BasisSpec};
pub use quadrature::{inner_product, QuadratureRule, TensorRule};
pub use transform::{propagate_free, transform_forward, transform_inverse, SpectralPlan};
