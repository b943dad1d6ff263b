//! Construction of bounded boundary controls from Hermite coefficients.

pub mod budget;
pub mod coefficients;
pub mod params;
pub mod pulse;
pub mod response;
pub mod spectra;
pub mod synthesis;

pub use budget::{error_budget, error_budget_generic, ErrorBudget};
pub use coefficients::{
    compute_g_pm, compute_h_pn, compute_wnm_matrix, compute_wnm_quadrature, example_g_pm, example_wnm, CoefficientSet,
    Provenance, ResidualTarget,
};
pub use params::{default_t_star, ControlParams};
pub use pulse::{delta_moment_residual, pulse_eval, Pulse};
pub use response::{assemble_control_response, control_response_physical, control_response_spectral};
pub use spectra::{phi_difference_bound, phi_difference_norm, phi_eval, phi_l_eval, z_at, z_terminal};
pub use synthesis::{admissibility_profile, synthesize, AdmissibilityProfile, SynthesizedControl};
