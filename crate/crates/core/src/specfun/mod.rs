//! Special functions and numerical integration.

mod gamma;
mod quad;

pub use gamma::{gamma, ln_gamma, upper_incomplete_gamma, upper_incomplete_gamma_scaled};
pub use quad::{integrate, integrate_to_infinity, integrate_with_error, QuadratureEstimate, QuadratureSpec};
