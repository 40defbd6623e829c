//! Special functions and quadrature.
//!
//! All routines are pure and safe to call concurrently.

mod gamma;
mod hyp2f1;
mod quad;

pub use gamma::{
    ln_factorial, ln_gamma, regularized_gamma_pair, regularized_gamma_pair_int, regularized_lower_gamma,
    regularized_upper_gamma, POISSON_SUM_MAX_ARG, POISSON_SUM_MAX_ORDER,
};
pub use hyp2f1::hyp2f1_first_unit;
pub use quad::{integrate_radial, integrate_with_breakpoints, integrate_with_hints, EndpointHints, Integral, QuadratureSpec};
