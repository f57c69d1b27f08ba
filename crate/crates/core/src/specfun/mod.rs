//! Special functions used throughout the toolkit: Gamma and Beta, Bessel
//! `J_ν` and its zeros, modified Bessel `K_ν`, the Gauss hypergeometric
//! function on the negative axis, and the incomplete kernel integral of the
//! ball Green function.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod hyper;
mod kernel;

pub use bessel::{
    bessel_j, bessel_j_deriv, bessel_j_over_pow, bessel_j_zeros, bessel_k, mcmahon_zero,
};
pub use gamma::{beta, gamma, ln_gamma, recip_gamma};
pub use hyper::{gauss_2f1, gauss_2f1_with};
pub(crate) use hyper::gauss_2f1_unit;
pub use kernel::{kernel_integral, kernel_integral_with};
pub(crate) use kernel::kernel_integral_log_ratio;


use crate::error::{Error, Result};

/// Tolerances and series caps shared by the special-function routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy { rel_tol: 1e-10, abs_tol: 1e-12, max_terms: 500 }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && abs_tol > 0.0 && max_terms >= 8) {
            return Err(Error::Parameter(format!(
                "accuracy needs rel_tol > 0, abs_tol > 0, max_terms >= 8 (got {rel_tol}, {abs_tol}, {max_terms})"
            )));
        }
        Ok(Accuracy { rel_tol, abs_tol, max_terms })
    }
}
