//! Numerical toolkit for the spectral fractional Laplacian on bounded
//! domains: special functions, rearrangements and Lorentz norms, the ball
//! Green function, a spectral Dirichlet solver with its α-harmonic
//! extension, and a harness that checks comparison and regularity
//! inequalities numerically.

pub mod ballgreen;
pub mod comparelab;
mod error;
pub mod fsum;
pub mod params;
pub mod quad;
pub mod rearrange;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};
pub use params::{unit_ball_volume, BallGeometry, FracParams};
