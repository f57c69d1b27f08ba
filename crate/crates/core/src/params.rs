//! Fractional order and ball geometry.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::gamma;

/// Fractional order α ∈ (0, 2) with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub alpha: f64,
    /// κ_α = 2^{1-α} Γ(1-α/2) / Γ(α/2)
    pub kappa: f64,
    /// β = 2(α-1)/α
    pub beta: f64,
}

impl FracParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Parameter(format!("alpha must lie strictly inside (0, 2), got {alpha}")));
        }
        let kappa = 2f64.powf(1.0 - alpha) * gamma(1.0 - 0.5 * alpha)? / gamma(0.5 * alpha)?;
        Ok(FracParams { alpha, kappa, beta: 2.0 * (alpha - 1.0) / alpha })
    }
}

/// Measure of the unit ball in ℝ^N, `π^{N/2} / Γ(N/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = 0.5 * n as f64;
    PI.powf(half) / gamma(half + 1.0).expect("Γ(N/2+1) is finite for moderate N")
}

/// A ball `B(0, R)` in ℝ^N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallGeometry {
    pub n: usize,
    pub radius: f64,
    pub omega_n: f64,
    pub measure: f64,
}

impl BallGeometry {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if n == 0 || n > 60 {
            return Err(Error::Parameter(format!("dimension must be between 1 and 60, got {n}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!("radius must be positive and finite, got {radius}")));
        }
        let omega_n = unit_ball_volume(n);
        Ok(BallGeometry { n, radius, omega_n, measure: omega_n * radius.powi(n as i32) })
    }

    /// The ball with the same measure as a set of measure `measure`.
    pub fn with_measure(n: usize, measure: f64) -> Result<Self> {
        if !(measure > 0.0) {
            return Err(Error::Parameter(format!("measure must be positive, got {measure}")));
        }
        let omega = unit_ball_volume(n);
        let mut ball = BallGeometry::new(n, (measure / omega).powf(1.0 / n as f64))?;
        ball.measure = measure;
        Ok(ball)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn kappa_at_one() {
        // κ_1 = Γ(1/2)/Γ(1/2) = 1
        let fp = FracParams::new(1.0).unwrap();
        assert_relative_eq!(fp.kappa, 1.0, max_relative = 1e-14);
        assert_eq!(fp.beta, 0.0);
        assert!(FracParams::new(2.0).is_err());
        assert!(FracParams::new(0.0).is_err());
    }

    #[test]
    fn ball_from_measure() {
        let b = BallGeometry::with_measure(2, 1.0).unwrap();
        assert_relative_eq!(b.radius, (1.0 / PI).sqrt(), max_relative = 1e-14);
        assert_eq!(b.measure, 1.0);
    }
}
