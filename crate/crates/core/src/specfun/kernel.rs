use super::gamma::beta;
use super::Accuracy;
use crate::error::{Error, Result};
use crate::quad::gauss_kronrod;

/// `I(w) = ∫₀^w s^{α/2-1} (1 + s/R²)^{-N/2} ds`, the kernel integral of the
/// ball Green function. `w = +∞` gives `R^α B(α/2, (N-α)/2)` when `N > α`.
pub fn kernel_integral(w: f64, alpha: f64, n: usize, radius: f64) -> Result<f64> {
    kernel_integral_with(w, alpha, n, radius, &Accuracy::default())
}

/// As [`kernel_integral`] with explicit tolerances.
///
/// The substitution `s = u^{2/α}` removes the endpoint singularity on
/// `[0, min(w, R²)]`; the remainder is integrated in `x = ln(s/R²)`, where
/// the integrand decays or grows like `e^{(α-N)x/2}`.
pub fn kernel_integral_with(w: f64, alpha: f64, n: usize, radius: f64, acc: &Accuracy) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    if n == 0 || !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Parameter(format!("need N >= 1 and R > 0, got N = {n}, R = {radius}")));
    }
    if !(w >= 0.0) {
        return Err(Error::Domain { function: "kernel_integral", detail: format!("needs w >= 0, got {w}") });
    }
    let a = 0.5 * alpha;
    let m = 0.5 * n as f64;
    let r2 = radius * radius;
    if w == f64::INFINITY {
        if n as f64 <= alpha {
            return Err(Error::Divergent(format!("kernel integral to infinity needs N > alpha (N = {n}, alpha = {alpha})")));
        }
        return Ok(radius.powf(alpha) * beta(a, m - a)?);
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let ratio = w / r2;
    if ratio.is_finite() && ratio > 0.0 {
        finite_part(ratio.ln(), a, m, radius, acc)
    } else {
        finite_part(w.ln() - r2.ln(), a, m, radius, acc)
    }
}

/// `I(R² e^x)`, for callers whose upper limit would overflow or underflow.
pub(crate) fn kernel_integral_log_ratio(x: f64, alpha: f64, n: usize, radius: f64) -> Result<f64> {
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return kernel_integral(f64::INFINITY, alpha, n, radius);
    }
    finite_part(x, 0.5 * alpha, 0.5 * n as f64, radius, &Accuracy::default())
}

fn finite_part(x: f64, a: f64, m: f64, radius: f64, acc: &Accuracy) -> Result<f64> {
    let rel = 1e-2 * acc.rel_tol;
    let r2 = radius * radius;
    let inv_a = 1.0 / a;
    // ∫_0^{R² min(e^x, 1)} in u = s^{α/2}
    let head_end = if x < 0.0 { radius.powf(2.0 * a) * (a * x).exp() } else { radius.powf(2.0 * a) };
    let head = gauss_kronrod(|u: f64| inv_a * (u.powf(inv_a) / r2 + 1.0).powf(-m), 0.0, head_end, 0.0, rel)?.value;
    if x <= 0.0 {
        return Ok(head);
    }
    let tail = gauss_kronrod(|t: f64| ((a - m) * t).exp() * (1.0 + (-t).exp()).powf(-m), 0.0, x, 0.0, rel)?.value;
    Ok(head + r2.powf(a) * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_2f1;
    use approx::assert_relative_eq;

    fn brute(w: f64, alpha: f64, n: usize, radius: f64) -> f64 {
        let r2 = radius * radius;
        crate::quad::tanh_sinh(
            |s: f64| s.powf(0.5 * alpha - 1.0) * (1.0 + s / r2).powf(-0.5 * n as f64),
            0.0,
            w,
            1e-13,
        )
        .unwrap()
        .value
    }

    #[test]
    fn zero_and_infinity() {
        assert_eq!(kernel_integral(0.0, 1.0, 3, 1.0).unwrap(), 0.0);
        assert_relative_eq!(kernel_integral(f64::INFINITY, 1.0, 3, 1.0).unwrap(), 2.0, max_relative = 1e-14);
        assert!(matches!(kernel_integral(f64::INFINITY, 1.0, 1, 1.0), Err(Error::Divergent(_))));
        assert!(matches!(kernel_integral(f64::INFINITY, 1.5, 1, 1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn infinity_by_quadrature() {
        // substitute s = t/(1-t) to reach infinity on a finite interval
        let q = crate::quad::tanh_sinh(
            |t: f64| {
                let s = t / (1.0 - t);
                s.powf(-0.5) * (1.0 + s).powf(-1.5) / ((1.0 - t) * (1.0 - t))
            },
            0.0,
            1.0,
            1e-13,
        )
        .unwrap()
        .value;
        assert_relative_eq!(q, 2.0, max_relative = 1e-11);
    }

    #[test]
    fn matches_direct_quadrature() {
        for &(alpha, n, radius) in &[(0.5, 1, 1.0), (1.0, 2, 0.7), (1.5, 3, 2.0), (1.0, 1, 1.0), (1.9, 2, 1.3)] {
            for &w in &[1e-6, 0.3, 1.0, 4.5, 80.0, 1e4] {
                let v = kernel_integral(w, alpha, n, radius).unwrap();
                assert_relative_eq!(v, brute(w, alpha, n, radius), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn hypergeometric_identity_with_corrected_scaling() {
        // I(w) = (2 w^{α/2}/α) ₂F₁(N/2, α/2; 1+α/2; -w/R²)
        for &(alpha, n, radius) in &[(0.8, 2, 1.0), (1.0, 3, 1.0), (1.5, 3, 0.6), (0.5, 2, 2.5)] {
            for &w in &[0.01f64, 0.9, 7.0, 300.0] {
                let hyp = 2.0 * w.powf(0.5 * alpha) / alpha
                    * gauss_2f1(0.5 * n as f64, 0.5 * alpha, 1.0 + 0.5 * alpha, -w / (radius * radius)).unwrap();
                assert_relative_eq!(kernel_integral(w, alpha, n, radius).unwrap(), hyp, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn unscaled_identity_fails_off_unit_radius() {
        let (alpha, n, radius, w) = (1.0, 3usize, 2.0f64, 0.5f64);
        let unscaled = 2.0 * radius.powf(2.0 * alpha) * w.powf(0.5 * alpha) / alpha
            * gauss_2f1(1.5, 0.5, 1.5, -radius * radius * w).unwrap();
        let truth = kernel_integral(w, alpha, n, radius).unwrap();
        assert!(((unscaled - truth) / truth).abs() > 0.1);
    }

    #[test]
    fn log_ratio_form() {
        let v = kernel_integral(250.0, 0.9, 2, 1.5).unwrap();
        assert_relative_eq!(kernel_integral_log_ratio((250.0f64 / 2.25).ln(), 0.9, 2, 1.5).unwrap(), v, max_relative = 1e-13);
        // N < α: I grows like (2/(α−N)) R^{2N−α}... use the log form far past overflow
        let big = kernel_integral_log_ratio(2000.0, 1.5, 1, 1.0).unwrap();
        assert!(big.is_finite() || big == f64::INFINITY);
        let n1a1 = kernel_integral_log_ratio(1000.0, 1.0, 1, 1.0).unwrap();
        // I ≈ ∫_0^1 + ∫_0^X (1+e^{-t})^{-1/2} dt ≈ X + const
        assert!((n1a1 - 1000.0).abs() < 3.0);
    }

    #[test]
    fn monotone_and_bounded() {
        let mut prev = 0.0;
        for i in 1..200 {
            let w = 0.05 * i as f64 * i as f64;
            let v = kernel_integral(w, 1.3, 2, 1.0).unwrap();
            assert!(v >= prev);
            assert!(v <= 2.0 / 1.3 * w.powf(0.65) * (1.0 + 1e-12));
            prev = v;
        }
    }
}
