use super::gamma::{gamma, recip_gamma};
use super::Accuracy;
use crate::error::{Error, Result};

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Hypergeometric series summed to machine precision; terminates when `a`
/// or `b` is a nonpositive integer.
fn series(a: f64, b: f64, c: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..acc.max_terms {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        if term == 0.0 {
            return Ok(sum);
        }
        sum += term;
        if term.abs() <= 0.5 * f64::EPSILON * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence { function: "gauss_2f1", terms: acc.max_terms })
}

/// Connection formula at `z` close to 1:
/// `F(a,b;c;z) = A F(a,b;a+b-c+1;1-z) + B (1-z)^{c-a-b} F(c-a,c-b;c-a-b+1;1-z)`.
fn one_minus_z(a: f64, b: f64, c: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    one_minus_w(a, b, c, 1.0 - z, acc)
}

fn one_minus_w(a: f64, b: f64, c: f64, w: f64, acc: &Accuracy) -> Result<f64> {
    let d = c - a - b;
    if (d - d.round()).abs() < 1e-8 {
        return Err(Error::TransformationUndefined { a, b, c });
    }
    let first = gamma(c)? * gamma(d)? * recip_gamma(c - a) * recip_gamma(c - b);
    let second = gamma(c)? * gamma(-d)? * recip_gamma(a) * recip_gamma(b);
    let mut value = 0.0;
    if first != 0.0 {
        value += first * series(a, b, 1.0 - d, w, acc)?;
    }
    if second != 0.0 {
        value += second * w.powf(d) * series(c - a, c - b, 1.0 + d, w, acc)?;
    }
    Ok(value)
}

/// Gauss hypergeometric function `₂F₁(a, b; c; x)` for `x ≤ 0`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    gauss_2f1_with(a, b, c, x, &Accuracy::default())
}

/// As [`gauss_2f1`] with an explicit series cap.
///
/// The series is used directly on `[-1/2, 0]`. Further out, a Pfaff
/// transformation maps `x` to `z = x/(x-1) ∈ (1/3, 1)`; if `z` is still
/// close to 1 the `1-z` connection formula finishes the job.
pub fn gauss_2f1_with(a: f64, b: f64, c: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Parameter(format!("gauss_2f1: c = {c} is a nonpositive integer")));
    }
    if !(x <= 0.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(Error::Domain { function: "gauss_2f1", detail: format!("needs finite parameters and x <= 0, got x = {x}") });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == f64::NEG_INFINITY {
        return Err(Error::Domain { function: "gauss_2f1", detail: "x = -inf".into() });
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) || x >= -0.5 {
        return series(a, b, c, x, acc);
    }
    let z = x / (x - 1.0);
    let w = 1.0 - x;
    // Both Pfaff forms: (1-x)^{-a} F(a, c-b; c; z) and (1-x)^{-b} F(b, c-a; c; z).
    if is_nonpositive_integer(c - b) {
        return Ok(w.powf(-a) * series(a, c - b, c, z, acc)?);
    }
    if is_nonpositive_integer(c - a) {
        return Ok(w.powf(-b) * series(b, c - a, c, z, acc)?);
    }
    if z <= 0.9 {
        return Ok(w.powf(-a) * series(a, c - b, c, z, acc)?);
    }
    Ok(w.powf(-a) * one_minus_z(a, c - b, c, z, acc)?)
}

/// `₂F₁(a, b; c; z)` for `z ∈ [0, 1]` with the complement `w = 1 − z`
/// supplied exactly, so arguments next to 1 keep full accuracy.
pub(crate) fn gauss_2f1_unit(a: f64, b: f64, c: f64, z: f64, w: f64, acc: &Accuracy) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Parameter(format!("gauss_2f1: c = {c} is a nonpositive integer")));
    }
    if !(w >= 0.0 && w <= 1.0) {
        return Err(Error::Domain { function: "gauss_2f1", detail: format!("needs 0 <= z <= 1, got 1 - z = {w}") });
    }
    if w == 1.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) || z <= 0.9 {
        return series(a, b, c, z, acc);
    }
    if w == 0.0 {
        // Gauss summation; the function is unbounded at 1 when c - a - b <= 0
        let d = c - a - b;
        if d <= 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok(gamma(c)? * gamma(d)? * recip_gamma(c - a) * recip_gamma(c - b));
    }
    one_minus_w(a, b, c, w, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_argument() {
        assert_eq!(gauss_2f1(0.3, 1.7, 2.2, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn half_power_identity() {
        for i in 0..=200 {
            let z = 0.5 * i as f64;
            let v = gauss_2f1(1.5, 0.5, 1.5, -z).unwrap();
            assert_relative_eq!(v, 1.0 / (1.0 + z).sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn elementary_forms() {
        // ₂F₁(1,1;2;-x) = ln(1+x)/x: c-a-b = 0 is integer, exercised only where the
        // series or a terminating form applies.
        for &x in &[0.1, 0.4, 0.5] {
            assert_relative_eq!(gauss_2f1(1.0, 1.0, 2.0, -x).unwrap(), (1.0 + x).ln() / x, max_relative = 1e-14);
        }
        // ₂F₁(a,b;b;x) = (1-x)^{-a}
        for &x in &[-0.3, -3.0, -40.0, -1e4] {
            assert_relative_eq!(gauss_2f1(0.7, 2.3, 2.3, x).unwrap(), (1.0 - x).powf(-0.7), max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_case_against_pfaff_oracle() {
        // N=2, α=0.8: F(1, 0.4; 1.4; -5); reference from a 30-digit evaluation.
        let v = gauss_2f1(1.0, 0.4, 1.4, -5.0).unwrap();
        assert_relative_eq!(v, 0.569_679_358_711_733_7, max_relative = 1e-13);
        // Independent route: after Pfaff the series in z = 5/6 converges; sum it long.
        let z: f64 = 5.0 / 6.0;
        let (a, b, c) = (1.0, 1.4 - 0.4, 1.4);
        let mut term = 1.0;
        let mut sum = crate::fsum::ExactSum::new();
        sum.add(1.0);
        for n in 0..2000 {
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
            sum.add(term);
        }
        assert_relative_eq!(v, 6f64.powf(-1.0) * sum.value(), max_relative = 1e-12);
    }

    #[test]
    fn matches_series_inside_half_disk() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = rng.gen_range(0.1..3.0);
            let b = rng.gen_range(0.1..3.0);
            let c = rng.gen_range(0.5..4.0);
            let x = rng.gen_range(-0.5..0.0);
            let mut term = 1.0;
            let mut sum = 1.0;
            for n in 0..400 {
                let nf = n as f64;
                term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
                sum += term;
            }
            assert_relative_eq!(gauss_2f1(a, b, c, x).unwrap(), sum, max_relative = 1e-10);
        }
    }

    #[test]
    fn connection_formula_against_quadrature() {
        // Euler integral: F(a,b;c;x) = Γ(c)/(Γ(b)Γ(c-b)) ∫_0^1 t^{b-1}(1-t)^{c-b-1}(1-xt)^{-a} dt
        for &(a, b, c, x) in &[(1.5, 0.25, 1.25, -50.0), (2.5, 0.75, 1.75, -1e3), (1.0, 0.3, 1.3, -200.0)] {
            let pre = gamma(c).unwrap() / (gamma(b).unwrap() * gamma(c - b).unwrap());
            let q = crate::quad::tanh_sinh(
                |t: f64| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - x * t).powf(-a),
                0.0,
                1.0,
                1e-13,
            )
            .unwrap()
            .value;
            assert_relative_eq!(gauss_2f1(a, b, c, x).unwrap(), pre * q, max_relative = 1e-10);
        }
    }

    #[test]
    fn unit_interval_form() {
        // F(a,b;b;z) = (1-z)^{-a}
        for &w in &[0.9, 0.2, 1e-3, 1e-12] {
            let z = 1.0 - w;
            let v = gauss_2f1_unit(0.4, 1.3, 1.3, z, w, &Accuracy::default()).unwrap();
            assert_relative_eq!(v, w.powf(-0.4), max_relative = 1e-12);
        }
        // Gauss summation at z → 1: Γ(c)Γ(c-a-b)/(Γ(c-a)Γ(c-b))
        let (a, b, c) = (0.5, 0.25, 1.5);
        let v = gauss_2f1_unit(a, b, c, 1.0 - 1e-300, 1e-300, &Accuracy::default()).unwrap();
        let exact = gamma(c).unwrap() * gamma(c - a - b).unwrap() / (gamma(c - a).unwrap() * gamma(c - b).unwrap());
        assert_relative_eq!(v, exact, max_relative = 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(gauss_2f1(1.0, 1.0, -2.0, -0.1), Err(Error::Parameter(_))));
        assert!(gauss_2f1(1.0, 1.0, 2.0, 0.5).is_err());
        // c - a - b integer with no terminating form
        assert!(matches!(gauss_2f1(0.5, 0.5, 1.5, -100.0), Err(Error::TransformationUndefined { .. })));
    }
}
