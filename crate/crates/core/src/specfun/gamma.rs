use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Taylor coefficients of 1/Γ(z) = Σ c_k z^k, k = 1..26.
pub(crate) const RECIP_GAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877,
    0.007_218_943_246_663,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_51,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(x: f64) -> f64 {
    // x has already been shifted by -1
    let mut t = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        t += c / (x + i as f64);
    }
    t
}

/// Gamma function by the Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain { function: "gamma", detail: format!("non-finite argument {x}") });
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { function: "gamma", at: x });
    }
    if x > 171.624_376_956_302_7 {
        return Err(Error::Overflow { function: "gamma", at: x });
    }
    if x < 0.5 {
        let s = sin_pi(x);
        return match gamma(1.0 - x) {
            Ok(g) => Ok(PI / (s * g)),
            // Γ(1-x) overflowing means Γ(x) underflows.
            Err(Error::Overflow { .. }) => Ok(0.0),
            Err(e) => Err(e),
        };
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power to avoid intermediate overflow near the top of the range.
    let half_pow = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half_pow * (-t).exp() * half_pow * lanczos_sum(z))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "ln_gamma", detail: format!("needs x > 0, got {x}") });
    }
    if x < 0.5 {
        return Ok((PI / sin_pi(x)).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// `1/Γ(x)`, which is entire: returns 0 at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x.abs() <= 0.5 {
        return x * recip_gamma_1p(x);
    }
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// `1/Γ(1+z)` from its Taylor series; intended for `|z| ≤ 1/2`.
pub(crate) fn recip_gamma_1p(z: f64) -> f64 {
    // 1/Γ(1+z) = (1/Γ(z))/z = Σ c_{k+1} z^k
    RECIP_GAMMA_TAYLOR.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

/// Euler Beta function `Γ(a)Γ(b)/Γ(a+b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain { function: "beta", detail: format!("needs a, b > 0, got ({a}, {b})") });
    }
    if a + b < 170.0 {
        return Ok(gamma(a)? * gamma(b)? / gamma(a + b)?);
    }
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent route: push the argument up by recurrence and use the
    /// Stirling series for ln Γ with Bernoulli corrections.
    fn stirling_gamma(x: f64) -> f64 {
        let shift = 30usize;
        let mut prod = 1.0;
        for k in 0..shift {
            prod *= x + k as f64;
        }
        let y = x + shift as f64;
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        let ln = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series;
        ln.exp() / prod
    }

    #[test]
    fn exact_values() {
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
        // √π/2 to 30 digits: 0.886226925452758013649083741671
        assert_relative_eq!(gamma(1.5).unwrap(), 0.886_226_925_452_758, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.1).unwrap(), 9.513_507_698_668_732, max_relative = 1e-13);
        assert_relative_eq!(gamma(1.0 / 3.0).unwrap(), 2.678_938_534_707_747_6, max_relative = 1e-13);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn matches_stirling_oracle() {
        for &x in &[0.3, 1.5, 2.25, 3.7, 7.1, 12.5] {
            assert_relative_eq!(gamma(x).unwrap(), stirling_gamma(x), max_relative = 1e-13);
        }
    }

    #[test]
    fn poles_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma(-3.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma(172.0), Err(Error::Overflow { .. })));
        assert!(gamma(171.5).unwrap().is_finite());
    }

    #[test]
    fn recurrence_on_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(0.1..10.0);
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(((lhs - rhs) / rhs).abs() <= 1e-9, "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_consistent() {
        for &x in &[0.2, 1.0, 4.5, 30.0, 150.0] {
            assert_relative_eq!(ln_gamma(x).unwrap(), gamma(x).unwrap().ln(), max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn recip_gamma_taylor_matches() {
        for &z in &[-0.5, -0.3, -0.01, 0.0, 0.2, 0.5] {
            assert_relative_eq!(recip_gamma_1p(z), 1.0 / gamma(1.0 + z).unwrap(), max_relative = 1e-14);
        }
        assert_eq!(recip_gamma(-2.0), 0.0);
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        // B(1/2, 1) = ∫_0^1 t^{-1/2} dt
        let quad = crate::quad::tanh_sinh(|t| t.powf(-0.5), 0.0, 1.0, 1e-13).unwrap().value;
        assert_relative_eq!(beta(0.5, 1.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(quad, 2.0, max_relative = 1e-12);
        assert_eq!(beta(2.3, 0.7).unwrap(), beta(0.7, 2.3).unwrap());
        assert!(beta(0.0, 1.0).is_err());
        assert!(beta(1.0, -1.0).is_err());
    }
}
