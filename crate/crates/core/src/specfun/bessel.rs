use std::f64::consts::PI;

use super::gamma::{gamma, recip_gamma_1p, sin_pi, RECIP_GAMMA_TAYLOR};
use super::Accuracy;
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const FPMIN: f64 = f64::MIN_POSITIVE / f64::EPSILON;
const MAX_CF_ITER: usize = 200_000;
const SERIES_CROSSOVER: f64 = 2.0;

fn check_order(function: &'static str, nu: f64) -> Result<()> {
    if !nu.is_finite() || nu < -0.5 {
        return Err(Error::Domain { function, detail: format!("order must be >= -1/2, got {nu}") });
    }
    Ok(())
}

/// `x^{-ν} J_ν(x)` from the ascending series; fine for any `x ≥ 0` but only
/// used where the terms do not cancel badly.
fn j_over_pow_series(nu: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    let q = -0.25 * x * x;
    let mut term = 2f64.powf(-nu) / gamma(nu + 1.0)?;
    let mut sum = term;
    for k in 1..acc.max_terms {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 0.5 * EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence { function: "bessel_j", terms: acc.max_terms })
}

/// Steed's method for `ν ≥ 0`, `x ≥ 2`: returns `(J_ν, J_ν', Y_ν, Y_ν')`.
fn steed(nu: f64, x: f64) -> Result<(f64, f64, f64, f64)> {
    let nl = (nu - x + 1.5).max(0.0).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J_ν'/J_ν
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAX_CF_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { function: "bessel_j", terms: MAX_CF_ITER });
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    let mut converged = false;
    for i in 1..MAX_CF_ITER {
        a += 2.0 * i as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() <= EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { function: "bessel_j", terms: MAX_CF_ITER });
    }

    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let mut rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let mut ry1 = xmu * xi * rymu - rymup;
    let scale = rjmu / rjl;
    let rj = rjl1 * scale;
    let rjp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    let ry = rymu;
    let ryp = nu * xi * rymu - ry1;
    Ok((rj, rjp, ry, ryp))
}

const HANKEL_MIN_X: f64 = 25.0;

/// `J_ν(x)` from Hankel's asymptotic expansion; `None` when the series does
/// not reach full precision before its terms start growing.
fn hankel_j(nu: f64, x: f64) -> Option<f64> {
    let m = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let next = term * (m - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() > term.abs() && k > 1 {
            return None;
        }
        term = next;
        // terms alternate between Q (odd k) and P (even k) with signs − + − + …
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() <= 0.25 * EPS {
            break;
        }
        k += 1;
        if k > 200 {
            return None;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    Some((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// `(J_ν(x), J_ν'(x))` for `ν ≥ -1/2`, `x > 0`.
fn j_and_deriv(nu: f64, x: f64) -> Result<(f64, f64)> {
    let acc = Accuracy::default();
    if x >= HANKEL_MIN_X.max(4.0 * nu * nu) {
        if let (Some(j), Some(j1)) = (hankel_j(nu, x), hankel_j(nu + 1.0, x)) {
            return Ok((j, nu / x * j - j1));
        }
    }
    if x <= SERIES_CROSSOVER {
        let pow = x.powf(nu);
        let j = pow * j_over_pow_series(nu, x, &acc)?;
        let j1 = pow * x * j_over_pow_series(nu + 1.0, x, &acc)?;
        return Ok((j, nu / x * j - j1));
    }
    if nu >= 0.0 {
        let (j, jp, _, _) = steed(nu, x)?;
        return Ok((j, jp));
    }
    // J_{-μ} = cos(μπ) J_μ - sin(μπ) Y_μ
    let mu = -nu;
    let (j, jp, y, yp) = steed(mu, x)?;
    let c = sin_pi(mu + 0.5);
    let s = sin_pi(mu);
    Ok((c * j - s * y, c * jp - s * yp))
}

/// Bessel function of the first kind `J_ν(x)` for `ν ≥ -1/2`, `x ≥ 0`.
///
/// Ascending series for `x ≤ 2`, Steed's continued-fraction method beyond.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_j", nu)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "bessel_j", detail: format!("needs finite x >= 0, got {x}") });
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    Ok(j_and_deriv(nu, x)?.0)
}

/// Derivative `J_ν'(x)` for `x > 0`.
pub fn bessel_j_deriv(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_j_deriv", nu)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "bessel_j_deriv", detail: format!("needs finite x > 0, got {x}") });
    }
    Ok(j_and_deriv(nu, x)?.1)
}

/// `x^{-ν} J_ν(x)`, an entire function of `x`; equals `2^{-ν}/Γ(ν+1)` at 0.
pub fn bessel_j_over_pow(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_j_over_pow", nu)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "bessel_j_over_pow", detail: format!("needs finite x >= 0, got {x}") });
    }
    if x <= SERIES_CROSSOVER {
        return j_over_pow_series(nu, x, &Accuracy::default());
    }
    Ok(j_and_deriv(nu, x)?.0 * x.powf(-nu))
}

/// McMahon's large-k approximation to the k-th positive zero of `J_ν`.
pub fn mcmahon_zero(nu: f64, k: usize) -> f64 {
    let m = 4.0 * nu * nu;
    let b = (k as f64 + 0.5 * nu - 0.25) * PI;
    let e = 1.0 / (8.0 * b);
    b - (m - 1.0) * e
        - 4.0 * (m - 1.0) * (7.0 * m - 31.0) * e.powi(3) / 3.0
        - 32.0 * (m - 1.0) * (83.0 * m * m - 982.0 * m + 3779.0) * e.powi(5) / 15.0
}

fn refine_zero(nu: f64, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (j, jp) = j_and_deriv(nu, x)?;
        if j == 0.0 {
            return Ok(x);
        }
        if (j > 0.0) == (f_lo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - j / jp;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 4.0 * EPS * x {
            return Ok(next);
        }
        x = next;
        if hi - lo <= 4.0 * EPS * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(x)
}

/// The first `count` positive zeros of `J_ν`, `ν ≥ -1/2`, in increasing order.
///
/// Sign changes are located by a scan whose step is shorter than the minimal
/// zero spacing for these orders, so no root is skipped; each root is then
/// polished by safeguarded Newton. The result is checked against the
/// interlacing `j_{ν,k} < j_{ν+1,k} < j_{ν,k+1}`.
pub fn bessel_j_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    check_order("bessel_j_zeros", nu)?;
    if count == 0 {
        return Err(Error::Parameter("at least one zero must be requested".into()));
    }
    const STEP: f64 = 1.0;
    let mut zeros = Vec::with_capacity(count);
    let mut x0 = nu.max(1e-3);
    let mut f0 = j_and_deriv(nu, x0)?.0;
    while zeros.len() < count {
        let x1 = x0 + STEP;
        let f1 = j_and_deriv(nu, x1)?.0;
        if f1 == 0.0 {
            zeros.push(x1);
            x0 = x1 + 1e-9 * x1;
            f0 = j_and_deriv(nu, x0)?.0;
            continue;
        }
        if (f0 > 0.0) != (f1 > 0.0) {
            zeros.push(refine_zero(nu, x0, x1, f0)?);
        }
        x0 = x1;
        f0 = f1;
    }
    // interlacing audit against J_{ν+1}
    for (k, pair) in zeros.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let ja = j_and_deriv(nu + 1.0, a)?.0;
        let jb = j_and_deriv(nu + 1.0, b)?.0;
        if !(b > a) || (ja > 0.0) == (jb > 0.0) {
            return Err(Error::Bracketing { order: nu, index: k + 1 });
        }
    }
    Ok(zeros)
}

/// Modified Bessel function of the second kind `K_ν(x)`, `x > 0`.
///
/// Temme's series for `x < 2` and Steed's continued fraction above, followed
/// by upward recurrence in the order. `K_{-ν} = K_ν`. Underflows to 0 for
/// large `x` (beyond about 700).
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain { function: "bessel_k", detail: format!("needs x > 0, got {x}") });
    }
    if !nu.is_finite() {
        return Err(Error::Domain { function: "bessel_k", detail: format!("non-finite order {nu}") });
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let nu = nu.abs();
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let (mut rkmu, mut rk1);
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_CF_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { function: "bessel_k", terms: MAX_CF_ITER });
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 1..MAX_CF_ITER {
            let fi = i as f64;
            a -= 2.0 * fi;
            c = -a * c / (fi + 1.0);
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { function: "bessel_k", terms: MAX_CF_ITER });
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    Ok(rkmu)
}

/// The auxiliary Gamma combinations of Temme's method for `|μ| ≤ 1/2`:
/// `Γ1 = (1/Γ(1-μ) - 1/Γ(1+μ))/(2μ)`, `Γ2 = (1/Γ(1-μ) + 1/Γ(1+μ))/2`,
/// and the two reciprocals themselves.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = recip_gamma_1p(mu);
    let gammi = recip_gamma_1p(-mu);
    // 1/Γ(1+z) = Σ d_j z^j; the odd part gives Γ1 without cancellation.
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut pow = 1.0;
    for j in 0..13 {
        gam2 += RECIP_GAMMA_TAYLOR[2 * j] * pow;
        gam1 -= RECIP_GAMMA_TAYLOR[2 * j + 1] * pow;
        pow *= mu2;
    }
    (gam1, gam2, gampl, gammi)
}
