//! The Green function of the fractional Dirichlet problem on a ball, the
//! potential of radial data, the profile ψ and the best constant in the
//! `L^p → L^∞` estimate for radial problems.
//!
//! With `κ_G = Γ(N/2) / (2^α π^{N/2} Γ(α/2)²)` and
//! `z = (R² − |x|²)(R² − |y|²)/|x − y|²`, the kernel is
//! `𝒢(x, y) = −κ_G R^{−α} |x − y|^{α−N} ∫₀^z s^{α/2−1}(1 + s/R²)^{−N/2} ds`.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{BallGeometry, FracParams};
use crate::quad::tanh_sinh;
use crate::rearrange::{lorentz_norm, schwarz_profile_to_radial, DecreasingProfile, LorentzExponents};
use crate::specfun::{beta, gamma, gauss_2f1_unit, kernel_integral, kernel_integral_log_ratio, Accuracy};

/// `κ_G = Γ(N/2) / (2^α π^{N/2} Γ(α/2)²)`.
pub fn green_prefactor(n: usize, fp: &FracParams) -> f64 {
    let half_n = 0.5 * n as f64;
    let ga = gamma(0.5 * fp.alpha).expect("α/2 ∈ (0,1)");
    gamma(half_n).expect("N ≥ 1") / (2f64.powf(fp.alpha) * PI.powf(half_n) * ga * ga)
}

/// Positive kernel `−𝒢` from the radii of the two points and their
/// squared distance.
fn kernel_from_radii(r: f64, rp: f64, d2: f64, geom: &BallGeometry, fp: &FracParams, pref: f64) -> Result<f64> {
    let r2 = geom.radius * geom.radius;
    let gap = (r2 - r * r) * (r2 - rp * rp);
    if gap <= 0.0 {
        return Ok(0.0);
    }
    if d2 == 0.0 {
        return Ok(f64::INFINITY);
    }
    let z = gap / d2;
    let i = kernel_integral(z, fp.alpha, geom.n, geom.radius)?;
    Ok(pref * geom.radius.powf(-fp.alpha) * d2.powf(0.5 * (fp.alpha - geom.n as f64)) * i)
}

/// `𝒢_{B(0,R)}(x, y)`, negative off the diagonal.
pub fn green_ball(x: &[f64], y: &[f64], geom: &BallGeometry, fp: &FracParams) -> Result<f64> {
    if x.len() != geom.n || y.len() != geom.n {
        return Err(Error::Parameter(format!("points must have {} coordinates", geom.n)));
    }
    let norm2 = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>();
    let r2 = geom.radius * geom.radius;
    if norm2(x) > r2 || norm2(y) > r2 {
        return Err(Error::Domain { function: "green_ball", detail: "points must lie in the closed ball".into() });
    }
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 == 0.0 {
        return Err(Error::Domain { function: "green_ball", detail: "x = y: the kernel is singular on the diagonal".into() });
    }
    let k = kernel_from_radii(norm2(x).sqrt(), norm2(y).sqrt(), d2, geom, fp, green_prefactor(geom.n, fp))?;
    Ok(-k)
}

/// The constants `(𝖺, 𝖻)` with `|𝒢(x, y)| ≤ 𝖺𝖻 |x − y|^{α−N}`:
/// `𝖺 = κ_G R^{N−α}` and `𝖻 = ∫₀^∞ s^{α/2−1}(s + R²)^{−N/2} ds = R^{α−N} B(α/2, (N−α)/2)`.
pub fn green_bound_constants(geom: &BallGeometry, fp: &FracParams) -> Result<(f64, f64)> {
    let n = geom.n as f64;
    if n <= fp.alpha {
        return Err(Error::Divergent(format!("the bound constant needs N > alpha (N = {}, alpha = {})", geom.n, fp.alpha)));
    }
    let a = green_prefactor(geom.n, fp) * geom.radius.powf(n - fp.alpha);
    let b = geom.radius.powf(-n) * kernel_integral(f64::INFINITY, fp.alpha, geom.n, geom.radius)?;
    Ok((a, b))
}

/// Runs a quadrature whose integrand may fail; the first failure wins.
fn fallible_quad<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let q = tanh_sinh(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        rel_tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(q?.value)
}

/// Mean of `−𝒢(x, y)` over the sphere `|y| = rp` for a fixed `|x| = r`.
pub fn kernel_sphere_mean(r: f64, rp: f64, geom: &BallGeometry, fp: &FracParams) -> Result<f64> {
    sphere_mean_with_gap(r, rp, (r - rp).abs(), geom, fp)
}

/// As [`kernel_sphere_mean`] with `|r − rp|` supplied exactly by the caller.
fn sphere_mean_with_gap(r: f64, rp: f64, gap: f64, geom: &BallGeometry, fp: &FracParams) -> Result<f64> {
    let pref = green_prefactor(geom.n, fp);
    if r == 0.0 || rp == 0.0 {
        let d2 = (r + rp) * (r + rp);
        return kernel_from_radii(r, rp, d2, geom, fp, pref);
    }
    if geom.n == 1 {
        let near = kernel_from_radii(r, rp, gap * gap, geom, fp, pref)?;
        let far = kernel_from_radii(r, rp, (r + rp) * (r + rp), geom, fp, pref)?;
        return Ok(0.5 * (near + far));
    }
    let n = geom.n as f64;
    let dr2 = gap * gap;
    let weight = |theta: f64| if geom.n == 2 { 1.0 } else { theta.sin().powf(n - 2.0) };
    let norm = PI.sqrt() * gamma(0.5 * (n - 1.0))? / gamma(0.5 * n)?;
    let total = fallible_quad(
        |theta| {
            let s = (0.5 * theta).sin();
            let d2 = dr2 + 4.0 * r * rp * s * s;
            Ok(kernel_from_radii(r, rp, d2, geom, fp, pref)? * weight(theta))
        },
        0.0,
        PI,
        1e-11,
    )?;
    Ok(total / norm)
}

/// `φ(r) = −∫ 𝒢(x, y) f^#(y) dy` at `|x| = r` for the Schwarz
/// symmetrization of `fstar` on the ball `geom`.
///
/// The radial integral is split at `r` and at every jump of the step profile;
/// each piece uses tanh–sinh. Pieces touching `r` are integrated in the
/// offset `δ = |r' − r|` so the weak singularity is resolved without
/// cancellation. Cost grows linearly with the number of profile blocks.
pub fn radial_potential(fstar: &DecreasingProfile, geom: &BallGeometry, fp: &FracParams, r: f64) -> Result<f64> {
    if (fstar.measure() - geom.measure).abs() > 1e-10 * geom.measure {
        return Err(Error::Parameter(format!(
            "profile measure {} does not match the ball measure {}",
            fstar.measure(),
            geom.measure
        )));
    }
    if !(0.0..=geom.radius).contains(&r) {
        return Err(Error::OutOfRange(format!("radius {r} outside [0, {}]", geom.radius)));
    }
    if r == geom.radius {
        return Ok(0.0);
    }
    let radial = schwarz_profile_to_radial(fstar, geom.n)?;
    let mut cuts = radial.jump_radii();
    cuts.push(r);
    cuts.iter_mut().for_each(|c| *c = c.clamp(0.0, geom.radius));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let n = geom.n as i32;
    let surface = geom.n as f64 * geom.omega_n;
    // Offsets below this are dropped; the lost mass is O(floor^α).
    let floor = 1e-30 * geom.radius;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let f_here = radial.eval(0.5 * (lo + hi));
        if f_here == 0.0 {
            continue;
        }
        let piece = if hi == r {
            fallible_quad(
                |d| {
                    if d < floor {
                        return Ok(0.0);
                    }
                    let rp = r - d;
                    Ok(rp.powi(n - 1) * sphere_mean_with_gap(r, rp, d, geom, fp)?)
                },
                0.0,
                r - lo,
                1e-10,
            )?
        } else if lo == r {
            fallible_quad(
                |d| {
                    if d < floor {
                        return Ok(0.0);
                    }
                    let rp = r + d;
                    Ok(rp.powi(n - 1) * sphere_mean_with_gap(r, rp, d, geom, fp)?)
                },
                0.0,
                hi - r,
                1e-10,
            )?
        } else {
            fallible_quad(|rp| Ok(rp.powi(n - 1) * kernel_sphere_mean(r, rp, geom, fp)?), lo, hi, 1e-10)?
        };
        total += f_here * piece;
    }
    Ok(surface * total)
}

/// `ψ(t) = −κ_G R^{−α} t^{α−N} I(R²(R² − t²)/t²)`, the kernel seen from the
/// centre, evaluated at `t = (s/ω_N)^{1/N}`. Here `R` is the radius of `geom`.
/// `ψ(0⁺)` is `−∞` when `N ≥ α` and finite otherwise.
pub fn psi_profile(s: f64, geom: &BallGeometry, fp: &FracParams) -> Result<f64> {
    if !(s >= 0.0) || s > geom.measure * (1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!("s = {s} outside [0, {}]", geom.measure)));
    }
    let n = geom.n as f64;
    let pref = green_prefactor(geom.n, fp);
    let r2 = geom.radius * geom.radius;
    if s == 0.0 {
        if n >= fp.alpha {
            return Ok(f64::NEG_INFINITY);
        }
        return Ok(-2.0 * pref * geom.radius.powf(fp.alpha - n) / (fp.alpha - n));
    }
    let t = (s / geom.omega_n).powf(1.0 / n);
    if t >= geom.radius {
        return Ok(0.0);
    }
    // upper limit R²(R² − t²)/t², passed as its log ratio to R²
    let x = ((r2 - t * t) / r2).ln() - 2.0 * (t / geom.radius).ln();
    let i = kernel_integral_log_ratio(x, fp.alpha, geom.n, geom.radius)?;
    Ok(-pref * geom.radius.powf(-fp.alpha) * t.powf(fp.alpha - n) * i)
}

/// `𝓑_{N,α} = −(2κ_G/α) ω_N^{(N−α)/N}`, so that
/// `ψ((s/ω_N)^{1/N}) = 𝓑 s^{(α−N)/N} hyper_aux(s)`.
pub fn best_constant_prefactor(n: usize, fp: &FracParams) -> f64 {
    let omega = crate::params::unit_ball_volume(n);
    -2.0 * green_prefactor(n, fp) / fp.alpha * omega.powf((n as f64 - fp.alpha) / n as f64)
}

/// `s^{−α/N} (|Ω|^{2/N} − s^{2/N})^{α/2} ₂F₁(N/2, α/2; 1 + α/2; (s^{2/N} − |Ω|^{2/N})/s^{2/N})`.
///
/// The hypergeometric factor is evaluated after a Pfaff transformation,
/// `₂F₁(N/2, α/2; 1+α/2; x) = (1−x)^{−α/2} ₂F₁(α/2, 1+α/2−N/2; 1+α/2; ζ)` with
/// `ζ = 1 − (s/|Ω|)^{2/N}`, which stays bounded as `s → 0`. Falls back to the
/// kernel integral where the connection formula is undefined (`N = α = 1`).
pub fn hyper_aux(s: f64, geom: &BallGeometry, fp: &FracParams) -> Result<f64> {
    if !(s > 0.0) || s > geom.measure * (1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!("s = {s} outside (0, {}]", geom.measure)));
    }
    let n = geom.n as f64;
    let e = 2.0 / n;
    let w = (s / geom.measure).powf(e);
    if w >= 1.0 {
        return Ok(0.0);
    }
    let gap = geom.measure.powf(e) - s.powf(e);
    let a = 0.5 * fp.alpha;
    match gauss_2f1_unit(a, 1.0 + a - 0.5 * n, 1.0 + a, 1.0 - w, w, &Accuracy::default()) {
        Ok(f) => Ok(geom.measure.powf(-fp.alpha / n) * gap.powf(a) * f),
        Err(Error::TransformationUndefined { .. }) => {
            let psi = psi_profile(s, geom, fp)?;
            Ok(psi * s.powf((n - fp.alpha) / n) / best_constant_prefactor(geom.n, fp))
        }
        Err(e) => Err(e),
    }
}

fn check_best_constant_range(geom: &BallGeometry, fp: &FracParams, p: f64) -> Result<f64> {
    let crit = geom.n as f64 / fp.alpha;
    if !(p > crit) {
        return Err(Error::Divergent(format!("the best constant is finite only for p > N/alpha = {crit}, got p = {p}")));
    }
    Ok(if p == f64::INFINITY { 1.0 } else { p / (p - 1.0) })
}

/// Integrates `g(s) s^{−e}` over `(0, |Ω|)` after `s = |Ω| u^k` with
/// `k = 1/(1 − e)`, which turns the power singularity into a bounded factor.
fn integrate_singular<F>(g: F, e: f64, measure: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let k = 1.0 / (1.0 - e);
    let scale = measure.powf(1.0 - e) * k;
    let v = fallible_quad(
        |u| {
            if u == 0.0 {
                return Ok(0.0);
            }
            let s = measure * u.powf(k);
            if s == 0.0 {
                return Ok(f64::NAN);
            }
            Ok(g(s)?)
        },
        0.0,
        1.0,
        1e-12,
    )?;
    Ok(scale * v)
}

/// `𝖢(N, p, α, Ω) = |𝓑| (∫₀^{|Ω|} s^{(α−N)p′/N} hyper_aux(s)^{p′} ds)^{1/p′}`,
/// the `L^{p′}` norm of `ψ((s/ω_N)^{1/N})`. Finite iff `p > N/α`.
pub fn best_constant(geom: &BallGeometry, fp: &FracParams, p: f64) -> Result<f64> {
    let pp = check_best_constant_range(geom, fp, p)?;
    let n = geom.n as f64;
    let e = (n - fp.alpha) * pp / n;
    let v = integrate_singular(|s| Ok(hyper_aux(s, geom, fp)?.powf(pp)), e, geom.measure)?;
    Ok(best_constant_prefactor(geom.n, fp).abs() * v.powf(1.0 / pp))
}

/// The same constant computed straight from [`psi_profile`], i.e. through
/// the kernel integral rather than the hypergeometric function.
pub fn best_constant_by_kernel(geom: &BallGeometry, fp: &FracParams, p: f64) -> Result<f64> {
    let pp = check_best_constant_range(geom, fp, p)?;
    let n = geom.n as f64;
    let e = (n - fp.alpha) * pp / n;
    let v = integrate_singular(
        |s| Ok((psi_profile(s, geom, fp)?.abs() * s.powf((n - fp.alpha) / n)).powf(pp)),
        e,
        geom.measure,
    )?;
    Ok(v.powf(1.0 / pp))
}

/// Closed form for `N = 3`, `α = 1`, `Ω = B(0, 1)`:
/// `(2π)^{1/p′}/(2π²) · B((p−3)/(2(p−1)), (3p−2)/(2(p−1)))^{(p−1)/p}`.
pub fn best_constant_unit_ball_3d(p: f64) -> Result<f64> {
    if !(p > 3.0) {
        return Err(Error::Divergent(format!("closed form needs p > 3, got {p}")));
    }
    if p == f64::INFINITY {
        return Ok(0.5);
    }
    let pp = p / (p - 1.0);
    let b = beta((p - 3.0) / (2.0 * (p - 1.0)), (3.0 * p - 2.0) / (2.0 * (p - 1.0)))?;
    Ok((2.0 * PI).powf(1.0 / pp) / (2.0 * PI * PI) * b.powf((p - 1.0) / p))
}

/// `‖|x|^{α−N}‖_{L^{N/(N−α),∞}(ℝ^N)} = ω_N^{(N−α)/N}`.
pub fn riesz_weak_norm(n: usize, alpha: f64) -> f64 {
    crate::params::unit_ball_volume(n).powf((n as f64 - alpha) / n as f64)
}

/// Bound on `‖φ‖_∞ = φ(0)` for the symmetrized problem:
/// `𝖺𝖻 ∫ f^#(y)|y|^{α−N} dy = 𝖺𝖻 ω_N^{(N−α)/N} ‖f‖_{L^{N/α,1}}`.
pub fn linfty_bound(fstar: &DecreasingProfile, geom: &BallGeometry, fp: &FracParams) -> Result<f64> {
    let (a, b) = green_bound_constants(geom, fp)?;
    let norm = lorentz_norm(fstar, LorentzExponents::new(geom.n as f64 / fp.alpha, 1.0)?);
    Ok(a * b * riesz_weak_norm(geom.n, fp.alpha) * norm)
}
