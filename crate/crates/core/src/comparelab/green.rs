use std::f64::consts::PI;

use super::report::BoundReport;
use crate::ballgreen::kernel_sphere_mean;
use crate::error::{Error, Result};
use crate::params::{BallGeometry, FracParams};
use crate::rearrange::DecreasingProfile;
use crate::spectral::{ball_extension_separated, build_basis, solve_fractional_dirichlet, DomainSpec, Source};

/// One radial pair `(r, r')` of the Green-function diagnostic; every value
/// is the spherical mean over `|y| = r'` at `|x| = r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSample {
    pub r: f64,
    pub rp: f64,
    /// `−Σ_{k≤K} X_k(r) X_k(r') λ_k^{−α/2}`
    pub series: f64,
    /// `2 max_{K<j≤4K} |S_j − S_K|`
    pub series_tail: f64,
    /// Closed-form kernel of the ball.
    pub closed_form: f64,
    /// Green function of `−Δ` on the ball.
    pub classical: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenDiagnostic {
    pub samples: Vec<GreenSample>,
    pub max_series_vs_closed: f64,
    pub max_series_vs_classical: f64,
    pub max_closed_vs_classical: f64,
    /// `lhs` = largest series/closed-form gap, `rhs` = largest series tail.
    pub report: BoundReport,
}

/// Spherical mean of the Green function of `−Δ` on the ball.
pub fn classical_green_mean(r: f64, rp: f64, geom: &BallGeometry) -> f64 {
    let m = r.max(rp);
    let big = geom.radius;
    match geom.n {
        1 => -(big - m) / 2.0,
        2 => -(big / m).ln() / (2.0 * PI),
        n => {
            let e = 2.0 - n as f64;
            -(m.powf(e) - big.powf(e)) / ((n as f64 - 2.0) * n as f64 * geom.omega_n)
        }
    }
}

/// Compares the eigen-series Green function of the spectral operator with
/// the closed-form ball kernel and with the classical limit. A diagnostic:
/// the two kernels belong to different operators for `α < 2`.
pub fn verify_green_vs_spectral(geom: &BallGeometry, fp: &FracParams, k: usize, sample_points: &[(f64, f64)]) -> Result<GreenDiagnostic> {
    for &(r, rp) in sample_points {
        if !(r >= 0.0 && rp >= 0.0 && r < geom.radius && rp < geom.radius) || r == rp {
            return Err(Error::Parameter(format!("need distinct radii inside the ball, got ({r}, {rp})")));
        }
    }
    let basis = build_basis(&DomainSpec::Ball(*geom), 4 * k)?;
    let weights: Vec<f64> = basis.modes().iter().map(|m| m.lambda.powf(-0.5 * fp.alpha)).collect();
    let mut samples = Vec::with_capacity(sample_points.len());
    for &(r, rp) in sample_points {
        let mut partial = Vec::with_capacity(4 * k);
        let mut s = 0.0;
        for (j, w) in weights.iter().enumerate() {
            s -= basis.eval_radial(j, r) * basis.eval_radial(j, rp) * w;
            partial.push(s);
        }
        let series = partial[k - 1];
        let series_tail = 2.0 * partial[k..].iter().map(|p| (p - series).abs()).fold(0.0, f64::max);
        let closed_form = -kernel_sphere_mean(r, rp, geom, fp)?;
        samples.push(GreenSample { r, rp, series, series_tail, closed_form, classical: classical_green_mean(r, rp, geom) });
    }
    let max_of = |f: &dyn Fn(&GreenSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let max_series_vs_closed = max_of(&|s| (s.series - s.closed_form).abs());
    let max_series_vs_classical = max_of(&|s| (s.series - s.classical).abs());
    let max_closed_vs_classical = max_of(&|s| (s.closed_form - s.classical).abs());
    let report = BoundReport::new(max_series_vs_closed, max_of(&|s| s.series_tail), 1.0)
        .with_meta("n", geom.n)
        .with_meta("radius", geom.radius)
        .with_meta("alpha", fp.alpha)
        .with_meta("terms", k)
        .with_meta("max_series_vs_classical", max_series_vs_classical)
        .with_meta("max_closed_vs_classical", max_closed_vs_classical)
        .with_meta("kind", "diagnostic");
    Ok(GreenDiagnostic { samples, max_series_vs_closed, max_series_vs_classical, max_closed_vs_classical, report })
}

/// Trace of the separated extension against a reference spectral solution.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceConsistency {
    pub terms: usize,
    pub reference_terms: usize,
    pub radii: Vec<f64>,
    /// `max_r |v_K(r, 0) − φ_ref(r)|`
    pub max_discrepancy: f64,
    /// Tail estimate of the `K`-term spectral solution on `radii`.
    pub tail: f64,
}

/// Evaluates the `K`-mode separated extension at `z = 0` on `radii` and
/// compares it with the spectral solution using `reference_terms` modes.
pub fn trace_consistency(
    fstar: &DecreasingProfile,
    geom: &BallGeometry,
    fp: &FracParams,
    k: usize,
    reference_terms: usize,
    radii: &[f64],
) -> Result<TraceConsistency> {
    if reference_terms <= k {
        return Err(Error::Parameter("the reference needs more modes than the test".into()));
    }
    let sep = ball_extension_separated(fstar, geom, fp, k)?;
    let dom = DomainSpec::Ball(*geom);
    let reference = solve_fractional_dirichlet(Source::Radial(fstar), &build_basis(&dom, reference_terms)?, fp)?;
    let own = solve_fractional_dirichlet(Source::Radial(fstar), &build_basis(&dom, k)?, fp)?;
    let points: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| {
            let mut x = vec![0.0; geom.n];
            x[0] = r;
            x
        })
        .collect();
    let tail = own.sup_tail_at(0.0, &points)?;
    let mut max_discrepancy: f64 = 0.0;
    for &r in radii {
        let mut x = vec![0.0; geom.n];
        x[0] = r;
        max_discrepancy = max_discrepancy.max((sep.eval(r, 0.0) - reference.eval(&x)).abs());
    }
    Ok(TraceConsistency { terms: k, reference_terms, radii: radii.to_vec(), max_discrepancy, tail })
}
