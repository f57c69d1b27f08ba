//! Numerical checks of the comparison and regularity results: truncated
//! spectral solutions on Ω against their symmetrized counterparts on `Ω^#`,
//! each inequality carrying an explicit error budget.

mod corpus;
mod green;
mod oneil;
mod report;

use rayon::prelude::*;

pub use corpus::{Bump, BumpSource};
pub use green::{classical_green_mean, trace_consistency, verify_green_vs_spectral, GreenDiagnostic, GreenSample, TraceConsistency};
pub use oneil::{verify_oneil, GridFunction, OneilExponents};
pub use report::{write_bound_reports, BoundReport, ComparisonReport, SlackBreakdown, Verdict};

use crate::ballgreen::{green_bound_constants, linfty_bound, riesz_weak_norm};
use crate::error::{Error, Result};
use crate::params::{BallGeometry, FracParams};
use crate::rearrange::{concentration, decreasing_rearrangement, lorentz_norm, DecreasingProfile, LorentzExponents, SampledFunction};
use crate::spectral::{
    build_basis, fourier_coefficients_radial, solve_fractional_dirichlet, Discretization, DomainSpec, Mesh, Source,
    SpectralSolution,
};

const QUADRATURE_SLACK: f64 = 1e-12;

/// Precomputed discretizations of Ω and `Ω^#` for a truncation order `K`
/// and grid size.
///
/// Ω carries `4K` modes so that solutions know their tails. The ball uses
/// `4·grid` shells of equal measure.
#[derive(Debug, Clone)]
pub struct Prepared {
    domain: DomainSpec,
    k: usize,
    grid: usize,
    geom: BallGeometry,
    omega: Discretization,
    ball: Discretization,
}

impl Prepared {
    pub fn new(domain: &DomainSpec, k: usize, grid: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("K must be at least 1".into()));
        }
        let omega_basis = build_basis(domain, 4 * k)?;
        let omega = Discretization::new(omega_basis, Mesh::uniform(domain, grid)?)?;
        let geom = domain.symmetrized()?;
        let ball_domain = DomainSpec::Ball(geom);
        let ball = Discretization::new(build_basis(&ball_domain, 4 * k)?, Mesh::uniform(&ball_domain, 4 * grid)?)?;
        Ok(Prepared { domain: domain.clone(), k, grid, geom, omega, ball })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn mesh(&self) -> &Mesh {
        self.omega.mesh()
    }

    pub fn symmetrized(&self) -> &BallGeometry {
        &self.geom
    }

    pub fn terms(&self) -> usize {
        self.k
    }

    /// Samples `f` at the centres of the Ω mesh.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<SampledFunction> {
        self.mesh().sample(f)
    }

    fn check_source(&self, f: &SampledFunction) -> Result<()> {
        if let Some(v) = f.values().find(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Parameter(format!("the source must be finite and nonnegative, found {v}")));
        }
        Ok(())
    }

    /// `u_K` on Ω.
    pub fn solve_omega(&self, f: &SampledFunction, fp: &FracParams) -> Result<SpectralSolution> {
        let coeffs = self.omega.coefficients(f)?;
        let l2 = f.l2_norm().powi(2);
        let basis = self.omega.basis().truncate(self.k)?;
        solve_fractional_dirichlet(Source::Coefficients { coeffs: &coeffs, l2_norm_sq: l2 }, &basis, fp)
    }

    /// `φ_K` on `Ω^#` for the Schwarz symmetrization of `fstar`. With
    /// `with_sup_tail` the coefficients up to `4K` are computed as well.
    pub fn solve_ball(&self, fstar: &DecreasingProfile, fp: &FracParams, with_sup_tail: bool) -> Result<SpectralSolution> {
        let basis = self.ball.basis().truncate(self.k)?;
        let l2 = crate::fsum::exact_sum(fstar.blocks().map(|(s0, s1, v)| v * v * (s1 - s0)));
        let coeffs = if with_sup_tail {
            fourier_coefficients_radial(fstar, self.ball.basis())?
        } else {
            fourier_coefficients_radial(fstar, &basis)?
        };
        solve_fractional_dirichlet(Source::Coefficients { coeffs: &coeffs, l2_norm_sq: l2 }, &basis, fp)
    }

    fn omega_sup(&self, a: &[f64]) -> f64 {
        max_abs(&point_values(&self.omega, a))
    }

    fn ball_sup(&self, a: &[f64]) -> f64 {
        max_abs(&point_values(&self.ball, a))
    }

    /// Estimated error of `max |u_K|` on the Ω points.
    fn omega_tail(&self, u: &SpectralSolution, f: &SampledFunction, y: f64) -> Result<f64> {
        let remainder = match self.omega.mesh() {
            Mesh::Intervals { cells } => Some(u.variation_remainder(&interval_variations(cells, f), y)?),
            _ => None,
        };
        max_tail(u, &self.omega, y, remainder)
    }

    /// Estimated error of `max |φ_K|` on the ball points.
    fn ball_tail(&self, phi: &SpectralSolution, fstar: &DecreasingProfile, y: f64) -> Result<f64> {
        let remainder = if self.geom.n == 1 { Some(phi.variation_remainder(&[2.0 * fstar.sup()], y)?) } else { None };
        max_tail(phi, &self.ball, y, remainder)
    }

    fn compare_solutions(&self, u: &SpectralSolution, phi: &SpectralSolution, y: f64) -> Result<ComparisonReport> {
        let ua = u.slice_coeffs(y);
        let va = phi.slice_coeffs(y);
        let u_prof = decreasing_rearrangement(&self.omega.cell_averages(&ua)?);
        let v_prof = decreasing_rearrangement(&self.ball.cell_averages(&va)?);
        let mut s_grid: Vec<f64> = u_prof.breakpoints().iter().chain(v_prof.breakpoints()).copied().collect();
        s_grid.sort_by(f64::total_cmp);
        s_grid.dedup();
        let measure = self.domain.measure();
        s_grid.retain(|&s| s <= measure);
        if s_grid.last() != Some(&measure) {
            s_grid.push(measure);
        }
        let u_values = s_grid.iter().map(|&s| concentration(&u_prof, s.min(u_prof.measure()))).collect::<Result<Vec<_>>>()?;
        let v_values = s_grid.iter().map(|&s| concentration(&v_prof, s.min(v_prof.measure()))).collect::<Result<Vec<_>>>()?;
        let slack = SlackBreakdown {
            u_tail: u.l1_tail(y),
            v_tail: phi.l1_tail(y),
            u_grid: u_prof.sup() * self.omega.mesh().max_cell_measure(),
            v_grid: self.ball_sup(&va) * self.ball.mesh().max_cell_measure(),
            quadrature: QUADRATURE_SLACK,
        };
        Ok(ComparisonReport::new(s_grid, u_values, v_values, slack)
            .with_meta("domain", self.domain.name())
            .with_meta("n", self.domain.dimension())
            .with_meta("alpha", u.params().alpha)
            .with_meta("terms", self.k)
            .with_meta("grid", self.grid)
            .with_meta("ball_shells", self.ball.mesh().len())
            .with_meta("y", y)
            .with_meta("last_coeff_u", u.last_coeff())
            .with_meta("last_coeff_v", phi.last_coeff()))
    }

    /// Compares `∫_0^s u*` with `∫_0^s φ*`.
    pub fn compare_trace(&self, f: &SampledFunction, fp: &FracParams) -> Result<ComparisonReport> {
        self.check_source(f)?;
        let u = self.solve_omega(f, fp)?;
        let phi = self.solve_ball(&decreasing_rearrangement(f), fp, false)?;
        self.compare_solutions(&u, &phi, 0.0)
    }

    /// The same comparison for the slices `w(·, y)` and `v(·, y)` of the
    /// extensions, one report per height.
    pub fn compare_extension_slices(&self, f: &SampledFunction, fp: &FracParams, ys: &[f64]) -> Result<Vec<ComparisonReport>> {
        self.check_source(f)?;
        check_heights(ys)?;
        let u = self.solve_omega(f, fp)?;
        let phi = self.solve_ball(&decreasing_rearrangement(f), fp, false)?;
        ys.iter().map(|&y| self.compare_solutions(&u, &phi, y)).collect()
    }

    /// `max |u_K| + tail ≤ 𝖺𝖻 ω_N^{(N−α)/N} ‖f*‖_{N/α,1}`.
    pub fn verify_linfty(&self, f: &SampledFunction, fp: &FracParams) -> Result<BoundReport> {
        self.check_source(f)?;
        let n = self.domain.dimension();
        if (n as f64) <= fp.alpha {
            return Err(Error::Parameter(format!("the L∞ bound needs N > α (N = {n}, α = {})", fp.alpha)));
        }
        let u = self.solve_omega(f, fp)?;
        let fstar = decreasing_rearrangement(f);
        let tail = self.omega_tail(&u, f, 0.0)?;
        let lhs = self.omega_sup(u.coeffs()) + tail;
        let rhs = linfty_bound(&fstar, &self.geom, fp)?;
        let (a, b) = green_bound_constants(&self.geom, fp)?;
        let constant = a * b * riesz_weak_norm(n, fp.alpha);
        Ok(BoundReport::new(lhs, rhs, constant)
            .with_meta("domain", self.domain.name())
            .with_meta("alpha", fp.alpha)
            .with_meta("terms", self.k)
            .with_meta("sup_tail", tail)
            .with_meta("ab", a * b)
            .with_meta("weak_norm_factor", riesz_weak_norm(n, fp.alpha)))
    }

    /// Per height: `max |w_K(·,y)| ≤ max |v_K(·,y)| + tail_w + tail_v`.
    pub fn verify_extension_linfty(&self, f: &SampledFunction, fp: &FracParams, ys: &[f64]) -> Result<Vec<BoundReport>> {
        self.check_source(f)?;
        check_heights(ys)?;
        let u = self.solve_omega(f, fp)?;
        let fstar = decreasing_rearrangement(f);
        let phi = self.solve_ball(&fstar, fp, true)?;
        ys.iter()
            .map(|&y| {
                let tw = self.omega_tail(&u, f, y)?;
                let tv = self.ball_tail(&phi, &fstar, y)?;
                let lhs = self.omega_sup(&u.slice_coeffs(y));
                let v_sup = self.ball_sup(&phi.slice_coeffs(y));
                Ok(BoundReport::new(lhs, v_sup + tw + tv, 1.0)
                    .with_meta("domain", self.domain.name())
                    .with_meta("alpha", fp.alpha)
                    .with_meta("y", y)
                    .with_meta("sup_v", v_sup)
                    .with_meta("tail_w", tw)
                    .with_meta("tail_v", tv))
            })
            .collect()
    }

    /// `‖u‖_{q,r} ≤ 3q 𝖺𝖻 max(1, ω_N^{(N−α)/N}) ‖f*‖_{p,r}` with
    /// `q = Np/(N − αp)`.
    pub fn verify_lorentz_regularity(&self, f: &SampledFunction, fp: &FracParams, p: f64, r: f64) -> Result<BoundReport> {
        self.check_source(f)?;
        let n = self.domain.dimension() as f64;
        if (n) <= fp.alpha {
            return Err(Error::Parameter(format!("Lorentz regularity needs N > α (N = {n}, α = {})", fp.alpha)));
        }
        if !(p > 1.0 && p < n / fp.alpha) {
            return Err(Error::Parameter(format!("p must satisfy 1 < p < N/α = {}, got {p}", n / fp.alpha)));
        }
        if !(r >= 1.0) {
            return Err(Error::Parameter(format!("r must be at least 1, got {r}")));
        }
        let q = n * p / (n - fp.alpha * p);
        let u = self.solve_omega(f, fp)?;
        let tail = self.omega_tail(&u, f, 0.0)?;
        let u_prof = decreasing_rearrangement(&self.omega.cell_averages(u.coeffs())?);
        let indicator = DecreasingProfile::indicator(self.domain.measure(), self.domain.measure())?;
        let lhs = lorentz_norm(&u_prof, LorentzExponents::new(q, r)?) + tail * lorentz_norm(&indicator, LorentzExponents::new(q, r)?);
        let (a, b) = green_bound_constants(&self.geom, fp)?;
        let weak = riesz_weak_norm(self.domain.dimension(), fp.alpha);
        let constant = 3.0 * q * a * b * weak.max(1.0);
        let fstar = decreasing_rearrangement(f);
        let rhs = constant * lorentz_norm(&fstar, LorentzExponents::new(p, r)?);
        Ok(BoundReport::new(lhs, rhs, constant)
            .with_meta("domain", self.domain.name())
            .with_meta("alpha", fp.alpha)
            .with_meta("p", p)
            .with_meta("q", q)
            .with_meta("r", r)
            .with_meta("weak_norm_factor", weak)
            .with_meta("rhs_with_unit_factor", 3.0 * q * a * b * lorentz_norm(&fstar, LorentzExponents::new(p, r)?))
            .with_meta("sup_tail", tail))
    }
}

/// `|m_{4K} − m_K|` plus a remainder for the modes beyond `4K`, where `m_j`
/// is the largest `|·|` of the `j`-term sum over the points. Without an
/// explicit remainder the gaps `m_{2K} − m_K`, `m_{4K} − m_{2K}` are
/// continued geometrically when they shrink; gaps that do not shrink are
/// treated as noise and allowed twice over.
fn max_tail(sol: &SpectralSolution, disc: &Discretization, y: f64, remainder: Option<f64>) -> Result<f64> {
    let [m1, m2, m4] = sol.partial_maxima(y, |a| point_values(disc, a))?;
    let rest = match remainder {
        Some(r) => r,
        None => {
            let (e1, e2) = ((m2 - m1).abs(), (m4 - m2).abs());
            if e2 == 0.0 {
                0.0
            } else if e2 < e1 {
                e2 * (e2 / e1) / (1.0 - e2 / e1)
            } else {
                2.0 * e1.max(e2)
            }
        }
    };
    Ok((m4 - m1).abs() + rest)
}

/// Total variation of a step function on each interval, counting the jumps
/// to zero at both ends.
fn interval_variations(cells: &[(usize, f64, f64)], f: &SampledFunction) -> Vec<f64> {
    let components = cells.iter().map(|c| c.0).max().map_or(0, |m| m + 1);
    let mut out = vec![0.0; components];
    let mut prev: Option<(usize, f64)> = None;
    for (&(c, _, _), v) in cells.iter().zip(f.values()) {
        match prev {
            Some((pc, pv)) if pc == c => out[c] += (v - pv).abs(),
            Some((pc, pv)) => {
                out[pc] += pv.abs();
                out[c] += v.abs();
            }
            None => out[c] += v.abs(),
        }
        prev = Some((c, v));
    }
    if let Some((pc, pv)) = prev {
        out[pc] += pv.abs();
    }
    out
}

/// `Σ a_k φ_k` at the cell centres, and at the origin on a ball.
fn point_values(disc: &Discretization, a: &[f64]) -> Vec<f64> {
    let mut v = disc.center_values(a);
    if let DomainSpec::Ball(_) = disc.basis().domain() {
        v.push(a.iter().enumerate().map(|(k, ak)| ak * disc.basis().eval_radial(k, 0.0)).sum());
    }
    v
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn check_heights(ys: &[f64]) -> Result<()> {
    if let Some(y) = ys.iter().find(|y| !(y.is_finite() && **y >= 0.0)) {
        return Err(Error::Parameter(format!("heights must be finite and nonnegative, got {y}")));
    }
    Ok(())
}

pub fn compare_trace(domain: &DomainSpec, f: &SampledFunction, fp: &FracParams, k: usize, grid: usize) -> Result<ComparisonReport> {
    Prepared::new(domain, k, grid)?.compare_trace(f, fp)
}

pub fn compare_extension_slices(
    domain: &DomainSpec,
    f: &SampledFunction,
    fp: &FracParams,
    k: usize,
    grid: usize,
    ys: &[f64],
) -> Result<Vec<ComparisonReport>> {
    Prepared::new(domain, k, grid)?.compare_extension_slices(f, fp, ys)
}

pub fn verify_linfty(domain: &DomainSpec, f: &SampledFunction, fp: &FracParams, k: usize, grid: usize) -> Result<BoundReport> {
    Prepared::new(domain, k, grid)?.verify_linfty(f, fp)
}

pub fn verify_extension_linfty(
    domain: &DomainSpec,
    f: &SampledFunction,
    fp: &FracParams,
    k: usize,
    grid: usize,
    ys: &[f64],
) -> Result<Vec<BoundReport>> {
    Prepared::new(domain, k, grid)?.verify_extension_linfty(f, fp, ys)
}

pub fn verify_lorentz_regularity(
    domain: &DomainSpec,
    f: &SampledFunction,
    fp: &FracParams,
    k: usize,
    grid: usize,
    p: f64,
    r: f64,
) -> Result<BoundReport> {
    Prepared::new(domain, k, grid)?.verify_lorentz_regularity(f, fp, p, r)
}

/// Runs `job` over `items` in parallel, results in input order.
pub fn run_all<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], job: F) -> Vec<R> {
    items.par_iter().map(job).collect()
}
