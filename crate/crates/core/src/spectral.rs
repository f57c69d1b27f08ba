//! Spectral solver for the fractional Dirichlet problem on domains with
//! explicit Laplacian eigenpairs (unions of intervals, rectangles, balls),
//! and the α-harmonic extension.
//!
//! Sources are step functions on a [`Mesh`]; all Fourier coefficients and
//! cell averages are computed from closed-form cell integrals of the
//! eigenfunctions, so the only approximation is the truncation order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fsum::ExactSum;
use crate::params::{unit_ball_volume, BallGeometry, FracParams};
use crate::rearrange::{Cell, DecreasingProfile, SampledFunction};
use crate::specfun::{bessel_j, bessel_j_over_pow, bessel_j_zeros, bessel_k, gamma};

/// The geometry of Ω.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Disjoint open intervals, sorted left to right.
    IntervalUnion { intervals: Vec<(f64, f64)> },
    /// `(0, width) × (0, height)`.
    Rectangle { width: f64, height: f64 },
    /// `B(0, R)`; only radial data are supported.
    Ball(BallGeometry),
}

impl DomainSpec {
    pub fn interval_union(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Parameter("an interval union needs at least one interval".into()));
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::Parameter(format!("interval ({a}, {b}) must have positive length")));
            }
        }
        if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::Parameter("intervals must be pairwise disjoint".into()));
        }
        Ok(DomainSpec::IntervalUnion { intervals })
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::Parameter(format!("rectangle sides must be positive, got {width} x {height}")));
        }
        Ok(DomainSpec::Rectangle { width, height })
    }

    pub fn unit_square() -> Self {
        DomainSpec::Rectangle { width: 1.0, height: 1.0 }
    }

    pub fn ball(geom: BallGeometry) -> Self {
        DomainSpec::Ball(geom)
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::IntervalUnion { .. } => 1,
            DomainSpec::Rectangle { .. } => 2,
            DomainSpec::Ball(g) => g.n,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            DomainSpec::IntervalUnion { intervals } => {
                crate::fsum::exact_sum(intervals.iter().map(|(a, b)| b - a))
            }
            DomainSpec::Rectangle { width, height } => width * height,
            DomainSpec::Ball(g) => g.measure,
        }
    }

    /// `Ω^#`, the ball centred at 0 with the measure of Ω.
    pub fn symmetrized(&self) -> Result<BallGeometry> {
        match self {
            DomainSpec::Ball(g) => Ok(*g),
            _ => BallGeometry::with_measure(self.dimension(), self.measure()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::IntervalUnion { .. } => "interval-union",
            DomainSpec::Rectangle { .. } => "rectangle",
            DomainSpec::Ball(_) => "ball",
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            DomainSpec::IntervalUnion { intervals } => intervals.iter().any(|&(a, b)| x[0] > a && x[0] < b),
            DomainSpec::Rectangle { width, height } => x[0] > 0.0 && x[0] < *width && x[1] > 0.0 && x[1] < *height,
            DomainSpec::Ball(g) => x.iter().map(|c| c * c).sum::<f64>() < g.radius * g.radius,
        }
    }
}

/// A partition of Ω into cells: subintervals, a tensor grid, or shells.
#[derive(Debug, Clone, PartialEq)]
pub enum Mesh {
    Intervals { cells: Vec<(usize, f64, f64)> },
    Grid { nx: usize, ny: usize, width: f64, height: f64 },
    Shells { radii: Vec<f64>, geom: BallGeometry },
}

impl Mesh {
    /// A uniform mesh with `grid` cells on an interval union (split in
    /// proportion to the component lengths), `grid × grid` cells on a
    /// rectangle, or `grid` shells of equal measure on a ball.
    pub fn uniform(domain: &DomainSpec, grid: usize) -> Result<Mesh> {
        if grid == 0 {
            return Err(Error::Parameter("grid must be at least 1".into()));
        }
        match domain {
            DomainSpec::IntervalUnion { intervals } => {
                if grid < intervals.len() {
                    return Err(Error::Parameter(format!("need at least one cell per interval ({})", intervals.len())));
                }
                let total = domain.measure();
                // largest-remainder apportionment with at least one cell each
                let exact: Vec<f64> = intervals.iter().map(|(a, b)| grid as f64 * (b - a) / total).collect();
                let mut counts: Vec<usize> = exact.iter().map(|e| (e.floor() as usize).max(1)).collect();
                while counts.iter().sum::<usize>() < grid {
                    let i = (0..counts.len())
                        .max_by(|&i, &j| (exact[i] - counts[i] as f64).total_cmp(&(exact[j] - counts[j] as f64)).then(j.cmp(&i)))
                        .expect("nonempty");
                    counts[i] += 1;
                }
                while counts.iter().sum::<usize>() > grid {
                    let i = (0..counts.len())
                        .filter(|&i| counts[i] > 1)
                        .min_by(|&i, &j| (exact[i] - counts[i] as f64).total_cmp(&(exact[j] - counts[j] as f64)))
                        .expect("some component has spare cells");
                    counts[i] -= 1;
                }
                let mut cells = Vec::with_capacity(grid);
                for (c, (&(a, b), &n)) in intervals.iter().zip(&counts).enumerate() {
                    let h = (b - a) / n as f64;
                    for i in 0..n {
                        let x1 = if i + 1 == n { b } else { a + (i + 1) as f64 * h };
                        cells.push((c, a + i as f64 * h, x1));
                    }
                }
                Ok(Mesh::Intervals { cells })
            }
            DomainSpec::Rectangle { width, height } => Ok(Mesh::Grid { nx: grid, ny: grid, width: *width, height: *height }),
            DomainSpec::Ball(geom) => Ok(Mesh::Shells { radii: equal_measure_radii(geom, grid), geom: *geom }),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Mesh::Intervals { cells } => cells.len(),
            Mesh::Grid { nx, ny, .. } => nx * ny,
            Mesh::Shells { radii, .. } => radii.len() - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn measures(&self) -> Vec<f64> {
        match self {
            Mesh::Intervals { cells } => cells.iter().map(|(_, a, b)| b - a).collect(),
            Mesh::Grid { nx, ny, width, height } => vec![(width / *nx as f64) * (height / *ny as f64); nx * ny],
            Mesh::Shells { radii, geom } => {
                let n = geom.n as i32;
                radii.windows(2).map(|w| geom.omega_n * (w[1].powi(n) - w[0].powi(n))).collect()
            }
        }
    }

    /// Representative points: cell midpoints, grid-cell centres, and for
    /// shells the point `(r, 0, …)` at the mid-measure radius.
    pub fn centers(&self) -> Vec<Vec<f64>> {
        match self {
            Mesh::Intervals { cells } => cells.iter().map(|(_, a, b)| vec![0.5 * (a + b)]).collect(),
            Mesh::Grid { nx, ny, width, height } => {
                let mut pts = Vec::with_capacity(nx * ny);
                for ix in 0..*nx {
                    for iy in 0..*ny {
                        pts.push(vec![(ix as f64 + 0.5) * width / *nx as f64, (iy as f64 + 0.5) * height / *ny as f64]);
                    }
                }
                pts
            }
            Mesh::Shells { radii, geom } => {
                let n = geom.n as i32;
                radii
                    .windows(2)
                    .map(|w| {
                        let r = (0.5 * (w[0].powi(n) + w[1].powi(n))).powf(1.0 / geom.n as f64);
                        let mut p = vec![0.0; geom.n];
                        p[0] = r;
                        p
                    })
                    .collect()
            }
        }
    }

    /// Samples `f` at the cell centres.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<SampledFunction> {
        let cells = self
            .measures()
            .into_iter()
            .zip(self.centers())
            .map(|(measure, x)| Cell { measure, value: f(&x) })
            .collect();
        SampledFunction::new(cells)
    }

    /// The largest cell measure.
    pub fn max_cell_measure(&self) -> f64 {
        self.measures().into_iter().fold(0.0, f64::max)
    }

    fn check_function(&self, f: &SampledFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::Mesh(format!("function has {} cells, mesh has {}", f.len(), self.len())));
        }
        for (c, m) in f.cells().iter().zip(self.measures()) {
            if (c.measure - m).abs() > 1e-12 * m.max(1e-300) {
                return Err(Error::Mesh(format!("cell measure {} does not match the mesh ({m})", c.measure)));
            }
        }
        Ok(())
    }
}

fn equal_measure_radii(geom: &BallGeometry, m: usize) -> Vec<f64> {
    (0..=m).map(|j| geom.radius * (j as f64 / m as f64).powf(1.0 / geom.n as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ModeKind {
    Sine { component: usize, k: usize },
    Tensor { i: usize, j: usize },
    /// `norm · r^{−ν} J_ν(c r)` with `c = θ/R`.
    Radial { c: f64, norm: f64 },
}

/// One Dirichlet eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub lambda: f64,
    kind: ModeKind,
}

/// The `K` lowest Dirichlet eigenpairs of `−Δ` (radial ones for a ball).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    domain: DomainSpec,
    modes: Vec<Mode>,
    lambda_next: f64,
}

/// Builds the `k` lowest eigenpairs; `λ_{k+1}` is kept for tail bounds.
pub fn build_basis(domain: &DomainSpec, k: usize) -> Result<EigenBasis> {
    if k == 0 {
        return Err(Error::Parameter("the basis needs at least one mode".into()));
    }
    let mut modes = match domain {
        DomainSpec::IntervalUnion { intervals } => {
            let mut all = Vec::with_capacity(intervals.len() * (k + 1));
            for (c, &(a, b)) in intervals.iter().enumerate() {
                let l = b - a;
                for m in 1..=k + 1 {
                    let lambda = (m as f64 * PI / l).powi(2);
                    all.push(Mode { lambda, kind: ModeKind::Sine { component: c, k: m } });
                }
            }
            sort_modes(&mut all);
            all
        }
        DomainSpec::Rectangle { width, height } => {
            let mut side = 64usize;
            loop {
                let mut all = Vec::with_capacity(side * side);
                for i in 1..=side {
                    for j in 1..=side {
                        let lambda = PI * PI * ((i * i) as f64 / (width * width) + (j * j) as f64 / (height * height));
                        all.push(Mode { lambda, kind: ModeKind::Tensor { i, j } });
                    }
                }
                sort_modes(&mut all);
                // every mode outside the candidate square exceeds this
                let excluded = PI * PI * ((side + 1) * (side + 1)) as f64 / width.max(*height).powi(2);
                if all.len() > k && all[k].lambda < excluded {
                    all.truncate(k + 1);
                    break all;
                }
                side *= 2;
            }
        }
        DomainSpec::Ball(geom) => {
            let nu = 0.5 * (geom.n as f64 - 2.0);
            let zeros = bessel_j_zeros(nu, k + 1)?;
            let mut out = Vec::with_capacity(k + 1);
            for theta in zeros {
                let jn = bessel_j(nu + 1.0, theta)?.abs();
                let norm = (2.0 / (geom.n as f64 * geom.omega_n)).sqrt() / (geom.radius * jn);
                out.push(Mode { lambda: (theta / geom.radius).powi(2), kind: ModeKind::Radial { c: theta / geom.radius, norm } });
            }
            out
        }
    };
    let lambda_next = modes[k].lambda;
    modes.truncate(k);
    Ok(EigenBasis { domain: domain.clone(), modes, lambda_next })
}

fn sort_modes(modes: &mut [Mode]) {
    let key = |m: &Mode| match m.kind {
        ModeKind::Sine { component, k } => (component, k),
        ModeKind::Tensor { i, j } => (i, j),
        ModeKind::Radial { .. } => (0, 0),
    };
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(key(a).cmp(&key(b))));
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    /// `λ_{K+1}`, the first eigenvalue left out.
    pub fn lambda_next(&self) -> f64 {
        self.lambda_next
    }

    /// The first `k` modes.
    pub fn truncate(&self, k: usize) -> Result<EigenBasis> {
        if k == 0 || k > self.len() {
            return Err(Error::Parameter(format!("cannot truncate a {}-mode basis to {k}", self.len())));
        }
        let lambda_next = if k == self.len() { self.lambda_next } else { self.modes[k].lambda };
        Ok(EigenBasis { domain: self.domain.clone(), modes: self.modes[..k].to_vec(), lambda_next })
    }

    fn nu(&self) -> f64 {
        0.5 * (self.domain.dimension() as f64 - 2.0)
    }

    /// `φ_k(x)`, zero-based `k`.
    pub fn eval(&self, k: usize, x: &[f64]) -> f64 {
        match (&self.domain, self.modes[k].kind) {
            (DomainSpec::IntervalUnion { intervals }, ModeKind::Sine { component, k: m }) => {
                let (a, b) = intervals[component];
                if x[0] <= a || x[0] >= b {
                    return 0.0;
                }
                let l = b - a;
                (2.0 / l).sqrt() * (m as f64 * PI * (x[0] - a) / l).sin()
            }
            (DomainSpec::Rectangle { width, height }, ModeKind::Tensor { i, j }) => {
                if !self.domain.contains(x) {
                    return 0.0;
                }
                2.0 / (width * height).sqrt()
                    * (i as f64 * PI * x[0] / width).sin()
                    * (j as f64 * PI * x[1] / height).sin()
            }
            (DomainSpec::Ball(_), ModeKind::Radial { .. }) => {
                self.eval_radial(k, x.iter().map(|c| c * c).sum::<f64>().sqrt())
            }
            _ => unreachable!("mode kind always matches its domain"),
        }
    }

    /// `X_k(r)` for a ball basis.
    pub fn eval_radial(&self, k: usize, r: f64) -> f64 {
        match (&self.domain, self.modes[k].kind) {
            (DomainSpec::Ball(g), ModeKind::Radial { c, norm }) => {
                if r >= g.radius {
                    return 0.0;
                }
                let nu = self.nu();
                norm * c.powf(nu) * bessel_j_over_pow(nu, c * r).expect("order and argument are in range")
            }
            _ => panic!("eval_radial needs a ball basis"),
        }
    }

    /// `sup |φ_k|`.
    pub fn sup_abs(&self, k: usize) -> f64 {
        match (&self.domain, self.modes[k].kind) {
            (DomainSpec::IntervalUnion { intervals }, ModeKind::Sine { component, .. }) => {
                let (a, b) = intervals[component];
                (2.0 / (b - a)).sqrt()
            }
            (DomainSpec::Rectangle { width, height }, ModeKind::Tensor { .. }) => 2.0 / (width * height).sqrt(),
            // |x^{−ν} J_ν(x)| peaks at the origin for ν ≥ −1/2
            (DomainSpec::Ball(_), ModeKind::Radial { .. }) => self.eval_radial(k, 0.0).abs(),
            _ => unreachable!("mode kind always matches its domain"),
        }
    }

    /// `∫_{cell} φ_k` for every cell of `mesh`.
    fn cell_integrals(&self, k: usize, mesh: &Mesh) -> Result<Vec<f64>> {
        match (&self.domain, self.modes[k].kind, mesh) {
            (DomainSpec::IntervalUnion { intervals }, ModeKind::Sine { component, k: m }, Mesh::Intervals { cells }) => {
                let (a, b) = intervals[component];
                Ok(cells
                    .iter()
                    .map(|&(c, x0, x1)| if c == component { sine_integral(m, a, b - a, x0, x1) } else { 0.0 })
                    .collect())
            }
            (DomainSpec::Rectangle { width, height }, ModeKind::Tensor { i, j }, Mesh::Grid { nx, ny, .. }) => {
                let (hx, hy) = (width / *nx as f64, height / *ny as f64);
                let sy: Vec<f64> = (0..*ny).map(|c| sine_integral(j, 0.0, *height, c as f64 * hy, (c + 1) as f64 * hy)).collect();
                let mut out = Vec::with_capacity(nx * ny);
                for c in 0..*nx {
                    let sx = sine_integral(i, 0.0, *width, c as f64 * hx, (c + 1) as f64 * hx);
                    out.extend(sy.iter().map(|v| sx * v));
                }
                Ok(out)
            }
            (DomainSpec::Ball(g), ModeKind::Radial { c, norm }, Mesh::Shells { radii, .. }) => {
                let nu = self.nu();
                let surface = g.n as f64 * g.omega_n;
                // d/dr [r^{ν+1} J_{ν+1}(cr)] = c r^{ν+1} J_ν(cr)
                let anti: Vec<f64> = radii
                    .iter()
                    .map(|&r| {
                        if r == 0.0 {
                            Ok(0.0)
                        } else {
                            Ok(r.powf(nu + 1.0) * bessel_j(nu + 1.0, c * r)? / c)
                        }
                    })
                    .collect::<Result<_>>()?;
                Ok(anti.windows(2).map(|w| surface * norm * (w[1] - w[0])).collect())
            }
            _ => Err(Error::Mesh(format!("mesh does not match a {} basis", self.domain.name()))),
        }
    }
}

/// `∫_{x0}^{x1} √(2/ℓ) sin(mπ(x−a)/ℓ) dx` without cancellation.
fn sine_integral(m: usize, a: f64, l: f64, x0: f64, x1: f64) -> f64 {
    let w = m as f64 * PI / l;
    let mid = 0.5 * (x0 + x1) - a;
    let half = 0.5 * (x1 - x0);
    (2.0 / l).sqrt() * 2.0 / w * (w * mid).sin() * (w * half).sin()
}

/// Linear maps between mode coefficients and per-cell quantities.
#[derive(Debug, Clone)]
enum ModeMatrix {
    /// `rows[k][cell]`
    Dense(Vec<Vec<f64>>),
    /// Tensor modes: `x[i-1][ix] · y[j-1][iy]`, cells ordered `ix * ny + iy`.
    Separable { x: Vec<Vec<f64>>, y: Vec<Vec<f64>>, pairs: Vec<(usize, usize)> },
}

impl ModeMatrix {
    /// `out[k] = Σ_cell M[k][cell] v[cell]`
    fn reduce(&self, v: &[f64]) -> Vec<f64> {
        match self {
            ModeMatrix::Dense(rows) => rows.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect(),
            ModeMatrix::Separable { x, y, pairs } => {
                let ny = y[0].len();
                // g[i][iy] = Σ_ix x[i][ix] v[ix, iy]
                let g: Vec<Vec<f64>> = x
                    .iter()
                    .map(|xi| {
                        let mut row = vec![0.0; ny];
                        for (ix, &w) in xi.iter().enumerate() {
                            if w != 0.0 {
                                let block = &v[ix * ny..(ix + 1) * ny];
                                row.iter_mut().zip(block).for_each(|(r, b)| *r += w * b);
                            }
                        }
                        row
                    })
                    .collect();
                pairs
                    .iter()
                    .map(|&(i, j)| g[i - 1].iter().zip(&y[j - 1]).map(|(a, b)| a * b).sum())
                    .collect()
            }
        }
    }

    /// `out[cell] = Σ_k a[k] M[k][cell]` over the first `a.len()` modes.
    fn synthesize(&self, a: &[f64]) -> Vec<f64> {
        match self {
            ModeMatrix::Dense(rows) => {
                let mut out = vec![0.0; rows[0].len()];
                for (row, &ak) in rows.iter().zip(a) {
                    if ak != 0.0 {
                        out.iter_mut().zip(row).for_each(|(o, r)| *o += ak * r);
                    }
                }
                out
            }
            ModeMatrix::Separable { x, y, pairs } => {
                let nx = x[0].len();
                let ny = y[0].len();
                let imax = x.len();
                // t[i][iy] = Σ_j a_ij y[j][iy]
                let mut t = vec![vec![0.0; ny]; imax];
                for (&(i, j), &ak) in pairs.iter().zip(a) {
                    if ak != 0.0 {
                        t[i - 1].iter_mut().zip(&y[j - 1]).for_each(|(o, b)| *o += ak * b);
                    }
                }
                let mut out = vec![0.0; nx * ny];
                for (i, ti) in t.iter().enumerate() {
                    for ix in 0..nx {
                        let w = x[i][ix];
                        if w != 0.0 {
                            out[ix * ny..(ix + 1) * ny].iter_mut().zip(ti).for_each(|(o, b)| *o += w * b);
                        }
                    }
                }
                out
            }
        }
    }
}

/// An eigenbasis paired with a mesh: cell integrals and centre values of
/// every mode, precomputed once.
#[derive(Debug, Clone)]
pub struct Discretization {
    basis: EigenBasis,
    mesh: Mesh,
    measures: Vec<f64>,
    integrals: ModeMatrix,
    values: ModeMatrix,
}

impl Discretization {
    pub fn new(basis: EigenBasis, mesh: Mesh) -> Result<Self> {
        let measures = mesh.measures();
        let (integrals, values) = match (&basis.domain, &mesh) {
            (DomainSpec::Rectangle { width, height }, Mesh::Grid { nx, ny, width: mw, height: mh }) => {
                if mw != width || mh != height {
                    return Err(Error::Mesh("grid and rectangle sizes differ".into()));
                }
                let pairs: Vec<(usize, usize)> = basis
                    .modes
                    .iter()
                    .map(|m| match m.kind {
                        ModeKind::Tensor { i, j } => (i, j),
                        _ => unreachable!("rectangle modes are tensor modes"),
                    })
                    .collect();
                let imax = pairs.iter().map(|p| p.0).max().unwrap_or(1);
                let jmax = pairs.iter().map(|p| p.1).max().unwrap_or(1);
                let side_ints = |n: usize, l: f64, top: usize| -> Vec<Vec<f64>> {
                    (1..=top)
                        .map(|i| (0..n).map(|c| sine_integral(i, 0.0, l, c as f64 * l / n as f64, (c + 1) as f64 * l / n as f64)).collect())
                        .collect()
                };
                let side_vals = |n: usize, l: f64, top: usize| -> Vec<Vec<f64>> {
                    (1..=top)
                        .map(|i| (0..n).map(|c| (2.0 / l).sqrt() * (i as f64 * PI * (c as f64 + 0.5) / n as f64).sin()).collect())
                        .collect()
                };
                (
                    ModeMatrix::Separable { x: side_ints(*nx, *width, imax), y: side_ints(*ny, *height, jmax), pairs: pairs.clone() },
                    ModeMatrix::Separable { x: side_vals(*nx, *width, imax), y: side_vals(*ny, *height, jmax), pairs },
                )
            }
            _ => {
                let centers = mesh.centers();
                let mut ints = Vec::with_capacity(basis.len());
                let mut vals = Vec::with_capacity(basis.len());
                for k in 0..basis.len() {
                    ints.push(basis.cell_integrals(k, &mesh)?);
                    vals.push(centers.iter().map(|x| basis.eval(k, x)).collect());
                }
                (ModeMatrix::Dense(ints), ModeMatrix::Dense(vals))
            }
        };
        Ok(Discretization { basis, mesh, measures, integrals, values })
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Exact Fourier coefficients of the step function `f`.
    pub fn coefficients(&self, f: &SampledFunction) -> Result<Vec<f64>> {
        self.mesh.check_function(f)?;
        let v: Vec<f64> = f.values().collect();
        Ok(self.integrals.reduce(&v))
    }

    /// Cell averages of `Σ a_k φ_k` (the first `a.len()` modes).
    pub fn cell_averages(&self, a: &[f64]) -> Result<SampledFunction> {
        let sums = self.integrals.synthesize(a);
        SampledFunction::new(
            sums.into_iter().zip(&self.measures).map(|(s, &m)| Cell { measure: m, value: s / m }).collect(),
        )
    }

    /// Values of `Σ a_k φ_k` at the cell centres.
    pub fn center_values(&self, a: &[f64]) -> Vec<f64> {
        self.values.synthesize(a)
    }
}

/// Fourier coefficients `c_k = (f, φ_k)` of a step function on `mesh`.
pub fn fourier_coefficients(f: &SampledFunction, mesh: &Mesh, basis: &EigenBasis) -> Result<Vec<f64>> {
    mesh.check_function(f)?;
    let mut out = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let row = basis.cell_integrals(k, mesh)?;
        let mut acc = ExactSum::new();
        for (c, w) in f.cells().iter().zip(row) {
            acc.add(c.value * w);
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// Coefficients `c_k = Nω_N ∫ r^{N−1} f*(ω_N r^N) X_k(r) dr` of a radial
/// step profile on a ball basis, exact block by block.
pub fn fourier_coefficients_radial(profile: &DecreasingProfile, basis: &EigenBasis) -> Result<Vec<f64>> {
    let geom = match basis.domain() {
        DomainSpec::Ball(g) => *g,
        other => return Err(Error::Mesh(format!("radial coefficients need a ball basis, got {}", other.name()))),
    };
    if (profile.measure() - geom.measure).abs() > 1e-10 * geom.measure {
        return Err(Error::Mesh(format!("profile measure {} differs from ball measure {}", profile.measure(), geom.measure)));
    }
    let radii: Vec<f64> = profile
        .breakpoints()
        .iter()
        .map(|&s| (s / geom.omega_n).powf(1.0 / geom.n as f64).min(geom.radius))
        .collect();
    let mesh = Mesh::Shells { radii, geom };
    let values = profile.values();
    let mut out = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let row = basis.cell_integrals(k, &mesh)?;
        let mut acc = ExactSum::new();
        for (v, w) in values.iter().zip(row) {
            acc.add(v * w);
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// The data handed to the solver.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    /// A step function on a mesh of the basis domain.
    Cells { f: &'a SampledFunction, mesh: &'a Mesh },
    /// A decreasing profile, read radially on a ball.
    Radial(&'a DecreasingProfile),
    /// Precomputed coefficients for the first `≥ K` modes of the basis
    /// extended to `4K` modes, with `‖f‖²_{L²}`.
    Coefficients { coeffs: &'a [f64], l2_norm_sq: f64 },
}

/// What is known about the modes beyond the truncation order.
#[derive(Debug, Clone, PartialEq)]
struct TailModel {
    lambda_next: f64,
    /// `(‖f‖² − Σ_{k≤K} c_k²)^{1/2}`
    residual: f64,
    /// `(λ_k, c_k)` for `K < k ≤ 4K`, when available
    extra: Vec<(f64, f64)>,
    measure: f64,
    /// The basis the extra modes belong to.
    basis: EigenBasis,
}

/// `u = Σ a_k φ_k` with `a_k = c_k λ_k^{−α/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSolution {
    basis: EigenBasis,
    fp: FracParams,
    source_coeffs: Vec<f64>,
    coeffs: Vec<f64>,
    tail: TailModel,
}

/// Solves `(−Δ)^{α/2} u = f` with zero Dirichlet data, truncated to the
/// modes of `basis`. Coefficients of modes `K+1 … 4K` are computed too and
/// feed the tail estimates.
pub fn solve_fractional_dirichlet(source: Source<'_>, basis: &EigenBasis, fp: &FracParams) -> Result<SpectralSolution> {
    let k = basis.len();
    let extended = || build_basis(basis.domain(), 4 * k);
    let (all, l2_sq, ext_basis) = match source {
        Source::Cells { f, mesh } => {
            let ext = extended()?;
            let c = fourier_coefficients(f, mesh, &ext)?;
            let l2 = crate::fsum::exact_sum(f.cells().iter().map(|c| c.measure * c.value * c.value));
            (c, l2, ext)
        }
        Source::Radial(profile) => {
            let ext = extended()?;
            let c = fourier_coefficients_radial(profile, &ext)?;
            let l2 = crate::fsum::exact_sum(profile.blocks().map(|(s0, s1, v)| v * v * (s1 - s0)));
            (c, l2, ext)
        }
        Source::Coefficients { coeffs, l2_norm_sq } => {
            if coeffs.len() < k {
                return Err(Error::Parameter(format!("{} coefficients given for a {k}-mode basis", coeffs.len())));
            }
            let ext = if coeffs.len() > k { build_basis(basis.domain(), coeffs.len())? } else { basis.clone() };
            (coeffs.to_vec(), l2_norm_sq, ext)
        }
    };
    let source_coeffs = all[..k].to_vec();
    let coeffs: Vec<f64> = source_coeffs
        .iter()
        .zip(basis.modes())
        .map(|(c, m)| c * m.lambda.powf(-0.5 * fp.alpha))
        .collect();
    let captured = crate::fsum::exact_sum(source_coeffs.iter().map(|c| c * c));
    // a relative floor absorbs rounding in the coefficients themselves
    let residual = (l2_sq - captured + 1e-14 * l2_sq).max(0.0).sqrt();
    let extra = (k..all.len().min(4 * k)).map(|j| (ext_basis.modes()[j].lambda, all[j])).collect();
    let tail = TailModel { lambda_next: basis.lambda_next(), residual, extra, measure: basis.domain().measure(), basis: ext_basis };
    Ok(SpectralSolution { basis: basis.clone(), fp: *fp, source_coeffs, coeffs, tail })
}

/// Coefficients `a_k λ_k^{α/2}` of `(−Δ)^{α/2} u`.
pub fn apply_fractional_laplacian(u: &SpectralSolution) -> Vec<f64> {
    u.coeffs.iter().zip(u.basis.modes()).map(|(a, m)| a * m.lambda.powf(0.5 * u.fp.alpha)).collect()
}

impl SpectralSolution {
    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn params(&self) -> &FracParams {
        &self.fp
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn source_coeffs(&self) -> &[f64] {
        &self.source_coeffs
    }

    /// `|a_K|`, the last retained coefficient.
    pub fn last_coeff(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |a| a.abs())
    }

    /// Coefficients of the extension slice at height `y`: `a_k ρ(√λ_k y)`.
    pub fn slice_coeffs(&self, y: f64) -> Vec<f64> {
        if y == 0.0 {
            return self.coeffs.clone();
        }
        self.coeffs
            .iter()
            .zip(self.basis.modes())
            .map(|(a, m)| a * rho_profile(m.lambda.sqrt() * y, &self.fp))
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_at_height(x, 0.0)
    }

    /// The truncated extension `w_K(x, y)`.
    pub fn eval_at_height(&self, x: &[f64], y: f64) -> f64 {
        let a = self.slice_coeffs(y);
        a.iter().enumerate().map(|(k, ak)| ak * self.basis.eval(k, x)).sum()
    }

    /// Bound on `‖w(·,y) − w_K(·,y)‖_{L²}`:
    /// `λ_{K+1}^{−α/2} ρ(√λ_{K+1} y) (‖f‖² − Σ_{k≤K} c_k²)^{1/2}`.
    pub fn l2_tail(&self, y: f64) -> f64 {
        let t = &self.tail;
        t.residual * t.lambda_next.powf(-0.5 * self.fp.alpha) * rho_profile(t.lambda_next.sqrt() * y, &self.fp)
    }

    /// `|Ω|^{1/2}` times [`Self::l2_tail`], a bound on the `L¹` tail.
    pub fn l1_tail(&self, y: f64) -> f64 {
        self.tail.measure.sqrt() * self.l2_tail(y)
    }

    /// Slice coefficients for every mode with a known source coefficient:
    /// the `K` retained modes followed by modes `K+1 … 4K`.
    pub fn extended_slice_coeffs(&self, y: f64) -> Vec<f64> {
        let mut out = self.slice_coeffs(y);
        out.extend(self.tail.extra.iter().map(|&(lambda, c)| {
            let a = c * lambda.powf(-0.5 * self.fp.alpha);
            if y == 0.0 {
                a
            } else {
                a * rho_profile(lambda.sqrt() * y, &self.fp)
            }
        }));
        out
    }

    /// Estimate of `max |w(·,y) − w_K(·,y)|` over a set of points: twice
    /// the largest deviation `|S_j − S_K|` of the later partial sums, `j`
    /// running over `K + iK/8` up to `4K`.
    ///
    /// `partial_sums(a)` returns `Σ_{k < a.len()} a_k φ_k` at the points, with
    /// `a` indexed like [`Self::extended_slice_coeffs`].
    pub fn sup_tail<F: Fn(&[f64]) -> Vec<f64>>(&self, y: f64, partial_sums: F) -> Result<f64> {
        let k = self.basis.len();
        if self.tail.extra.len() < 3 * k {
            return Err(Error::Tail(format!("need coefficients up to mode {}, have {}", 4 * k, k + self.tail.extra.len())));
        }
        let a = self.extended_slice_coeffs(y);
        let base = partial_sums(&a[..k]);
        let step = (k / 8).max(1);
        let mut dev: f64 = 0.0;
        let mut j = k + step;
        while j <= 4 * k {
            let s = partial_sums(&a[..j]);
            dev = s.iter().zip(&base).map(|(x, b)| (x - b).abs()).fold(dev, f64::max);
            j += step;
        }
        Ok(2.0 * dev)
    }

    /// `max |Σ a_k φ_k|` over the points for the `K`, `2K` and `4K`-term sums
    /// at height `y`; `partial_sums` as in [`Self::sup_tail`].
    pub fn partial_maxima<F: Fn(&[f64]) -> Vec<f64>>(&self, y: f64, partial_sums: F) -> Result<[f64; 3]> {
        let k = self.basis.len();
        if self.tail.extra.len() < 3 * k {
            return Err(Error::Tail(format!("need coefficients up to mode {}, have {}", 4 * k, k + self.tail.extra.len())));
        }
        let a = self.extended_slice_coeffs(y);
        let max_abs = |v: Vec<f64>| v.into_iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        Ok([max_abs(partial_sums(&a[..k])), max_abs(partial_sums(&a[..2 * k])), max_abs(partial_sums(&a[..4 * k]))])
    }

    /// Bound on `Σ_{k>4K} |a_k| ρ(√λ_k y) sup|φ_k|` for one-dimensional
    /// bases, given the total variation of the source on each component
    /// (jumps to zero at the endpoints included).
    ///
    /// Integration by parts gives `|c_k| ≤ V sup|φ_k| / √λ_k`, and the sum of
    /// `sup|φ_k|² λ_k^{−(1+α)/2}` beyond the last computed mode is bounded
    /// by an integral.
    pub fn variation_remainder(&self, variations: &[f64], y: f64) -> Result<f64> {
        let alpha = self.fp.alpha;
        let ext = &self.tail.basis;
        let top = self.basis.len() + self.tail.extra.len();
        match ext.domain() {
            DomainSpec::IntervalUnion { intervals } => {
                if variations.len() != intervals.len() {
                    return Err(Error::Parameter(format!("{} variations for {} intervals", variations.len(), intervals.len())));
                }
                let mut highest = vec![0usize; intervals.len()];
                for m in &ext.modes()[..top] {
                    if let ModeKind::Sine { component, k } = m.kind {
                        highest[component] = highest[component].max(k);
                    }
                }
                let mut worst: f64 = 0.0;
                for (j, &(a, b)) in intervals.iter().enumerate() {
                    let l = b - a;
                    let m = highest[j].max(1) as f64;
                    let damp = rho_profile((m + 1.0) * PI / l * y, &self.fp);
                    let sum = (l / PI).powf(1.0 + alpha) * m.powf(-alpha) / alpha;
                    worst = worst.max(variations[j] * (2.0 / l) * sum * damp);
                }
                Ok(worst)
            }
            DomainSpec::Ball(g) if g.n == 1 => {
                let v = variations.first().copied().ok_or_else(|| Error::Parameter("one variation needed".into()))?;
                let r = g.radius;
                let m = top as f64;
                let damp = rho_profile((m + 0.5) * PI / r * y, &self.fp);
                let sum = (r / PI).powf(1.0 + alpha) * (m - 0.5).powf(-alpha) / alpha;
                Ok(v / r * sum * damp)
            }
            other => Err(Error::Tail(format!("no variation bound for a {}-dimensional {}", other.dimension(), other.name()))),
        }
    }

    /// [`Self::sup_tail`] at explicit points.
    pub fn sup_tail_at(&self, y: f64, points: &[Vec<f64>]) -> Result<f64> {
        let ext = &self.tail.basis;
        self.sup_tail(y, |a| {
            points.iter().map(|x| a.iter().enumerate().map(|(k, ak)| ak * ext.eval(k, x)).sum()).collect()
        })
    }
}

/// `ρ(s) = (2^{1−α/2}/Γ(α/2)) s^{α/2} K_{α/2}(s)`: the decaying solution of
/// `ρ'' + ((1−α)/s) ρ' = ρ` with `ρ(0) = 1`.
pub fn rho_profile(s: f64, fp: &FracParams) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    let a = 0.5 * fp.alpha;
    let k = bessel_k(a, s).expect("s > 0");
    if k == 0.0 {
        return 0.0;
    }
    2f64.powf(1.0 - a) / gamma(a).expect("α/2 ∈ (0,1)") * s.powf(a) * k
}

/// `ρ'(s) = −(2^{1−α/2}/Γ(α/2)) s^{α/2} K_{1−α/2}(s)`.
pub fn rho_derivative(s: f64, fp: &FracParams) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain { function: "rho_derivative", detail: format!("needs s > 0, got {s}") });
    }
    let a = 0.5 * fp.alpha;
    let k = bessel_k(1.0 - a, s)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok(-(2f64.powf(1.0 - a) / gamma(a)?) * s.powf(a) * k)
}

/// The α-harmonic extension `w(x, y) = Σ a_k φ_k(x) ρ(√λ_k y)` of a
/// truncated solution.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionField<'a> {
    solution: &'a SpectralSolution,
}

pub fn extension_field(u: &SpectralSolution) -> ExtensionField<'_> {
    ExtensionField { solution: u }
}

impl ExtensionField<'_> {
    pub fn eval(&self, x: &[f64], y: f64) -> f64 {
        self.solution.eval_at_height(x, y)
    }

    /// The slice `w(·, y)` as cell averages on a discretization of the same basis.
    pub fn slice(&self, disc: &Discretization, y: f64) -> Result<SampledFunction> {
        disc.cell_averages(&self.solution.slice_coeffs(y))
    }
}

/// `v(r, z) = Σ C_k X_k(r) H_k(z)` with `H_k(z) = √z K_{α/2}(α √λ_k z^{1/α})`,
/// the separated solution of the extension problem on a ball written in
/// the variable `z = (y/α)^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedExtension {
    basis: EigenBasis,
    fp: FracParams,
    /// `C_k`
    constants: Vec<f64>,
}

impl SeparatedExtension {
    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    /// `H_k(z)` for `z ≥ 0`.
    pub fn h(&self, k: usize, z: f64) -> f64 {
        let alpha = self.fp.alpha;
        let lambda = self.basis.modes()[k].lambda;
        if z == 0.0 {
            return h_at_zero(lambda, alpha);
        }
        let arg = alpha * lambda.sqrt() * z.powf(1.0 / alpha);
        let k_val = bessel_k(0.5 * alpha, arg).expect("positive argument");
        z.sqrt() * k_val
    }

    /// `H_k'(0) = lim_{z→0} −z^{(1−β)/2} √λ_k K_{1−α/2}(α √λ_k z^{1/α})`.
    pub fn h_prime_at_zero(&self, k: usize) -> f64 {
        h_prime_at_zero(self.basis.modes()[k].lambda, self.fp.alpha)
    }

    pub fn eval(&self, r: f64, z: f64) -> f64 {
        (0..self.basis.len())
            .map(|k| self.constants[k] * self.basis.eval_radial(k, r) * self.h(k, z))
            .sum()
    }
}

/// `H_k(0) = α^{−α/2} λ^{−α/4} 2^{α/2−1} Γ(α/2)`.
fn h_at_zero(lambda: f64, alpha: f64) -> f64 {
    let a = 0.5 * alpha;
    alpha.powf(-a) * lambda.powf(-0.5 * a) * 2f64.powf(a - 1.0) * gamma(a).expect("α/2 ∈ (0,1)")
}

/// `H_k'(0) = −2^{−α/2} Γ(1−α/2) α^{α/2−1} λ^{α/4}`.
fn h_prime_at_zero(lambda: f64, alpha: f64) -> f64 {
    let a = 0.5 * alpha;
    -(2f64.powf(-a)) * gamma(1.0 - a).expect("1−α/2 ∈ (0,1)") * alpha.powf(a - 1.0) * lambda.powf(0.5 * a)
}

/// The separated extension on the ball `geom` with `K` radial modes for
/// the Schwarz symmetrization of `fstar`.
///
/// `C_k` comes from the Neumann condition
/// `C_k H_k'(0) = −((2Nω_N)^{1/2} α^{α−1} κ_α / (R |J_{N/2}(θ_k)|)) ∫₀^R r^{N/2} J_ν(θ_k r/R) f*(ω_N r^N) dr`,
/// whose integral is taken exactly on each block of the profile.
pub fn ball_extension_separated(fstar: &DecreasingProfile, geom: &BallGeometry, fp: &FracParams, k: usize) -> Result<SeparatedExtension> {
    let basis = build_basis(&DomainSpec::Ball(*geom), k)?;
    let n = geom.n as f64;
    let nu = 0.5 * (n - 2.0);
    let thetas: Vec<f64> = basis.modes().iter().map(|m| m.lambda.sqrt() * geom.radius).collect();
    let radii: Vec<f64> = fstar
        .breakpoints()
        .iter()
        .map(|&s| (s / geom.omega_n).powf(1.0 / n).min(geom.radius))
        .collect();
    let lead = (2.0 * n * geom.omega_n).sqrt() * fp.alpha.powf(fp.alpha - 1.0) * fp.kappa / geom.radius;
    let mut constants = Vec::with_capacity(k);
    for (idx, &theta) in thetas.iter().enumerate() {
        let c = theta / geom.radius;
        let jn = bessel_j(nu + 1.0, theta)?.abs();
        // ∫ r^{ν+1} J_ν(cr) dr = r^{ν+1} J_{ν+1}(cr) / c
        let mut acc = ExactSum::new();
        for (i, &v) in fstar.values().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let (r0, r1) = (radii[i], radii[i + 1]);
            let upper = r1.powf(nu + 1.0) * bessel_j(nu + 1.0, c * r1)? / c;
            let lower = if r0 == 0.0 { 0.0 } else { r0.powf(nu + 1.0) * bessel_j(nu + 1.0, c * r0)? / c };
            acc.add(v * upper);
            acc.add(-v * lower);
        }
        let product = -lead / jn * acc.value();
        constants.push(product / h_prime_at_zero(basis.modes()[idx].lambda, fp.alpha));
    }
    Ok(SeparatedExtension { basis, fp: *fp, constants })
}

/// Radius of the ball with the measure of `domain`, as used for `Ω^#`.
pub fn symmetrized_radius(domain: &DomainSpec) -> f64 {
    let n = domain.dimension();
    (domain.measure() / unit_ball_volume(n)).powf(1.0 / n as f64)
}
