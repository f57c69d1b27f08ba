use super::report::BoundReport;
use crate::error::{Error, Result};
use crate::rearrange::{decreasing_rearrangement, lorentz_norm, LorentzExponents, SampledFunction};

/// Cell values on a uniform grid of cubes with side `spacing` in one or two
/// dimensions, extended by zero outside. Cells are ordered with the last
/// axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    shape: Vec<usize>,
    spacing: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(shape: Vec<usize>, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 2 || shape.contains(&0) {
            return Err(Error::Parameter(format!("grid shape must have one or two positive extents, got {shape:?}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Parameter(format!("grid spacing must be positive, got {spacing}")));
        }
        if values.len() != shape.iter().product::<usize>() {
            return Err(Error::Mesh(format!("{} values for a grid of shape {shape:?}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("grid values must be finite".into()));
        }
        Ok(GridFunction { shape, spacing, values })
    }

    /// Samples `f` at the cell centres `((i + ½) h, …)`.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(shape: Vec<usize>, spacing: f64, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(shape.iter().product());
        match shape.as_slice() {
            [n] => values.extend((0..*n).map(|i| f(&[(i as f64 + 0.5) * spacing]))),
            [nx, ny] => {
                for i in 0..*nx {
                    for j in 0..*ny {
                        values.push(f(&[(i as f64 + 0.5) * spacing, (j as f64 + 0.5) * spacing]));
                    }
                }
            }
            _ => {}
        }
        Self::new(shape, spacing, values)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.shape.len() as i32)
    }

    pub fn to_sampled(&self) -> Result<SampledFunction> {
        let m = self.cell_measure();
        SampledFunction::from_parts(&vec![m; self.values.len()], &self.values)
    }

    /// Full linear convolution `Σ_i f_i g_{m−i} h^N`, the exact value of the
    /// convolution of the two step functions at the grid nodes.
    pub fn convolve(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.shape.len() != other.shape.len() || self.spacing != other.spacing {
            return Err(Error::Mesh("convolution needs grids of equal dimension and spacing".into()));
        }
        let h = self.cell_measure();
        match (self.shape.as_slice(), other.shape.as_slice()) {
            ([n1], [n2]) => {
                let mut out = vec![0.0; n1 + n2 - 1];
                for (i, &a) in self.values.iter().enumerate() {
                    if a != 0.0 {
                        for (j, &b) in other.values.iter().enumerate() {
                            out[i + j] += a * b * h;
                        }
                    }
                }
                GridFunction::new(vec![n1 + n2 - 1], self.spacing, out)
            }
            ([ax, ay], [bx, by]) => {
                let (ox, oy) = (ax + bx - 1, ay + by - 1);
                let mut out = vec![0.0; ox * oy];
                for i in 0..*ax {
                    for j in 0..*ay {
                        let a = self.values[i * ay + j];
                        if a == 0.0 {
                            continue;
                        }
                        for k in 0..*bx {
                            let row = &other.values[k * by..(k + 1) * by];
                            let dst = &mut out[(i + k) * oy + j..(i + k) * oy + j + by];
                            dst.iter_mut().zip(row).for_each(|(o, b)| *o += a * b * h);
                        }
                    }
                }
                GridFunction::new(vec![ox, oy], self.spacing, out)
            }
            _ => unreachable!("shapes are validated"),
        }
    }
}

/// Exponents `f ∈ L^{p₁,q₁}`, `g ∈ L^{p₂,q₂}` and the target second index `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneilExponents {
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
    pub t: f64,
}

impl OneilExponents {
    /// `t` defaults to `max(1, (1/q₁ + 1/q₂)^{-1})`.
    pub fn new(p1: f64, q1: f64, p2: f64, q2: f64, t: Option<f64>) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(p > 1.0 && p < f64::INFINITY) {
                return Err(Error::Parameter(format!("{name} must lie in (1, ∞), got {p}")));
            }
        }
        for (name, q) in [("q1", q1), ("q2", q2)] {
            if !(q >= 1.0) {
                return Err(Error::Parameter(format!("{name} must be at least 1, got {q}")));
            }
        }
        if 1.0 / p1 + 1.0 / p2 <= 1.0 {
            return Err(Error::Parameter(format!("need 1/p1 + 1/p2 > 1, got {}", 1.0 / p1 + 1.0 / p2)));
        }
        let inv = 1.0 / q1 + 1.0 / q2;
        let t = match t {
            Some(t) => {
                if !(t >= 1.0) || 1.0 / t > inv * (1.0 + 1e-12) {
                    return Err(Error::Parameter(format!("t must satisfy t ≥ 1 and 1/t ≤ 1/q1 + 1/q2 = {inv}, got {t}")));
                }
                t
            }
            None => (1.0 / inv).max(1.0),
        };
        Ok(OneilExponents { p1, q1, p2, q2, t })
    }

    /// `r` with `1/r = 1/p₁ + 1/p₂ − 1`.
    pub fn r(&self) -> f64 {
        1.0 / (1.0 / self.p1 + 1.0 / self.p2 - 1.0)
    }
}

/// `‖f ∗ g‖_{r,t} ≤ 3r ‖f‖_{p₁,q₁} ‖g‖_{p₂,q₂}` for zero-extended grid data.
pub fn verify_oneil(f: &GridFunction, g: &GridFunction, exps: &OneilExponents) -> Result<BoundReport> {
    let conv = f.convolve(g)?;
    let r = exps.r();
    let norm = |x: &GridFunction, p: f64, q: f64| -> Result<f64> {
        Ok(lorentz_norm(&decreasing_rearrangement(&x.to_sampled()?), LorentzExponents::new(p, q)?))
    };
    let lhs = norm(&conv, r, exps.t)?;
    let nf = norm(f, exps.p1, exps.q1)?;
    let ng = norm(g, exps.p2, exps.q2)?;
    Ok(BoundReport::new(lhs, 3.0 * r * nf * ng, 3.0 * r)
        .with_meta("r", r)
        .with_meta("t", exps.t)
        .with_meta("norm_f", nf)
        .with_meta("norm_g", ng)
        .with_meta("exponents", "1/r = 1/p1 + 1/p2 - 1, constant 3r"))
}
