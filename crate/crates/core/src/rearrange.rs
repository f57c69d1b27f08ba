//! Distribution functions, decreasing and Schwarz rearrangements, Steiner
//! symmetrization of slice families, concentration and Lorentz norms.
//!
//! Functions are stored as measure-weighted cells, so rearranging is a sort
//! and every integral of a step profile is evaluated in closed form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsum::{exact_sum, ExactSum};
use crate::params::unit_ball_volume;

const MEASURE_RTOL: f64 = 1e-12;

/// One mesh cell: its measure and the (cell-average) value on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub measure: f64,
    pub value: f64,
}

/// A function on a mesh of cells covering a set of measure `domain_measure`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    cells: Vec<Cell>,
    domain_measure: f64,
}

impl SampledFunction {
    /// Cells covering the domain; the domain measure is their exact sum.
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        let m = exact_sum(cells.iter().map(|c| c.measure));
        Self::with_domain_measure(cells, m)
    }

    /// Cells whose measures must add up to `domain_measure` (relative 1e-12).
    pub fn with_domain_measure(cells: Vec<Cell>, domain_measure: f64) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Mesh("a sampled function needs at least one cell".into()));
        }
        for (i, c) in cells.iter().enumerate() {
            if !(c.measure > 0.0) || !c.measure.is_finite() {
                return Err(Error::Mesh(format!("cell {i} has non-positive measure {}", c.measure)));
            }
            if !c.value.is_finite() {
                return Err(Error::Mesh(format!("cell {i} has non-finite value {}", c.value)));
            }
        }
        let total = exact_sum(cells.iter().map(|c| c.measure));
        if !(domain_measure > 0.0) || (total - domain_measure).abs() > MEASURE_RTOL * domain_measure {
            return Err(Error::Mesh(format!(
                "cell measures sum to {total}, domain measure is {domain_measure}"
            )));
        }
        Ok(SampledFunction { cells, domain_measure })
    }

    pub fn from_parts(measures: &[f64], values: &[f64]) -> Result<Self> {
        if measures.len() != values.len() {
            return Err(Error::Mesh(format!("{} measures but {} values", measures.len(), values.len())));
        }
        Self::new(measures.iter().zip(values).map(|(&measure, &value)| Cell { measure, value }).collect())
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn domain_measure(&self) -> f64 {
        self.domain_measure
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().map(|c| c.value)
    }

    /// Same mesh, new values.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> SampledFunction {
        SampledFunction {
            cells: self.cells.iter().map(|c| Cell { measure: c.measure, value: f(c.value) }).collect(),
            domain_measure: self.domain_measure,
        }
    }

    pub fn l1_norm(&self) -> f64 {
        exact_sum(self.cells.iter().map(|c| c.measure * c.value.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        exact_sum(self.cells.iter().map(|c| c.measure * c.value * c.value)).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, c| m.max(c.value.abs()))
    }

    /// Reads `measure,value` rows (header required).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "measure" || &headers[1] != "value" {
            return Err(Error::Csv(format!("expected header `measure,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let cells = rdr.deserialize().collect::<std::result::Result<Vec<Cell>, _>>()?;
        Self::new(cells)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for c in &self.cells {
            wtr.serialize(c)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// A nonincreasing, nonnegative step function on `(0, |Ω|)`: value
/// `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecreasingProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    // ∫_0^{breakpoints[i]} u*, accumulated exactly
    cumulative: Vec<f64>,
}

impl DecreasingProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::Mesh(format!(
                "a profile with {} blocks needs {} breakpoints, got {}",
                values.len(),
                values.len() + 1,
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::Mesh("profile breakpoints must start at 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(Error::Mesh("profile breakpoints must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) || values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Mesh("profile values must be finite, nonnegative and nonincreasing".into()));
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        cumulative.push(0.0);
        let mut acc = ExactSum::new();
        for (i, v) in values.iter().enumerate() {
            acc.add(v * breakpoints[i + 1]);
            acc.add(-v * breakpoints[i]);
            cumulative.push(acc.value());
        }
        Ok(DecreasingProfile { breakpoints, values, cumulative })
    }

    pub fn constant(value: f64, measure: f64) -> Result<Self> {
        Self::new(vec![0.0, measure], vec![value])
    }

    /// `c·χ_{(0,m)}` on `(0, measure)`.
    pub fn indicator(m: f64, measure: f64) -> Result<Self> {
        if m >= measure {
            return Self::constant(1.0, measure);
        }
        Self::new(vec![0.0, m, measure], vec![1.0, 0.0])
    }

    pub fn measure(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn blocks(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.breakpoints[i], self.breakpoints[i + 1], v))
    }

    /// `u*(0⁺)`, the essential supremum.
    pub fn sup(&self) -> f64 {
        self.values[0]
    }

    /// `u*(s)`; right-continuous, 0 for `s ≥ |Ω|`.
    pub fn value_at(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.values[0];
        }
        let idx = self.breakpoints.partition_point(|&b| b <= s);
        if idx == 0 {
            self.values[0]
        } else if idx > self.values.len() {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// Reads `s,value` rows, `s` being the right endpoint of each block.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            s: f64,
            value: f64,
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let mut breakpoints = vec![0.0];
        let mut values = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row?;
            breakpoints.push(row.s);
            values.push(row.value);
        }
        Self::new(breakpoints, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["s", "value"])?;
        for (_, s1, v) in self.blocks() {
            wtr.write_record([format!("{s1:e}"), format!("{v:e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// `μ_f(t)`, the measure of `{|f| > t}`.
pub fn distribution_function(f: &SampledFunction, t: f64) -> f64 {
    exact_sum(f.cells.iter().filter(|c| c.value.abs() > t).map(|c| c.measure))
}

/// The decreasing rearrangement `f*`, exact on step data.
///
/// Cells are sorted by `|value|` (stable, descending); equal values form one
/// block whose right endpoint is the exactly rounded running measure.
pub fn decreasing_rearrangement(f: &SampledFunction) -> DecreasingProfile {
    let mut order: Vec<(f64, f64)> = f.cells.iter().map(|c| (c.value.abs(), c.measure)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut breakpoints = vec![0.0];
    let mut values = Vec::new();
    let mut acc = ExactSum::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i].0;
        while i < order.len() && order[i].0 == v {
            acc.add(order[i].1);
            i += 1;
        }
        let end = if i == order.len() { f.domain_measure } else { acc.value() };
        if end > *breakpoints.last().expect("nonempty") {
            breakpoints.push(end);
            values.push(v);
        } else if let Some(last) = values.last_mut() {
            // a block narrower than one ulp of the running measure
            *last = last.max(v);
        }
    }
    DecreasingProfile::new(breakpoints, values).expect("sorted data forms a valid profile")
}

/// `u^#(x) = u*(ω_N |x|^N)` on the ball of measure `|Ω|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub profile: DecreasingProfile,
    pub n: usize,
    pub omega_n: f64,
    pub radius: f64,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        self.profile.value_at(self.omega_n * r.abs().powi(self.n as i32))
    }

    /// Radii at which the profile jumps, `r_i = (s_i/ω_N)^{1/N}`.
    pub fn jump_radii(&self) -> Vec<f64> {
        self.profile.breakpoints.iter().map(|&s| (s / self.omega_n).powf(1.0 / self.n as f64)).collect()
    }
}

pub fn schwarz_profile_to_radial(profile: &DecreasingProfile, n: usize) -> Result<RadialProfile> {
    if n == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    let omega_n = unit_ball_volume(n);
    let radius = (profile.measure() / omega_n).powf(1.0 / n as f64);
    Ok(RadialProfile { profile: profile.clone(), n, omega_n, radius })
}

/// Slice-wise decreasing rearrangement of a family `y ↦ w(·, y)`.
pub fn steiner_rearrangement(field: &[(f64, SampledFunction)]) -> Result<Vec<(f64, DecreasingProfile)>> {
    if let Some((_, first)) = field.first() {
        let m = first.domain_measure;
        for (y, slice) in field {
            if (slice.domain_measure - m).abs() > MEASURE_RTOL * m {
                return Err(Error::Mesh(format!(
                    "slice at y = {y} has measure {}, expected {m}",
                    slice.domain_measure
                )));
            }
        }
    }
    Ok(field.iter().map(|(y, s)| (*y, decreasing_rearrangement(s))).collect())
}

/// `∫_0^s u*(σ) dσ`, exact on the step profile.
pub fn concentration(profile: &DecreasingProfile, s: f64) -> Result<f64> {
    let m = profile.measure();
    if !(s >= 0.0) || s > m * (1.0 + MEASURE_RTOL) {
        return Err(Error::OutOfRange(format!("s = {s} outside [0, {m}]")));
    }
    if s >= m {
        return Ok(*profile.cumulative.last().expect("nonempty"));
    }
    let idx = profile.breakpoints.partition_point(|&b| b <= s) - 1;
    let b0 = profile.breakpoints[idx];
    Ok(profile.cumulative[idx] + profile.values[idx] * (s - b0))
}

/// `u**(t) = (1/t) ∫_0^t u*`.
pub fn maximal_average(profile: &DecreasingProfile, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("maximal average needs t > 0, got {t}")));
    }
    Ok(concentration(profile, t)? / t)
}

/// Lorentz exponents `(p, q)`, either of which may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzExponents {
    pub p: f64,
    pub q: f64,
}

impl LorentzExponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::Parameter(format!("Lorentz exponents must be positive, got ({p}, {q})")));
        }
        Ok(LorentzExponents { p, q })
    }
}

/// `‖u‖_{p,q} = (∫_0^∞ [t^{1/p} u*(t)]^q dt/t)^{1/q}`, or
/// `sup_t t^{1/p} u*(t)` for `q = ∞`, integrated block by block in closed form.
pub fn lorentz_norm(profile: &DecreasingProfile, exp: LorentzExponents) -> f64 {
    let LorentzExponents { p, q } = exp;
    if profile.values[0] == 0.0 {
        return 0.0;
    }
    if q == f64::INFINITY {
        if p == f64::INFINITY {
            return profile.values[0];
        }
        return profile.blocks().fold(0.0, |m, (_, s1, v)| m.max(v * s1.powf(1.0 / p)));
    }
    if p == f64::INFINITY {
        // ∫ u*(t)^q dt/t diverges at 0 for a nonzero profile
        return f64::INFINITY;
    }
    let e = q / p;
    let mut acc = ExactSum::new();
    for (s0, s1, v) in profile.blocks() {
        if v > 0.0 {
            acc.add(v.powf(q) * (p / q) * (s1.powf(e) - s0.powf(e)));
        }
    }
    acc.value().powf(1.0 / q)
}

/// `∫ u* v* − ∫ |u v|`, nonnegative by the Hardy–Littlewood inequality.
pub fn hardy_littlewood_gap(u: &SampledFunction, v: &SampledFunction) -> Result<f64> {
    if u.len() != v.len() || u.cells.iter().zip(&v.cells).any(|(a, b)| a.measure != b.measure) {
        return Err(Error::Mesh("Hardy–Littlewood gap needs both functions on the same cells".into()));
    }
    let lhs = product_integral(&decreasing_rearrangement(u), &decreasing_rearrangement(v));
    let rhs = exact_sum(u.cells.iter().zip(&v.cells).map(|(a, b)| a.measure * (a.value * b.value).abs()));
    Ok(lhs - rhs)
}

/// Walks the common refinement of two profiles.
fn merged_blocks(a: &DecreasingProfile, b: &DecreasingProfile) -> Vec<(f64, f64, f64, f64)> {
    let end = a.measure().min(b.measure());
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    while s < end {
        let next = a.breakpoints[i + 1].min(b.breakpoints[j + 1]).min(end);
        out.push((s, next, a.values[i], b.values[j]));
        s = next;
        if i + 1 < a.values.len() && a.breakpoints[i + 1] <= s {
            i += 1;
        }
        if j + 1 < b.values.len() && b.breakpoints[j + 1] <= s {
            j += 1;
        }
    }
    out
}

fn product_integral(a: &DecreasingProfile, b: &DecreasingProfile) -> f64 {
    exact_sum(merged_blocks(a, b).into_iter().map(|(s0, s1, x, y)| x * y * (s1 - s0)))
}

/// `∫_0^{|Ω|} |a*(s) − b*(s)| ds` for two profiles of the same measure.
pub fn profile_l1_distance(a: &DecreasingProfile, b: &DecreasingProfile) -> Result<f64> {
    if (a.measure() - b.measure()).abs() > MEASURE_RTOL * a.measure() {
        return Err(Error::Mesh("profiles have different measures".into()));
    }
    Ok(exact_sum(merged_blocks(a, b).into_iter().map(|(s0, s1, x, y)| (x - y).abs() * (s1 - s0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn indicator_fn(e: f64, total: f64) -> SampledFunction {
        SampledFunction::from_parts(&[0.5 * e, total - e, 0.5 * e], &[1.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn distribution_of_indicator() {
        let f = indicator_fn(0.3, 1.0);
        assert_relative_eq!(distribution_function(&f, 0.5), 0.3, max_relative = 1e-15);
        let z = SampledFunction::from_parts(&[0.5, 0.5], &[0.0, 0.0]).unwrap();
        assert_eq!(distribution_function(&z, 0.0), 0.0);
    }

    #[test]
    fn indicator_rearranges_to_left_block() {
        let p = decreasing_rearrangement(&indicator_fn(0.3, 1.0));
        assert_eq!(p.values(), &[1.0, 0.0]);
        assert_relative_eq!(p.breakpoints()[1], 0.3, max_relative = 1e-15);
        assert_eq!(p.measure(), 1.0);
    }

    #[test]
    fn linear_function_converges() {
        let m = 1000;
        let h = 1.0 / m as f64;
        let f = SampledFunction::from_parts(&vec![h; m], &(0..m).map(|i| (i as f64 + 0.5) * h).collect::<Vec<_>>()).unwrap();
        let p = decreasing_rearrangement(&f);
        for k in 0..200 {
            let s = k as f64 / 200.0;
            assert!((p.value_at(s) - (1.0 - s)).abs() <= 1.0 / m as f64);
        }
    }

    #[test]
    fn schwarz_in_one_dimension() {
        let m = 400;
        let h = 1.0 / m as f64;
        let vals: Vec<f64> = (0..m).map(|i| 1.0 - (i as f64 + 0.5) * h).collect();
        let p = decreasing_rearrangement(&SampledFunction::from_parts(&vec![h; m], &vals).unwrap());
        let rad = schwarz_profile_to_radial(&p, 1).unwrap();
        assert_relative_eq!(rad.radius, 0.5, max_relative = 1e-15);
        for &x in &[0.0, 0.1, -0.2, 0.37] {
            assert!((rad.eval(x) - (1.0 - 2.0 * f64::abs(x))).abs() <= 2.0 / m as f64);
        }
        let c = schwarz_profile_to_radial(&DecreasingProfile::constant(3.0, 2.0).unwrap(), 3).unwrap();
        assert_eq!(c.eval(0.5), 3.0);
    }

    #[test]
    fn concentration_and_average() {
        let p = DecreasingProfile::indicator(0.25, 1.0).unwrap();
        assert_eq!(concentration(&p, 0.0).unwrap(), 0.0);
        assert_eq!(concentration(&p, 0.6).unwrap(), 0.25);
        assert_eq!(maximal_average(&p, 0.5).unwrap(), 0.5);
        assert!(concentration(&p, 1.5).is_err());
        assert!(maximal_average(&p, 0.0).is_err());
        let c = DecreasingProfile::constant(2.5, 3.0).unwrap();
        assert_eq!(maximal_average(&c, 1.7).unwrap(), 2.5);
    }

    #[test]
    fn lorentz_of_indicators() {
        let e = 0.3;
        let p = DecreasingProfile::indicator(e, 1.0).unwrap();
        for &(pp, qq) in &[(1.0, 1.0), (2.0, 2.0), (3.0, 1.0), (1.5, 4.0)] {
            let v = lorentz_norm(&p, LorentzExponents::new(pp, qq).unwrap());
            assert_relative_eq!(v, (pp / qq).powf(1.0 / qq) * e.powf(1.0 / pp), max_relative = 1e-14);
        }
        let weak = lorentz_norm(&p, LorentzExponents::new(2.0, f64::INFINITY).unwrap());
        assert_relative_eq!(weak, e.sqrt(), max_relative = 1e-15);
        let zero = DecreasingProfile::constant(0.0, 1.0).unwrap();
        assert_eq!(lorentz_norm(&zero, LorentzExponents::new(2.0, 1.0).unwrap()), 0.0);
    }

    #[test]
    fn hardy_littlewood_trivial_cases() {
        let u = SampledFunction::from_parts(&[0.2, 0.3, 0.5], &[1.0, -3.0, 2.0]).unwrap();
        let one = u.map_values(|_| 1.0);
        assert!(hardy_littlewood_gap(&u, &one).unwrap().abs() < 1e-15);
        assert!(hardy_littlewood_gap(&u, &u).unwrap().abs() < 1e-15);
        let other = SampledFunction::from_parts(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!(hardy_littlewood_gap(&u, &other).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = SampledFunction::from_parts(&[0.25, 0.75], &[2.0, -1.0]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("measure,value\n"));
        assert_eq!(SampledFunction::read_csv(&buf[..]).unwrap(), f);
        let p = decreasing_rearrangement(&f);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(DecreasingProfile::read_csv(&buf[..]).unwrap(), p);
        assert!(SampledFunction::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn invalid_meshes() {
        assert!(SampledFunction::from_parts(&[0.0], &[1.0]).is_err());
        assert!(SampledFunction::with_domain_measure(vec![Cell { measure: 0.5, value: 1.0 }], 1.0).is_err());
        assert!(DecreasingProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0]).is_err());
    }
}
