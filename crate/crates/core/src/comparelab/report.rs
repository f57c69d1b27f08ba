use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The pieces of a comparison slack budget.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SlackBreakdown {
    /// `L¹` truncation tail of the solution on Ω.
    pub u_tail: f64,
    /// `L¹` truncation tail of the symmetrized solution.
    pub v_tail: f64,
    /// `sup · (largest cell)` on the Ω mesh.
    pub u_grid: f64,
    /// `sup · (largest shell)` on the ball mesh.
    pub v_grid: f64,
    pub quadrature: f64,
}

impl SlackBreakdown {
    pub fn total(&self) -> f64 {
        self.u_tail + self.v_tail + self.u_grid + self.v_grid + self.quadrature
    }
}

/// Concentrations `U(s) = ∫_0^s u*` and `V(s) = ∫_0^s v*` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub s_grid: Vec<f64>,
    pub u_values: Vec<f64>,
    pub v_values: Vec<f64>,
    pub z_values: Vec<f64>,
    pub max_violation: f64,
    pub slack_budget: f64,
    pub slack: SlackBreakdown,
    pub verdict: Verdict,
    pub metadata: Vec<(String, String)>,
}

impl ComparisonReport {
    pub fn new(s_grid: Vec<f64>, u_values: Vec<f64>, v_values: Vec<f64>, slack: SlackBreakdown) -> Self {
        let z_values: Vec<f64> = u_values.iter().zip(&v_values).map(|(u, v)| u - v).collect();
        let max_violation = z_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slack_budget = slack.total();
        let verdict = Verdict::from_bool(max_violation <= slack_budget);
        ComparisonReport { s_grid, u_values, v_values, z_values, max_violation, slack_budget, slack, verdict, metadata: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    /// `s,U,V,Z` rows followed by `# key=value` metadata lines.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["s", "U", "V", "Z"])?;
        for i in 0..self.s_grid.len() {
            w.write_record(&[
                fmt_f64(self.s_grid[i]),
                fmt_f64(self.u_values[i]),
                fmt_f64(self.v_values[i]),
                fmt_f64(self.z_values[i]),
            ])?;
        }
        w.flush()?;
        let mut inner = w.into_inner().map_err(|e| crate::Error::Csv(e.to_string()))?;
        writeln!(inner, "# max_violation={}", fmt_f64(self.max_violation))?;
        writeln!(inner, "# slack_budget={}", fmt_f64(self.slack_budget))?;
        writeln!(inner, "# slack_u_tail={}", fmt_f64(self.slack.u_tail))?;
        writeln!(inner, "# slack_v_tail={}", fmt_f64(self.slack.v_tail))?;
        writeln!(inner, "# slack_u_grid={}", fmt_f64(self.slack.u_grid))?;
        writeln!(inner, "# slack_v_grid={}", fmt_f64(self.slack.v_grid))?;
        writeln!(inner, "# slack_quadrature={}", fmt_f64(self.slack.quadrature))?;
        writeln!(inner, "# verdict={}", self.verdict)?;
        for (k, v) in &self.metadata {
            writeln!(inner, "# {k}={v}")?;
        }
        Ok(())
    }
}

/// A scalar inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub metadata: Vec<(String, String)>,
}

impl BoundReport {
    /// Passes when `rhs − lhs ≥ −10⁻⁹ |rhs|`.
    pub fn new(lhs: f64, rhs: f64, constant_used: f64) -> Self {
        let margin = rhs - lhs;
        let verdict = Verdict::from_bool(margin >= -1e-9 * rhs.abs());
        BoundReport { lhs, rhs, constant_used, margin, verdict, metadata: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_bound_reports(std::slice::from_ref(self), writer)
    }
}

/// `lhs,rhs,constant,margin,verdict`, one row per report, metadata as
/// trailing comments.
pub fn write_bound_reports<W: Write>(reports: &[BoundReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["lhs", "rhs", "constant", "margin", "verdict"])?;
    for r in reports {
        w.write_record(&[fmt_f64(r.lhs), fmt_f64(r.rhs), fmt_f64(r.constant_used), fmt_f64(r.margin), r.verdict.to_string()])?;
    }
    w.flush()?;
    let mut inner = w.into_inner().map_err(|e| crate::Error::Csv(e.to_string()))?;
    for (i, r) in reports.iter().enumerate() {
        for (k, v) in &r.metadata {
            if reports.len() == 1 {
                writeln!(inner, "# {k}={v}")?;
            } else {
                writeln!(inner, "# row{i}.{k}={v}")?;
            }
        }
    }
    Ok(())
}

/// Shortest round-trip representation.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
