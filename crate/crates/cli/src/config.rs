//! Command-line flags, the optional TOML config file, and their merge into
//! a [`RunConfig`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsym::spectral::DomainSpec;
use fracsym::{BallGeometry, FracParams};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "fracsym", version, about = "Spectral fractional Laplacian experiments on bounded domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Rearrange,
    Lorentz,
    SolveBall,
    Extension,
    Compare,
    CompareExtension,
    Verify,
    BestConstant,
    Green,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decreasing rearrangement of a `measure,value` CSV into `s,value` blocks.
    Rearrange(Flags),
    /// Lorentz norm ‖f‖_{p,q} of a `measure,value` CSV.
    Lorentz(Flags),
    /// Spectral and closed-form kernel potentials of a radial source on a ball.
    SolveBall(Flags),
    /// Slices w(·, y) of the extension of the spectral solution.
    Extension(Flags),
    /// Concentration comparison of u on Ω against φ on the symmetrized ball.
    Compare(Flags),
    /// The same comparison for slices of the extensions at heights --y.
    CompareExtension(Flags),
    /// Bound checks: --kind linfty | extension-linfty | lorentz.
    Verify(Flags),
    /// Best constant C(N, p, α) by two quadrature routes.
    BestConstant(Flags),
    /// Spectral Green function against the closed-form and classical kernels.
    Green(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Rearrange(f) => (CommandKind::Rearrange, f),
            Command::Lorentz(f) => (CommandKind::Lorentz, f),
            Command::SolveBall(f) => (CommandKind::SolveBall, f),
            Command::Extension(f) => (CommandKind::Extension, f),
            Command::Compare(f) => (CommandKind::Compare, f),
            Command::CompareExtension(f) => (CommandKind::CompareExtension, f),
            Command::Verify(f) => (CommandKind::Verify, f),
            Command::BestConstant(f) => (CommandKind::BestConstant, f),
            Command::Green(f) => (CommandKind::Green, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    IntervalUnion,
    Square,
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyKind {
    Linfty,
    ExtensionLinfty,
    Lorentz,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Dimension N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Fractional order α ∈ (0, 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Ball radius (default 1).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    /// Interval endpoints a,b,c,d,… for --domain interval-union.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub intervals: Option<Vec<f64>>,
    /// Number of retained eigenmodes K (default 128).
    #[arg(long)]
    pub terms: Option<usize>,
    /// Cells per unit direction (default 256).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Seed of the random bump source.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of bumps in the random source (default 3).
    #[arg(long)]
    pub bumps: Option<usize>,
    /// Extension heights y, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub y: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub kind: Option<VerifyKind>,
    /// Input CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Absolute tolerance added to every pass/fail threshold.
    #[arg(long)]
    pub tol: Option<f64>,
    /// TOML file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Keys accepted in the config file; names match the long flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    alpha: Option<f64>,
    radius: Option<f64>,
    domain: Option<DomainKind>,
    intervals: Option<Vec<f64>>,
    terms: Option<usize>,
    grid: Option<usize>,
    p: Option<f64>,
    q: Option<f64>,
    r: Option<f64>,
    seed: Option<u64>,
    bumps: Option<usize>,
    y: Option<Vec<f64>>,
    kind: Option<VerifyKind>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    tol: Option<f64>,
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))
}

/// Flags merged over the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub radius: f64,
    pub domain: Option<DomainKind>,
    pub intervals: Option<Vec<f64>>,
    pub terms: usize,
    pub grid: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub seed: Option<u64>,
    pub bumps: usize,
    pub y: Option<Vec<f64>>,
    pub kind: Option<VerifyKind>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing --{flag} (or `{flag}` in the config file)"))
}

impl RunConfig {
    pub fn new(command: CommandKind, flags: Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            command,
            n: flags.n.or(file.n),
            alpha: flags.alpha.or(file.alpha),
            radius: flags.radius.or(file.radius).unwrap_or(1.0),
            domain: flags.domain.or(file.domain),
            intervals: flags.intervals.or(file.intervals),
            terms: flags.terms.or(file.terms).unwrap_or(128),
            grid: flags.grid.or(file.grid).unwrap_or(256),
            p: flags.p.or(file.p),
            q: flags.q.or(file.q),
            r: flags.r.or(file.r),
            seed: flags.seed.or(file.seed),
            bumps: flags.bumps.or(file.bumps).unwrap_or(3),
            y: flags.y.or(file.y),
            kind: flags.kind.or(file.kind),
            input: flags.input.or(file.input),
            out: flags.out.or(file.out),
            tol: flags.tol.or(file.tol),
        };
        if cfg.terms == 0 {
            return Err(CliError::Usage("--terms must be at least 1".into()));
        }
        if cfg.grid == 0 {
            return Err(CliError::Usage("--grid must be at least 1".into()));
        }
        if cfg.bumps == 0 {
            return Err(CliError::Usage("--bumps must be at least 1".into()));
        }
        if let Some(t) = cfg.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be finite and nonnegative, got {t}")));
            }
        }
        Ok(cfg)
    }

    pub fn params(&self) -> Result<FracParams, CliError> {
        let alpha = self.alpha.ok_or_else(|| missing("alpha"))?;
        FracParams::new(alpha).map_err(|e| CliError::Usage(format!("--alpha: {e}")))
    }

    pub fn dimension(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| missing("n"))
    }

    pub fn ball(&self) -> Result<BallGeometry, CliError> {
        BallGeometry::new(self.dimension()?, self.radius).map_err(|e| CliError::Usage(format!("--n/--radius: {e}")))
    }

    pub fn require<T: Copy>(&self, value: Option<T>, flag: &str) -> Result<T, CliError> {
        value.ok_or_else(|| missing(flag))
    }

    pub fn heights(&self) -> Result<Vec<f64>, CliError> {
        let ys = self.y.clone().ok_or_else(|| missing("y"))?;
        if ys.is_empty() || ys.iter().any(|y| !(y.is_finite() && *y >= 0.0)) {
            return Err(CliError::Usage("--y takes finite nonnegative heights, e.g. --y 0.1,0.5,1".into()));
        }
        Ok(ys)
    }

    pub fn domain(&self) -> Result<DomainSpec, CliError> {
        let kind = self.domain.ok_or_else(|| missing("domain"))?;
        let check_n = |expected: usize| match self.n {
            Some(n) if n != expected => {
                Err(CliError::Usage(format!("--n {n} contradicts --domain, which is {expected}-dimensional")))
            }
            _ => Ok(()),
        };
        match kind {
            DomainKind::Square => {
                check_n(2)?;
                Ok(DomainSpec::unit_square())
            }
            DomainKind::IntervalUnion => {
                check_n(1)?;
                let ends = self.intervals.as_ref().ok_or_else(|| missing("intervals"))?;
                if ends.is_empty() || ends.len() % 2 != 0 {
                    return Err(CliError::Usage("--intervals takes an even list a,b,c,d,… of endpoints".into()));
                }
                let pairs = ends.chunks(2).map(|c| (c[0], c[1])).collect();
                DomainSpec::interval_union(pairs).map_err(|e| CliError::Usage(format!("--intervals: {e}")))
            }
            DomainKind::Ball => Ok(DomainSpec::ball(self.ball()?)),
        }
    }
}
