use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use fracsym::ballgreen::{best_constant, best_constant_by_kernel, best_constant_unit_ball_3d, radial_potential};
use fracsym::comparelab::{verify_green_vs_spectral, write_bound_reports, BoundReport, BumpSource, ComparisonReport, Prepared, Verdict};
use fracsym::rearrange::{decreasing_rearrangement, lorentz_norm, DecreasingProfile, LorentzExponents, SampledFunction};
use fracsym::spectral::{
    build_basis, extension_field, solve_fractional_dirichlet, Discretization, DomainSpec, Mesh, Source,
};

use crate::config::{CommandKind, RunConfig, VerifyKind};
use crate::CliError;

/// Whether the command's checks held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failed,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Success
        } else {
            Outcome::Failed
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Rearrange => rearrange(cfg),
        CommandKind::Lorentz => lorentz(cfg),
        CommandKind::SolveBall => solve_ball(cfg),
        CommandKind::Extension => extension(cfg),
        CommandKind::Compare => compare(cfg),
        CommandKind::CompareExtension => compare_extension(cfg),
        CommandKind::Verify => verify(cfg),
        CommandKind::BestConstant => best(cfg),
        CommandKind::Green => green(cfg),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn input(cfg: &RunConfig) -> Result<File, CliError> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Usage("missing --input (a CSV file)".into()))?;
    File::open(path).map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn seeded_source(cfg: &RunConfig, domain: &DomainSpec) -> Result<BumpSource, CliError> {
    let seed = cfg.require(cfg.seed, "seed")?;
    Ok(BumpSource::random(domain, seed, cfg.bumps)?)
}

fn rearrange(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let f = SampledFunction::read_csv(input(cfg)?)?;
    let profile = decreasing_rearrangement(&f);
    let mut out = output(cfg.out.as_deref())?;
    profile.write_csv(&mut out)?;
    out.flush()?;
    Ok(Outcome::Success)
}

fn lorentz(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.require(cfg.p, "p")?;
    let q = cfg.require(cfg.q, "q")?;
    let exps = LorentzExponents::new(p, q).map_err(|e| CliError::Usage(format!("--p/--q: {e}")))?;
    let f = SampledFunction::read_csv(input(cfg)?)?;
    let norm = lorentz_norm(&decreasing_rearrangement(&f), exps);
    let mut out = output(cfg.out.as_deref())?;
    writeln!(out, "p,q,norm")?;
    writeln!(out, "{},{},{}", fmt(p), fmt(q), fmt(norm))?;
    out.flush()?;
    Ok(Outcome::Success)
}

fn solve_ball(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let geom = cfg.ball()?;
    let fp = cfg.params()?;
    let domain = DomainSpec::ball(geom);
    let (fstar, source) = if cfg.input.is_some() {
        (DecreasingProfile::read_csv(input(cfg)?)?, "input".to_string())
    } else {
        let src = seeded_source(cfg, &domain)?;
        let f = Mesh::uniform(&domain, cfg.grid)?.sample(|x| src.eval(x))?;
        (decreasing_rearrangement(&f), src.describe())
    };
    if (fstar.measure() - geom.measure).abs() > 1e-9 * geom.measure {
        return Err(CliError::Usage(format!(
            "the profile covers measure {}, the ball has measure {}",
            fstar.measure(),
            geom.measure
        )));
    }
    let basis = build_basis(&domain, cfg.terms)?;
    let phi = solve_fractional_dirichlet(Source::Radial(&fstar), &basis, &fp)?;
    let mut out = output(cfg.out.as_deref())?;
    writeln!(out, "r,spectral,restricted")?;
    for i in 0..cfg.grid {
        let r = geom.radius * i as f64 / cfg.grid as f64;
        let mut x = vec![0.0; geom.n];
        x[0] = r;
        writeln!(out, "{},{},{}", fmt(r), fmt(phi.eval(&x)), fmt(radial_potential(&fstar, &geom, &fp, r)?))?;
    }
    writeln!(out, "# n={}", geom.n)?;
    writeln!(out, "# radius={}", fmt(geom.radius))?;
    writeln!(out, "# alpha={}", fmt(fp.alpha))?;
    writeln!(out, "# terms={}", cfg.terms)?;
    writeln!(out, "# source={source}")?;
    out.flush()?;
    Ok(Outcome::Success)
}

fn extension(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = cfg.domain()?;
    let fp = cfg.params()?;
    let ys = cfg.heights()?;
    let src = seeded_source(cfg, &domain)?;
    let mesh = Mesh::uniform(&domain, cfg.grid)?;
    let f = mesh.sample(|x| src.eval(x))?;
    let basis = build_basis(&domain, cfg.terms)?;
    let u = solve_fractional_dirichlet(Source::Cells { f: &f, mesh: &mesh }, &basis, &fp)?;
    let disc = Discretization::new(basis, mesh.clone())?;
    let centers = mesh.centers();
    let w = extension_field(&u);
    let mut out = output(cfg.out.as_deref())?;
    let coords: Vec<String> = (1..=domain.dimension()).map(|i| format!("x{i}")).collect();
    writeln!(out, "y,{},w", coords.join(","))?;
    for &y in &ys {
        let slice = w.slice(&disc, y)?;
        for (x, v) in centers.iter().zip(slice.values()) {
            let xs: Vec<String> = x.iter().map(|&c| fmt(c)).collect();
            writeln!(out, "{},{},{}", fmt(y), xs.join(","), fmt(v))?;
        }
    }
    writeln!(out, "# domain={}", domain.name())?;
    writeln!(out, "# alpha={}", fmt(fp.alpha))?;
    writeln!(out, "# terms={}", cfg.terms)?;
    writeln!(out, "# source={}", src.describe())?;
    out.flush()?;
    Ok(Outcome::Success)
}

struct Experiment {
    prepared: Prepared,
    source: BumpSource,
    f: SampledFunction,
}

fn experiment(cfg: &RunConfig) -> Result<Experiment, CliError> {
    let domain = cfg.domain()?;
    let source = seeded_source(cfg, &domain)?;
    let prepared = Prepared::new(&domain, cfg.terms, cfg.grid)?;
    let f = prepared.sample(|x| source.eval(x))?;
    Ok(Experiment { prepared, source, f })
}

fn tolerate_comparison(cfg: &RunConfig, exp: &Experiment, mut rep: ComparisonReport) -> ComparisonReport {
    if let Some(tol) = cfg.tol {
        rep.verdict = Verdict::from_bool(rep.max_violation <= rep.slack_budget + tol);
        rep = rep.with_meta("tol", fmt(tol));
    }
    rep.with_meta("seed", cfg.seed.unwrap_or_default()).with_meta("source", exp.source.describe())
}

fn tolerate_bound(cfg: &RunConfig, exp: &Experiment, mut rep: BoundReport) -> BoundReport {
    if let Some(tol) = cfg.tol {
        rep.verdict = Verdict::from_bool(rep.lhs <= rep.rhs + tol);
        rep = rep.with_meta("tol", fmt(tol));
    }
    rep.with_meta("seed", cfg.seed.unwrap_or_default()).with_meta("source", exp.source.describe())
}

fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fp = cfg.params()?;
    let exp = experiment(cfg)?;
    let rep = tolerate_comparison(cfg, &exp, exp.prepared.compare_trace(&exp.f, &fp)?);
    let mut out = output(cfg.out.as_deref())?;
    rep.write_csv(&mut out)?;
    out.flush()?;
    eprintln!("max Z = {:e}, slack = {:e}: {}", rep.max_violation, rep.slack_budget, rep.verdict);
    Ok(Outcome::from_pass(rep.verdict.is_pass()))
}

/// `report.csv` at height 0.5 becomes `report_y0.5.csv`.
fn height_path(base: &Path, y: f64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_y{y}.{}", ext.to_string_lossy()),
        None => format!("{stem}_y{y}"),
    };
    base.with_file_name(name)
}

fn compare_extension(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fp = cfg.params()?;
    let ys = cfg.heights()?;
    let exp = experiment(cfg)?;
    let reports = exp.prepared.compare_extension_slices(&exp.f, &fp, &ys)?;
    let mut pass = true;
    for (i, (rep, &y)) in reports.into_iter().zip(&ys).enumerate() {
        let rep = tolerate_comparison(cfg, &exp, rep);
        pass &= rep.verdict.is_pass();
        eprintln!("y = {y}: max Z = {:e}, slack = {:e}: {}", rep.max_violation, rep.slack_budget, rep.verdict);
        match &cfg.out {
            Some(base) if ys.len() > 1 => {
                let mut out = output(Some(&height_path(base, y)))?;
                rep.write_csv(&mut out)?;
                out.flush()?;
            }
            other => {
                let mut out = output(other.as_deref())?;
                if i > 0 {
                    writeln!(out)?;
                }
                rep.write_csv(&mut out)?;
                out.flush()?;
            }
        }
    }
    Ok(Outcome::from_pass(pass))
}

fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let kind = cfg.require(cfg.kind, "kind")?;
    let fp = cfg.params()?;
    let exp = experiment(cfg)?;
    let reports = match kind {
        VerifyKind::Linfty => vec![exp.prepared.verify_linfty(&exp.f, &fp)?],
        VerifyKind::ExtensionLinfty => exp.prepared.verify_extension_linfty(&exp.f, &fp, &cfg.heights()?)?,
        VerifyKind::Lorentz => {
            let p = cfg.require(cfg.p, "p")?;
            let r = cfg.require(cfg.r, "r")?;
            let rep = exp.prepared.verify_lorentz_regularity(&exp.f, &fp, p, r)?;
            if let (Some(q), Some(got)) = (cfg.q, rep.meta("q").and_then(|v| v.parse::<f64>().ok())) {
                if (q - got).abs() > 1e-12 * got {
                    return Err(CliError::Usage(format!("--q {q} disagrees with q = Np/(N − αp) = {got}")));
                }
            }
            vec![rep]
        }
    };
    let reports: Vec<BoundReport> = reports.into_iter().map(|r| tolerate_bound(cfg, &exp, r)).collect();
    for r in &reports {
        eprintln!("lhs = {:e}, rhs = {:e}: {}", r.lhs, r.rhs, r.verdict);
    }
    let mut out = output(cfg.out.as_deref())?;
    write_bound_reports(&reports, &mut out)?;
    out.flush()?;
    Ok(Outcome::from_pass(reports.iter().all(|r| r.verdict.is_pass())))
}

fn best(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let geom = cfg.ball()?;
    let fp = cfg.params()?;
    let p = cfg.require(cfg.p, "p")?;
    let hyper = best_constant(&geom, &fp, p).map_err(|e| CliError::Usage(format!("--p: {e}")))?;
    let kernel = best_constant_by_kernel(&geom, &fp, p)?;
    let closed = if geom.n == 3 && fp.alpha == 1.0 && geom.radius == 1.0 {
        fmt(best_constant_unit_ball_3d(p)?)
    } else {
        String::new()
    };
    let mut out = output(cfg.out.as_deref())?;
    writeln!(out, "n,alpha,radius,p,closed_form,hypergeometric,kernel")?;
    writeln!(out, "{},{},{},{},{closed},{},{}", geom.n, fmt(fp.alpha), fmt(geom.radius), fmt(p), fmt(hyper), fmt(kernel))?;
    out.flush()?;
    Ok(Outcome::Success)
}

fn green(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let geom = cfg.ball()?;
    let fp = cfg.params()?;
    let big = geom.radius;
    let points: Vec<(f64, f64)> = [0.2, 0.4, 0.6, 0.8]
        .iter()
        .flat_map(|&a| [0.1, 0.3, 0.5, 0.7, 0.9].map(|b| (a * big, b * big)))
        .collect();
    let diag = verify_green_vs_spectral(&geom, &fp, cfg.terms, &points)?;
    let mut out = output(cfg.out.as_deref())?;
    writeln!(out, "r,rp,series,series_tail,closed_form,classical")?;
    for s in &diag.samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt(s.r),
            fmt(s.rp),
            fmt(s.series),
            fmt(s.series_tail),
            fmt(s.closed_form),
            fmt(s.classical)
        )?;
    }
    for (k, v) in &diag.report.metadata {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "# max_series_vs_closed={}", fmt(diag.max_series_vs_closed))?;
    out.flush()?;
    eprintln!(
        "series vs closed form {:e}, series vs classical {:e}",
        diag.max_series_vs_closed, diag.max_series_vs_classical
    );
    Ok(Outcome::Success)
}
