use std::f64::consts::PI;

use fracsym::comparelab::*;
use fracsym::spectral::DomainSpec;
use fracsym::{BallGeometry, Error, FracParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_intervals() -> DomainSpec {
    DomainSpec::interval_union(vec![(0.0, 0.6), (1.0, 1.4)]).unwrap()
}

fn disk() -> DomainSpec {
    DomainSpec::ball(BallGeometry::new(2, 1.0).unwrap())
}

#[test]
fn radial_data_on_a_ball_is_its_own_symmetrization() {
    let p = Prepared::new(&disk(), 48, 64).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let f = p.sample(|x| (-4.0 * (x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
    let r = p.compare_trace(&f, &fp).unwrap();
    let worst = r.z_values.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    assert!(worst <= 2.0 * r.slack_budget, "|Z| = {worst:e}, slack {:e}", r.slack_budget);
    for rep in p.compare_extension_slices(&f, &fp, &[0.3]).unwrap() {
        let worst = rep.z_values.iter().fold(0.0f64, |m, z| m.max(z.abs()));
        assert!(worst <= 2.0 * rep.slack_budget);
    }
}

#[test]
fn bump_on_one_interval_passes() {
    let p = Prepared::new(&two_intervals(), 64, 128).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let f = p.sample(|x| (1.0 - ((x[0] - 0.3) / 0.2).powi(2)).max(0.0)).unwrap();
    let r = p.compare_trace(&f, &fp).unwrap();
    assert!(r.verdict.is_pass());
    assert!(r.max_violation <= r.slack_budget);
    assert_eq!(r.s_grid.last().copied(), Some(two_intervals().measure()));
    assert!(r.u_values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
}

#[test]
fn zero_height_slice_reproduces_the_trace() {
    let d = DomainSpec::unit_square();
    let p = Prepared::new(&d, 32, 32).unwrap();
    let fp = FracParams::new(0.5).unwrap();
    let src = BumpSource::random(&d, 11, 2).unwrap();
    let f = p.sample(|x| src.eval(x)).unwrap();
    let trace = p.compare_trace(&f, &fp).unwrap();
    let slice = p.compare_extension_slices(&f, &fp, &[0.0]).unwrap().remove(0);
    assert_eq!(trace.s_grid, slice.s_grid);
    assert_eq!(trace.u_values, slice.u_values);
    assert_eq!(trace.v_values, slice.v_values);
    assert_eq!(trace.slack_budget, slice.slack_budget);
}

#[test]
fn slack_shrinks_with_height() {
    let d = two_intervals();
    let p = Prepared::new(&d, 64, 128).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let src = BumpSource::random(&d, 3, 3).unwrap();
    let f = p.sample(|x| src.eval(x)).unwrap();
    let reps = p.compare_extension_slices(&f, &fp, &[0.1, 0.5, 1.0]).unwrap();
    assert!(reps.iter().all(|r| r.verdict.is_pass()));
    assert!(reps[2].slack_budget < reps[1].slack_budget && reps[1].slack_budget < reps[0].slack_budget);
}

#[test]
fn zero_source_gives_zero_everywhere() {
    for d in [two_intervals(), DomainSpec::unit_square()] {
        let p = Prepared::new(&d, 16, 16).unwrap();
        let fp = FracParams::new(1.0).unwrap();
        let f = p.sample(|_| 0.0).unwrap();
        let r = p.compare_trace(&f, &fp).unwrap();
        assert!(r.u_values.iter().chain(&r.v_values).all(|&v| v == 0.0));
        assert!(r.verdict.is_pass());
        if d.dimension() == 2 {
            let b = p.verify_linfty(&f, &fp).unwrap();
            assert_eq!((b.lhs, b.rhs), (0.0, 0.0));
            assert!(b.verdict.is_pass());
        }
    }
}

#[test]
fn negative_sources_are_rejected() {
    let p = Prepared::new(&two_intervals(), 16, 16).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let f = p.sample(|x| x[0] - 0.5).unwrap();
    assert!(matches!(p.compare_trace(&f, &fp), Err(Error::Parameter(_))));
}

#[test]
fn linfty_on_the_disk_uses_the_centre_value() {
    let p = Prepared::new(&disk(), 48, 64).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let f = p.sample(|_| 1.0).unwrap();
    let b = p.verify_linfty(&f, &fp).unwrap();
    assert!(b.verdict.is_pass(), "{} > {}", b.lhs, b.rhs);
    let ext = p.verify_extension_linfty(&f, &fp, &[0.0, 0.25]).unwrap();
    for r in &ext {
        assert!(r.verdict.is_pass());
        // Same problem on both sides: the bound is tight up to the tails.
        assert!(r.rhs - r.lhs <= 0.05 * r.rhs, "{} vs {}", r.lhs, r.rhs);
    }
}

#[test]
fn linfty_needs_n_above_alpha() {
    let d = two_intervals();
    let p = Prepared::new(&d, 16, 16).unwrap();
    let f = p.sample(|_| 1.0).unwrap();
    assert!(p.verify_linfty(&f, &FracParams::new(1.5).unwrap()).is_err());
    assert!(p.verify_linfty(&f, &FracParams::new(0.5).unwrap()).unwrap().verdict.is_pass());
}

#[test]
fn square_versus_disk_at_quarter_height() {
    let d = DomainSpec::unit_square();
    let p = Prepared::new(&d, 64, 64).unwrap();
    let fp = FracParams::new(0.5).unwrap();
    let src = BumpSource::random(&d, 2, 3).unwrap();
    let f = p.sample(|x| src.eval(x)).unwrap();
    let r = p.verify_extension_linfty(&f, &fp, &[0.25]).unwrap();
    assert!(r[0].verdict.is_pass());
}

#[test]
fn lorentz_regularity_exponent_range() {
    let d = DomainSpec::unit_square();
    let p = Prepared::new(&d, 32, 32).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let f = p.sample(|x| 1.0 + x[0]).unwrap();
    // p = N/α is the excluded endpoint.
    assert!(matches!(p.verify_lorentz_regularity(&f, &fp, 2.0, 1.0), Err(Error::Parameter(_))));
    assert!(p.verify_lorentz_regularity(&f, &fp, 1.2, 0.5).is_err());
    let rep = p.verify_lorentz_regularity(&f, &fp, 1.5, 2.0).unwrap();
    assert!(rep.verdict.is_pass());
    assert_eq!(rep.meta("q"), Some("6"));
    let weak: f64 = rep.meta("weak_norm_factor").unwrap().parse().unwrap();
    assert!((weak - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn oneil_indicators_and_bumps() {
    let h = 1.0 / 64.0;
    let exps = OneilExponents::new(1.5, 1.0, 1.5, 2.0, None).unwrap();
    assert_eq!(exps.t, 1.0);
    assert!((exps.r() - 3.0).abs() < 1e-12);
    let ind = GridFunction::from_fn(vec![64], h, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
    let r = verify_oneil(&ind, &ind, &exps).unwrap();
    assert!(r.verdict.is_pass() && r.lhs > 0.0);
    let narrow = GridFunction::from_fn(vec![64], h, |x| (-((x[0] - 0.5) / 0.01).powi(2)).exp() * 50.0).unwrap();
    assert!(verify_oneil(&narrow, &ind, &exps).unwrap().verdict.is_pass());
    let sq = GridFunction::from_fn(vec![24, 24], 1.0 / 24.0, |x| if x[0] + x[1] < 0.7 { 2.0 } else { 0.0 }).unwrap();
    let exps2 = OneilExponents::new(1.2, 1.0, 1.4, 1.0, Some(1.0)).unwrap();
    assert!(verify_oneil(&sq, &sq, &exps2).unwrap().verdict.is_pass());
}

#[test]
fn oneil_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..50 {
        let n = rng.gen_range(8..48);
        let f_vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let g_vals: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.0..5.0) } else { 0.0 }).collect();
        let h = 1.0 / n as f64;
        let f = GridFunction::new(vec![n], h, f_vals).unwrap();
        let g = GridFunction::new(vec![n], h, g_vals).unwrap();
        let p1 = rng.gen_range(1.05..3.0);
        let p2_max = (1.0f64 / (1.0 - 1.0 / p1)).min(50.0);
        let p2 = rng.gen_range(1.05..p2_max);
        let Ok(exps) = OneilExponents::new(p1, rng.gen_range(1.0..3.0), p2, rng.gen_range(1.0..3.0), None) else {
            continue;
        };
        let rep = verify_oneil(&f, &g, &exps).unwrap();
        assert!(rep.verdict.is_pass(), "{} > {}", rep.lhs, rep.rhs);
        checked += 1;
    }
    assert!(checked >= 45, "only {checked} pairs had admissible exponents");
}

#[test]
fn oneil_rejects_bad_exponents() {
    assert!(OneilExponents::new(2.0, 1.0, 2.0, 1.0, None).is_err());
    assert!(OneilExponents::new(1.0, 1.0, 1.5, 1.0, None).is_err());
    assert!(OneilExponents::new(1.5, 1.0, 1.5, 1.0, Some(0.5)).is_err());
}

#[test]
fn green_series_settles_and_classical_limit() {
    let geom = BallGeometry::new(3, 1.0).unwrap();
    let points = [(0.2, 0.6), (0.5, 0.1)];
    let fp = FracParams::new(1.5).unwrap();
    let coarse = verify_green_vs_spectral(&geom, &fp, 32, &points).unwrap();
    let fine = verify_green_vs_spectral(&geom, &fp, 128, &points).unwrap();
    for (c, f) in coarse.samples.iter().zip(&fine.samples) {
        assert!((c.series - f.series).abs() <= c.series_tail);
        assert!(f.series_tail < c.series_tail);
        assert!(f.series < 0.0 && f.closed_form < 0.0);
    }
    // −(1/m − 1)/(4π) in three dimensions.
    let g = classical_green_mean(0.2, 0.5, &geom);
    assert!((g + (2.0 - 1.0) / (4.0 * PI)).abs() < 1e-15);
    assert!(verify_green_vs_spectral(&geom, &fp, 8, &[(0.3, 0.3)]).is_err());
}

#[test]
fn comparison_csv_layout() {
    let p = Prepared::new(&two_intervals(), 16, 16).unwrap();
    let fp = FracParams::new(1.0).unwrap();
    let f = p.sample(|x| 1.0 + x[0]).unwrap();
    let r = p.compare_trace(&f, &fp).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,U,V,Z"));
    let rows: Vec<&str> = text.lines().skip(1).take_while(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), r.s_grid.len());
    for row in &rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[3], cols[1] - cols[2]);
    }
    assert!(text.contains("# verdict=pass"));
    assert!(text.contains("# domain=interval-union"));
    assert!(text.lines().skip(1 + rows.len()).all(|l| l.starts_with("# ") && l.contains('=')));
}

#[test]
fn bound_report_csv_layout() {
    let reps = vec![BoundReport::new(1.0, 2.0, 3.0), BoundReport::new(2.0, 1.0, 3.0)];
    assert!(reps[0].verdict.is_pass() && !reps[1].verdict.is_pass());
    let mut buf = Vec::new();
    write_bound_reports(&reps, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["lhs,rhs,constant,margin,verdict", "1.0,2.0,3.0,1.0,pass", "2.0,1.0,3.0,-1.0,fail"]);
}

#[test]
fn corpus_is_seeded_and_nonnegative() {
    for d in [two_intervals(), DomainSpec::unit_square(), disk()] {
        let a = BumpSource::random(&d, 4, 3).unwrap();
        let b = BumpSource::random(&d, 4, 3).unwrap();
        let c = BumpSource::random(&d, 5, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let p = Prepared::new(&d, 8, 16).unwrap();
        let f = p.sample(|x| a.eval(x)).unwrap();
        assert!(f.values().all(|v| v >= 0.0));
        assert!(f.sup_norm() > 0.0);
    }
}

#[test]
fn run_all_keeps_order() {
    let items: Vec<u32> = (0..20).collect();
    assert_eq!(run_all(&items, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
}
