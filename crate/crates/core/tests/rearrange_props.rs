use fracsym::rearrange::*;
use proptest::prelude::*;

fn cells(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.001f64..2.0, prop_oneof![Just(0.0), Just(1.0), -5.0f64..5.0]), 1..max)
}

fn sampled(cells: &[(f64, f64)]) -> SampledFunction {
    let (m, v): (Vec<f64>, Vec<f64>) = cells.iter().copied().unzip();
    SampledFunction::from_parts(&m, &v).unwrap()
}

fn pair(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1..max).prop_flat_map(|n| {
        (
            prop::collection::vec(0.001f64..2.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        )
    })
}

proptest! {
    #[test]
    fn rearrangement_is_equimeasurable(c in cells(40), t in -1.0f64..6.0) {
        let f = sampled(&c);
        let p = decreasing_rearrangement(&f);
        let above = p.values().iter().take_while(|&&v| v > t).count();
        let level = p.breakpoints()[above];
        prop_assert_eq!(distribution_function(&f, t).to_bits(), level.to_bits());
        prop_assert!(p.values().windows(2).all(|w| w[0] > w[1]));
        prop_assert!(p.values().iter().all(|&v| v >= 0.0));
        prop_assert_eq!(p.measure(), f.domain_measure());
    }

    #[test]
    fn norms_survive_rearrangement(c in cells(40)) {
        let f = sampled(&c);
        let p = decreasing_rearrangement(&f);
        let l1: f64 = p.blocks().map(|(s0, s1, v)| v * (s1 - s0)).sum();
        prop_assert!((l1 - f.l1_norm()).abs() <= 1e-12 * (1.0 + l1));
        prop_assert_eq!(p.sup(), f.sup_norm());
        // L^{p,p} is L^p.
        let l2 = lorentz_norm(&p, LorentzExponents::new(2.0, 2.0).unwrap());
        prop_assert!((l2 - f.l2_norm()).abs() <= 1e-12 * (1.0 + l2));
    }

    #[test]
    fn lorentz_norm_ignores_cell_order(c in cells(40), seed in any::<u64>()) {
        let f = sampled(&c);
        let mut shuffled = c.clone();
        let n = shuffled.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let g = sampled(&shuffled);
        for (p, q) in [(1.5, 1.0), (3.0, 2.0), (2.0, f64::INFINITY), (f64::INFINITY, f64::INFINITY)] {
            let e = LorentzExponents::new(p, q).unwrap();
            let a = lorentz_norm(&decreasing_rearrangement(&f), e);
            let b = lorentz_norm(&decreasing_rearrangement(&g), e);
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn hardy_littlewood_and_contraction((m, u, v) in pair(40)) {
        let f = SampledFunction::from_parts(&m, &u).unwrap();
        let g = SampledFunction::from_parts(&m, &v).unwrap();
        prop_assert!(hardy_littlewood_gap(&f, &g).unwrap() >= -1e-12);
        prop_assert!(hardy_littlewood_gap(&f, &f).unwrap().abs() <= 1e-12 * (1.0 + f.l2_norm().powi(2)));
        let d = profile_l1_distance(&decreasing_rearrangement(&f), &decreasing_rearrangement(&g)).unwrap();
        // Rearranging |f| and |g| is a contraction for ||·| − |·||.
        let rhs: f64 = m.iter().zip(u.iter().zip(&v)).map(|(w, (a, b))| w * (a.abs() - b.abs()).abs()).sum();
        prop_assert!(d <= rhs + 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn concentration_is_concave_and_increasing(c in cells(30), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let f = sampled(&c);
        let p = decreasing_rearrangement(&f);
        let total = p.measure();
        let (a, b) = (s.min(t) * total, s.max(t) * total);
        let ca = concentration(&p, a).unwrap();
        let cb = concentration(&p, b).unwrap();
        let cm = concentration(&p, 0.5 * (a + b)).unwrap();
        let tol = 1e-12 * (1.0 + p.sup() * total);
        prop_assert!(cb >= ca - tol);
        prop_assert!(cm >= 0.5 * (ca + cb) - tol);
        if a > 0.0 && b > a {
            prop_assert!(maximal_average(&p, a).unwrap() >= maximal_average(&p, b).unwrap() - tol);
        }
    }
}
