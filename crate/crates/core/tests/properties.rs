use std::sync::Arc;

use bernstein_core::convexgeom::orthant;
use bernstein_core::projector::{density_inner, project_spectral};
use bernstein_core::spectral::{build_quadrature, DensitySpec, FPoly};
use bernstein_core::verify::{check_bernstein, check_plancherel_polya, real_pw_series, NormRoute};
use bernstein_core::{BandlimitedFunction, ConvexBody, GroupElement, GroupPreset};
use num_complex::Complex64;
use proptest::prelude::*;

fn element(n: usize, m: usize) -> impl Strategy<Value = GroupElement> {
    (
        prop::collection::vec(-3.0..3.0f64, 2 * n),
        prop::collection::vec(-3.0..3.0f64, m),
    )
        .prop_map(move |(z, x)| {
            let mut c = z;
            c.extend(x);
            GroupElement::from_coords(n, &c)
        })
}

fn preset() -> impl Strategy<Value = GroupPreset> {
    prop::sample::select(GroupPreset::ALL.to_vec())
}

fn close(a: &GroupElement, b: &GroupElement, tol: f64) -> bool {
    a.coords()
        .iter()
        .zip(b.coords())
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #[test]
    fn group_law_is_associative(p in preset(), seed in 0u64..1000) {
        let spec = p.spec();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let g = bernstein_core::crgroup::random_element(&spec, &mut rng, 3.0);
        let h = bernstein_core::crgroup::random_element(&spec, &mut rng, 3.0);
        let k = bernstein_core::crgroup::random_element(&spec, &mut rng, 3.0);
        let a = spec.multiply(&spec.multiply(&g, &h).unwrap(), &k).unwrap();
        let b = spec.multiply(&g, &spec.multiply(&h, &k).unwrap()).unwrap();
        prop_assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn heisenberg_dilation_and_gauge(g in element(1, 1), h in element(1, 1), t in 0.05..5.0f64) {
        let spec = GroupPreset::Heisenberg.spec();
        let a = spec.dilate(t, &spec.multiply(&g, &h).unwrap()).unwrap();
        let b = spec.multiply(&spec.dilate(t, &g).unwrap(), &spec.dilate(t, &h).unwrap()).unwrap();
        prop_assert!(close(&a, &b, 1e-12));
        let lhs = spec.gauge(&spec.dilate(t, &g).unwrap());
        prop_assert!((lhs - t * spec.gauge(&g)).abs() <= 1e-12 * (1.0 + lhs));
        let e = spec.multiply(&g, &spec.inverse(&g)).unwrap();
        prop_assert!(close(&e, &spec.identity(), 1e-12));
    }

    #[test]
    fn gauge_distance_is_left_invariant(g in element(2, 2), h in element(2, 2), k in element(2, 2)) {
        let spec = GroupPreset::Example110b.spec();
        let d0 = spec.gauge_distance(&g, &h).unwrap();
        let d1 = spec.gauge_distance(&spec.multiply(&k, &g).unwrap(), &spec.multiply(&k, &h).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
    }

    #[test]
    fn support_translate_and_homogeneity(
        h in prop::collection::vec(-4.0..4.0f64, 2),
        shift in prop::collection::vec(-2.0..2.0f64, 2),
        s in 0.0..3.0f64,
    ) {
        let k = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.3, 2.0]]).unwrap();
        let moved = k.translate(&shift).unwrap();
        let dot = shift[0] * h[0] + shift[1] * h[1];
        let hk = k.support_function(&h).unwrap();
        prop_assert!((moved.support_function(&h).unwrap() - (hk - dot)).abs() <= 1e-12);
        let sh: Vec<f64> = h.iter().map(|v| v * s).collect();
        prop_assert!((k.support_function(&sh).unwrap() - s * hk).abs() <= 1e-12 * (1.0 + hk.abs()));
    }

    #[test]
    fn minkowski_sum_adds_support(
        a in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 3..6),
        b in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 3..6),
        h in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let (Ok(ka), Ok(kb)) = (ConvexBody::polytope(a), ConvexBody::polytope(b)) else {
            return Ok(());
        };
        let sum = ka.minkowski_sum(&kb).unwrap();
        let parts = ka.support_function(&h).unwrap() + kb.support_function(&h).unwrap();
        prop_assert!((sum.support_function(&h).unwrap() - parts).abs() <= 1e-12);
        if let Some(p) = sum.as_polytope() {
            prop_assert!((p.support_function(&h).unwrap() - parts).abs() <= 1e-12);
        }
    }

    #[test]
    fn cone_clipping_is_idempotent(
        v in prop::collection::vec(prop::collection::vec(-2.0..3.0f64, 2), 3..7),
    ) {
        let Ok(k) = ConvexBody::polytope(v) else { return Ok(()); };
        let cone = orthant(2);
        let once = k.intersect_with_cone(&cone).unwrap();
        let twice = once.intersect_with_cone(&cone).unwrap();
        prop_assert_eq!(once.is_empty(), twice.is_empty());
        for h in bernstein_core::convexgeom::probe_directions(2, 16) {
            let (a, b) = (once.support(&h), twice.support(&h));
            prop_assert!(a == b || (a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inequalities_hold_for_random_densities(seed in 0u64..10_000, h in -1.5..1.5f64) {
        let spec = GroupPreset::Heisenberg.spec();
        let k = ConvexBody::interval(1.0, 2.0).unwrap();
        let q = Arc::new(build_quadrature(&k, 24).unwrap());
        let d = DensitySpec::Random { seed: Some(seed), count: 4 }.build(q, None).unwrap();
        let f = BandlimitedFunction::synthesize(&spec, &d).unwrap();
        let r = check_plancherel_polya(&f, &k, &[h], 2.0, NormRoute::Spectral).unwrap();
        prop_assert!(r.pass, "{}", r.ratio);
        let s = real_pw_series(&f, &FPoly::linear(&[1.0], Complex64::new(1.0, 0.0)), 12).unwrap();
        prop_assert!(s.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
        prop_assert!(s.iter().all(|a| *a <= 2.0));

        let sym = ConvexBody::interval(-1.0, 1.0).unwrap();
        let q = Arc::new(build_quadrature(&sym, 24).unwrap());
        let d = DensitySpec::Random { seed: Some(seed), count: 4 }.build(q, None).unwrap();
        let g = BandlimitedFunction::synthesize(&GroupPreset::Abelian1d.spec(), &d).unwrap();
        let r = check_bernstein(&g, &sym, &[h], 2.0, NormRoute::Spectral).unwrap();
        prop_assert!(r.pass, "{}", r.ratio);
    }

    #[test]
    fn projection_is_self_adjoint(seed in 0u64..10_000, lo in 0.0..1.5f64, w in 0.1..1.5f64) {
        let spec = GroupPreset::Heisenberg.spec();
        let k = ConvexBody::interval(0.0, 3.0).unwrap();
        let q = Arc::new(build_quadrature(&k, 16).unwrap());
        let a = DensitySpec::Random { seed: Some(seed), count: 3 }.build(q.clone(), None).unwrap();
        let b = DensitySpec::Random { seed: Some(seed + 1), count: 3 }.build(q, None).unwrap();
        let t = ConvexBody::interval(lo, lo + w).unwrap();
        let pa = project_spectral(&a, &t).unwrap();
        prop_assert_eq!(project_spectral(&pa, &t).unwrap(), pa.clone());
        let lhs = density_inner(&spec, &pa, &b).unwrap();
        let rhs = density_inner(&spec, &a, &project_spectral(&b, &t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
