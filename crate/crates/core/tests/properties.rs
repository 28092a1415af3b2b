use proptest::prelude::*;
use slicecalc::algebra::Algebra;
use slicecalc::fixtures::{random_commuting_tuple, random_resolvent_point, random_unit, seeded};
use slicecalc::funcspec::parse_function;
use slicecalc::identities::{residual_frel, residual_sc_equation, residual_sc_resolvent_equation};
use slicecalc::operator::parse_tuple_json;
use slicecalc::slice::{cauchy_kernel, KernelForm};
use slicecalc::spectrum::{f_spectrum, pencil_min_sv};
use slicecalc::{report, Multivector, Paravector, Side, SliceFunction};

fn algebra_strategy() -> impl Strategy<Value = Algebra> {
    prop_oneof![(1usize..=5).prop_map(|n| Algebra::Clifford { n }), Just(Algebra::Quaternion)]
}

fn mv(alg: Algebra, coeffs: &[f64]) -> Multivector {
    Multivector::from_coeffs(alg, coeffs[..alg.dim()].to_vec()).unwrap()
}

fn pv(alg: Algebra, parts: &[f64]) -> Paravector {
    Paravector::new(alg, parts[..=alg.units()].to_vec()).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(alg in algebra_strategy(), a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (mv(alg, &a), mv(alg, &b), mv(alg, &c));
        let left = &(&a * &b) * &c;
        let right = &a * &(&b * &c);
        prop_assert!(left.is_close(&right, 1e-13));
    }

    #[test]
    fn paravector_times_conjugate_is_norm(alg in algebra_strategy(), p in coeffs()) {
        let x = pv(alg, &p);
        let prod = &x.to_mv() * &x.conj().to_mv();
        prop_assert!(prod.is_close(&Multivector::scalar(alg, x.norm_sqr()), 1e-13));
        if x.norm() > 1e-3 {
            let one = &x.to_mv() * &x.inverse().unwrap().to_mv();
            prop_assert!(one.is_close(&Multivector::one(alg), 1e-12));
        }
    }

    #[test]
    fn kernel_forms_agree(n in prop::sample::select(vec![3usize, 5]), s in coeffs(), x in coeffs()) {
        let alg = Algebra::Clifford { n };
        let (s, x) = (pv(alg, &s), pv(alg, &x));
        prop_assume!(slicecalc::sphere_of(&x).distance_to(&s) > 0.05);
        for side in [Side::Left, Side::Right] {
            let a = cauchy_kernel(side, KernelForm::FormI, &s, &x).unwrap();
            let b = cauchy_kernel(side, KernelForm::FormII, &s, &x).unwrap();
            let scale = 1.0f64.max(a.norm()).max(b.norm());
            prop_assert!((&a - &b).norm() / scale < 1e-12);
        }
    }

    #[test]
    fn resolvent_identities_hold(seed in 0u64..10_000, quaternion in any::<bool>()) {
        let alg = if quaternion { Algebra::Quaternion } else { Algebra::Clifford { n: 3 } };
        let mut rng = seeded(seed);
        let t = random_commuting_tuple(alg, 3, &mut rng);
        let spheres = f_spectrum(&t).spheres();
        let s = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.2);
        let p = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.2);
        prop_assume!(slicecalc::sphere_of(&s).distance_to(&p) > 0.1);
        prop_assert!(residual_frel(&t, &s).unwrap() < 1e-10);
        prop_assert!(residual_sc_equation(&t, &s, Side::Left).unwrap() < 1e-10);
        prop_assert!(residual_sc_resolvent_equation(&t, &s, &p, false).unwrap() < 1e-10);
    }

    #[test]
    fn spectrum_is_axially_symmetric(seed in 0u64..10_000) {
        let alg = Algebra::Clifford { n: 3 };
        let mut rng = seeded(seed);
        let t = random_commuting_tuple(alg, 3, &mut rng);
        for e in f_spectrum(&t).spheres {
            let point = e.sphere.point_in_plane(&random_unit(alg, &mut rng));
            prop_assert!(pencil_min_sv(&t, &point) < 1e-8);
        }
    }

    #[test]
    fn tuple_json_round_trip_is_bit_exact(seed in 0u64..10_000) {
        let t = random_commuting_tuple(Algebra::Clifford { n: 3 }, 3, &mut seeded(seed));
        let text = report::to_json(&t.to_document()).unwrap();
        let back = parse_tuple_json(&text).unwrap();
        for (a, b) in t.components().iter().zip(back.components()) {
            prop_assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn parsed_polynomial_matches_constructed(c in prop::collection::vec(-5.0f64..5.0, 1..6), s in coeffs()) {
        let alg = Algebra::Clifford { n: 3 };
        let text = format!("poly left [{}]", c.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";"));
        let parsed = parse_function(&text, alg).unwrap();
        let built = SliceFunction::real_polynomial(&c);
        let s = pv(alg, &s);
        prop_assert!(parsed.evaluate(&s).unwrap().is_close(&built.evaluate(&s).unwrap(), 1e-14));
    }
}
