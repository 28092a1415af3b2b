use slicecalc::algebra::Algebra;
use slicecalc::calculus::{f_calculus, sc_calculus};
use slicecalc::fixtures::{random_commuting_tuple, random_multivector, seeded};
use slicecalc::linalg::relative_residual;
use slicecalc::spectrum::{f_spectrum, full_contour};
use slicecalc::{Error, ImaginaryUnit, Multivector, Side, SliceFunction};

#[test]
fn polynomials_with_clifford_coefficients() {
    for alg in [Algebra::Clifford { n: 3 }, Algebra::Quaternion, Algebra::Clifford { n: 5 }] {
        let mut rng = seeded(31);
        let t = random_commuting_tuple(alg, 2, &mut rng);
        let rep = t.rep();
        let contour = full_contour(&f_spectrum(&t), 0.5, &ImaginaryUnit::basis(alg, 1), 256).unwrap();
        let coeffs: Vec<Multivector> = (0..4).map(|_| random_multivector(alg, &mut rng, 1.0)).collect();
        let e = t.encode();
        let mut left = rep.zeros();
        let mut right = rep.zeros();
        let mut em = rep.identity();
        for a in &coeffs {
            left += &em * rep.left_mult(a);
            right += rep.left_mult(a) * &em;
            em = &em * &e;
        }
        let fl = SliceFunction::Polynomial { side: Side::Left, coeffs: coeffs.clone() };
        let fr = SliceFunction::Polynomial { side: Side::Right, coeffs };
        let got_l = sc_calculus(Side::Left, &fl, &t, &contour).unwrap().value;
        let got_r = sc_calculus(Side::Right, &fr, &t, &contour).unwrap().value;
        assert!(relative_residual(&got_l, &left) < 1e-10, "{alg}");
        assert!(relative_residual(&got_r, &right) < 1e-10, "{alg}");
        assert!(matches!(sc_calculus(Side::Right, &fl, &t, &contour), Err(Error::Precondition(_))));
    }
}

#[test]
fn f_calculus_kills_low_degrees() {
    // For n = 5 the F-kernel annihilates s^m for m < 4 and sends s^4 to γ_5.
    let alg = Algebra::Clifford { n: 5 };
    let t = random_commuting_tuple(alg, 2, &mut seeded(5));
    let contour = full_contour(&f_spectrum(&t), 0.5, &ImaginaryUnit::basis(alg, 1), 256).unwrap();
    for m in 0..4 {
        let v = f_calculus(Side::Left, &SliceFunction::monomial(m), &t, &contour).unwrap().value;
        assert!(v.amax() < 1e-9, "m = {m}");
    }
    let v = f_calculus(Side::Left, &SliceFunction::monomial(4), &t, &contour).unwrap().value;
    assert!(relative_residual(&v, &(t.rep().identity() * 64.0)) < 1e-9);
}

#[test]
fn even_dimensions_are_rejected() {
    let alg = Algebra::Clifford { n: 2 };
    let t = random_commuting_tuple(alg, 2, &mut seeded(1));
    let contour = full_contour(&f_spectrum(&t), 0.5, &ImaginaryUnit::basis(alg, 1), 64).unwrap();
    assert!(matches!(
        f_calculus(Side::Left, &SliceFunction::monomial(1), &t, &contour),
        Err(Error::Unsupported(_))
    ));
}
