use liedeg_core::dynamics::{
    cocycle_iterate, cohomologous_build, manufactured_su2, skew_step, validate_m_field, validate_m_field_with, w_apply, BasePoint, Cocycle,
    DifferenceScheme, PhaseFunction, QuadratureSpec, TranslationFlow, TrigPoly,
};
use liedeg_core::group::{ad, haar_sample, AlgebraElement, GroupElement};
use liedeg_core::scalar::c;
use liedeg_core::GroupTag;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(d: usize, count: usize, seed: u64) -> Vec<BasePoint<f64>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| BasePoint::new((0..d).map(|_| r.random::<f64>()).collect())).collect()
}

/// One cocycle per group, each with non-trivial x-dependence.
fn sample_cocycles() -> Vec<(TranslationFlow<f64>, Cocycle<f64>)> {
    let f1 = TranslationFlow::default_for_dim(1);
    let f2 = TranslationFlow::default_for_dim(2);
    let u2_factors = vec![(
        PhaseFunction::linear(2, 1, 1.0).with_term(vec![1, 0], 0.4, -0.2),
        AlgebraElement::basis(GroupTag::Su2)[0].clone(),
    )];
    vec![
        (f2.clone(), Cocycle::torus_monomial(&f2, vec![vec![1, -2], vec![3, 0]]).unwrap()),
        (f1.clone(), manufactured_su2(&f1, 1).unwrap().phi),
        (f1.clone(), Cocycle::so3_rotation(&f1, 0, 2, 0.3).unwrap()),
        (f2.clone(), Cocycle::u2_product(&f2, PhaseFunction::linear(2, 0, 1.0), u2_factors).unwrap()),
    ]
}

#[test]
fn cocycle_identity_holds_for_positive_and_negative_times() {
    for (flow, phi) in sample_cocycles() {
        for x in random_points(flow.dim(), 100, 8) {
            for m in -3i64..=3 {
                for n in -3i64..=3 {
                    let lhs = cocycle_iterate(&phi, &flow, &x, m + n);
                    let xm = flow.advance(&x, m as f64);
                    let rhs = &cocycle_iterate(&phi, &flow, &x, m) * &cocycle_iterate(&phi, &flow, &xm, n);
                    let dev = lhs.distance(&rhs).unwrap();
                    assert!(dev <= 1e-11, "{}: m = {m}, n = {n}, dev {dev:e}", phi.tag);
                }
            }
        }
    }
}

#[test]
fn negative_iterates_invert_forward_products() {
    for (flow, phi) in sample_cocycles() {
        for x in random_points(flow.dim(), 20, 9) {
            for n in 1i64..=5 {
                let back = flow.advance(&x, -(n as f64));
                let want = cocycle_iterate(&phi, &flow, &back, n).inverse();
                assert!(cocycle_iterate(&phi, &flow, &x, -n).distance(&want).unwrap() <= 1e-11);
            }
            let e = GroupElement::identity(phi.tag);
            assert!(cocycle_iterate(&phi, &flow, &x, 0).distance(&e).unwrap() <= 1e-15);
        }
    }
}

#[test]
fn skew_product_composes() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for (flow, phi) in sample_cocycles() {
        for x in random_points(flow.dim(), 10, 10) {
            let g = haar_sample::<f64, _>(phi.tag, &mut r);
            for (m, n) in [(2i64, 3i64), (-1, 4), (-3, -2)] {
                let (y, h) = skew_step(&phi, &flow, &x, &g, m).unwrap();
                let (y2, h2) = skew_step(&phi, &flow, &y, &h, n).unwrap();
                let (z, k) = skew_step(&phi, &flow, &x, &g, m + n).unwrap();
                let phase_gap = y2.phases.iter().zip(&z.phases).map(|(a, b)| {
                    let d = (a - b).abs();
                    d.min(1.0 - d)
                });
                assert!(phase_gap.fold(0.0, f64::max) <= 1e-12);
                assert!(h2.distance(&k).unwrap() <= 1e-11);
            }
        }
    }
}

#[test]
fn transfer_operator_is_a_semigroup_and_pointwise_isometric() {
    let field = |x: &BasePoint<f64>| {
        let t = 2.0 * std::f64::consts::PI * x.phases[0];
        AlgebraElement::from_coords(GroupTag::Su2, &[t.cos(), 0.5 * t.sin(), (2.0 * t).cos() - 0.2])
    };
    let flow = TranslationFlow::default_for_dim(1);
    let phi = manufactured_su2(&flow, 2).unwrap().phi;
    for x in random_points(1, 30, 12) {
        for (m, n) in [(1i64, 2i64), (3, -1), (-2, -2)] {
            let inner = |y: &BasePoint<f64>| w_apply(&phi, &flow, &field, n, y);
            let lhs = w_apply(&phi, &flow, &inner, m, &x);
            let rhs = w_apply(&phi, &flow, &field, m + n, &x);
            assert!((lhs - rhs).norm() <= 1e-11);
        }
        let moved = w_apply(&phi, &flow, &field, 3, &x);
        assert!((moved.norm() - field(&flow.advance(&x, 3.0)).norm()).abs() <= 1e-12);
    }
    // ‖Wf(x)‖ = ‖f(F_1 x)‖ and the grid integrates ‖f‖² (degree 4) exactly,
    // so the translated integral matches.
    let quad = QuadratureSpec::new(64);
    let before = quad.integrate::<f64>(1, |x| c(field(x).norm().powi(2), 0.0)).0;
    let after = quad.integrate::<f64>(1, |x| c(w_apply(&phi, &flow, &field, 1, x).norm().powi(2), 0.0)).0;
    assert!((before - after).norm() <= 1e-12);
}

#[test]
fn flow_preserves_quadrature_of_trigonometric_polynomials() {
    let p = TrigPoly::<f64>::constant(2, c(0.7, 0.0)).plus(vec![1, -2], c(0.3, 0.1)).plus(vec![3, 1], c(-0.2, 0.5));
    let flow = TranslationFlow::default_for_dim(2);
    let quad = QuadratureSpec::new(8);
    let base = quad.integrate::<f64>(2, |x| p.eval(x)).0;
    assert!((base - c(0.7, 0.0)).norm() <= 1e-14);
    for t in [1.0, -2.5, 17.0] {
        let moved = quad.integrate::<f64>(2, |x| p.eval(&flow.advance(x, t))).0;
        assert!((moved - base).norm() <= 1e-13, "t = {t}");
    }
}

#[test]
fn trivial_transfer_function_reproduces_the_partner() {
    let flow = TranslationFlow::default_for_dim(1);
    let delta = Cocycle::su2_diagonal(&flow, 0, 2).unwrap();
    let zeta = Cocycle::constant(GroupElement::identity(GroupTag::Su2));
    let phi = cohomologous_build(&delta, &zeta, &flow).unwrap();
    for x in random_points(1, 50, 13) {
        assert!(phi.eval(&x).distance(&delta.eval(&x)).unwrap() <= 1e-15);
        assert!((phi.m(&x) - delta.m(&x)).norm() <= 1e-15);
    }
}

#[test]
fn built_m_field_matches_finite_differences() {
    let flow = TranslationFlow::default_for_dim(1);
    let pair = manufactured_su2(&flow, 1).unwrap();
    let pts = random_points(1, 40, 14);
    let rep = validate_m_field(&pair.phi, &flow, &pts, 1e-4);
    assert!(rep.max_deviation <= 1e-7, "{:e}", rep.max_deviation);
    for k in 1..=3 {
        let anzai = Cocycle::torus_monomial(&flow, vec![vec![k]]).unwrap();
        let rep = validate_m_field(&anzai, &flow, &pts, 1e-4);
        assert!(rep.max_deviation <= 1e-8, "k = {k}: {:e}", rep.max_deviation);
    }
}

#[test]
fn central_difference_converges_at_second_order() {
    let flow = TranslationFlow::default_for_dim(1);
    let phi = manufactured_su2(&flow, 1).unwrap().phi;
    let pts = random_points(1, 10, 15);
    let dev = |h: f64, s| validate_m_field_with(&phi, &flow, &pts, h, s).max_deviation;
    let central = dev(1e-2, DifferenceScheme::Central) / dev(5e-3, DifferenceScheme::Central);
    assert!((central - 4.0).abs() <= 0.4, "central ratio {central}");
    let richardson = dev(4e-2, DifferenceScheme::Richardson) / dev(2e-2, DifferenceScheme::Richardson);
    assert!((richardson - 16.0).abs() <= 2.0, "richardson ratio {richardson}");
}

#[test]
fn abelian_transfer_reduces_to_a_coboundary() {
    // On a torus, M_φ = M_δ − M_ζ + M_ζ∘F_1.
    let flow = TranslationFlow::default_for_dim(1);
    let delta = Cocycle::torus_monomial(&flow, vec![vec![2]]).unwrap();
    let s = PhaseFunction::constant(1, 0.1).with_term(vec![1], 0.4, 0.3).with_term(vec![3], 0.0, -0.2);
    let zeta = Cocycle::exp_product(GroupTag::Torus(1), &flow, vec![(s, AlgebraElement::basis(GroupTag::Torus(1))[0].clone())], "trig").unwrap();
    let phi = cohomologous_build(&delta, &zeta, &flow).unwrap();
    for x in random_points(1, 50, 16) {
        let x1 = flow.advance(&x, 1.0);
        let want = delta.m(&x) - zeta.m(&x) + zeta.m(&x1);
        assert!((phi.m(&x) - want).norm() <= 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m_field_transforms_by_the_cocycle_formula(seed in any::<u64>(), t in 0.0f64..1.0) {
        // M_{φ^{(2)}} = M_φ + Ad_φ (M_φ∘F_1).
        let flow = TranslationFlow::default_for_dim(1);
        let phi = manufactured_su2(&flow, 1 + (seed % 3) as i64).unwrap().phi;
        let x = BasePoint::new(vec![t]);
        let x1 = flow.advance(&x, 1.0);
        let two = phi.m(&x) + ad(&phi.eval(&x), &phi.m(&x1)).unwrap();
        let f = |s: f64| cocycle_iterate(&phi, &flow, &flow.advance(&x, s), 2).to_matrix();
        let central = |h: f64| (f(h) - f(-h)) / c(2.0 * h, 0.0);
        let fd = (central(5e-4) * c(4.0, 0.0) - central(1e-3)) / c(3.0, 0.0);
        let est = AlgebraElement::project_matrix(GroupTag::Su2, &(fd * cocycle_iterate(&phi, &flow, &x, 2).inverse().to_matrix()));
        prop_assert!((est.clone() - two.clone()).norm() <= 1e-7 * two.norm().max(1.0), "{:?} vs {:?}", est.coords(), two.coords());
    }
}
