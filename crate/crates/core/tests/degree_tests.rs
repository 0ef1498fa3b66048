use std::f64::consts::PI;

use liedeg_core::degree::{
    degree_constant_diagonal, degree_constant_ergodic, degree_pointwise, ergodicity_verdict, hermitian_degree, invariance_check_cohomology,
    invariance_check_homomorphism, rep_degree_data, rho_phi, su2_straighten, su2_transfer_zeta, DegreeField, HomSource, Homomorphism, Obstruction,
};
use liedeg_core::dynamics::{manufactured_su2, BasePoint, Cocycle, PhaseFunction, QuadratureSpec, TranslationFlow};
use liedeg_core::group::{ad, AlgebraElement, GroupElement};
use liedeg_core::koopman::kernel_split;
use liedeg_core::rep::Representation;
use liedeg_core::scalar::c;
use liedeg_core::{GroupTag, LieError};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn random_points(d: usize, count: usize, seed: u64) -> Vec<BasePoint<f64>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| BasePoint::new((0..d).map(|_| r.random::<f64>()).collect())).collect()
}

fn torus_value(z: &AlgebraElement<f64>) -> Vec<f64> {
    match z {
        AlgebraElement::Torus(v) => v.clone(),
        _ => panic!("expected a torus element"),
    }
}

#[test]
fn anzai_degree_matches_rotation_number() {
    let flow = TranslationFlow::new(vec![golden()]);
    for k in 1..=3i64 {
        let phi = Cocycle::torus_monomial(&flow, vec![vec![k]]).unwrap();
        let want = 2.0 * PI * golden() * k as f64;
        for x in random_points(1, 20, 100 + k as u64) {
            let est = degree_pointwise(&phi, &flow, &x, 10_000);
            assert!((torus_value(&est.value)[0] - want).abs() <= 1e-3, "k = {k}");
        }
        let exact = degree_constant_diagonal(&phi, &QuadratureSpec::new(8), 1);
        assert!((torus_value(&exact)[0] - want).abs() <= 1e-13);
        let ergodic = degree_constant_ergodic(&phi, &QuadratureSpec::new(8), 1);
        assert!((torus_value(&ergodic)[0] - want).abs() <= 1e-13);
    }
}

#[test]
fn torus_degree_with_trigonometric_perturbation_is_the_linear_part() {
    // s(x) = 2π·3⟨e_0, x⟩ + 0.4 cos(2π x_1): the periodic part integrates out.
    let flow = TranslationFlow::default_for_dim(2);
    let s = PhaseFunction::linear(2, 0, 3.0).with_term(vec![0, 1], 0.4, 0.0);
    let phi = Cocycle::exp_product(GroupTag::Torus(1), &flow, vec![(s, AlgebraElement::basis(GroupTag::Torus(1))[0].clone())], "trig").unwrap();
    let quad = QuadratureSpec::new(16);
    let want = 2.0 * PI * 3.0 * flow.alpha[0];
    assert!((torus_value(&degree_constant_diagonal(&phi, &quad, 2))[0] - want).abs() <= 1e-12);
}

#[test]
fn degree_eigenvalue_patterns_and_kernels() {
    let rho = 0.83;
    let z = AlgebraElement::su2_diag(rho);
    for l in 0..=6u32 {
        let rep = Representation::<f64>::su2(l);
        let split = kernel_split(&hermitian_degree(&rep, &z).unwrap()).unwrap();
        let want_kernel: Vec<usize> = (0..=l as usize).filter(|j| l as usize == 2 * j).collect();
        assert_eq!(split.kernel, want_kernel, "l = {l}");
        for (j, ev) in split.eigenvalues.iter().enumerate() {
            assert!((ev - rho * (l as f64 - 2.0 * j as f64)).abs() <= 1e-10);
        }
    }
    let s = 1.1;
    let z = AlgebraElement::u2_scalar(s);
    for l in 0..=4u32 {
        for m in -2..=2i64 {
            let data = rep_degree_data(&Representation::<f64>::u2(l, m), Some(&z), None).unwrap();
            let want: Vec<usize> = if 2 * m == l as i64 { (0..=l as usize).collect() } else { Vec::new() };
            assert_eq!(data.kernel_indices, want, "(l, m) = ({l}, {m})");
        }
    }
}

#[test]
fn manufactured_pair_has_equal_degrees() {
    let flow = TranslationFlow::new(vec![golden()]);
    let pair = manufactured_su2(&flow, 1).unwrap();
    let pts = random_points(1, 20, 6);
    let chk = invariance_check_cohomology(&pair.phi, &pair.delta, &pair.zeta, &flow, 10_000, &pts).unwrap();
    assert!(chk.degree_deviation <= 5e-3, "{chk:?}");
    assert!(chk.norm_deviation <= 5e-3, "{chk:?}");
    let field = DegreeField::estimate(&pair.phi, &flow, &pts, 10_000);
    let rho = rho_phi(&field).unwrap();
    assert!((rho.rho - 2.0 * PI * golden()).abs() <= 5e-3, "{rho:?}");
}

#[test]
fn rho_constancy_improves_with_more_terms() {
    let flow = TranslationFlow::new(vec![golden()]);
    let pair = manufactured_su2(&flow, 1).unwrap();
    let pts = random_points(1, 20, 7);
    let coarse = rho_phi(&DegreeField::estimate(&pair.phi, &flow, &pts, 2_500)).unwrap();
    let fine = rho_phi(&DegreeField::estimate(&pair.phi, &flow, &pts, 10_000)).unwrap();
    assert!(fine.max_deviation < coarse.max_deviation, "{coarse:?} -> {fine:?}");
    assert_eq!(rho_phi(&DegreeField::estimate(&Cocycle::constant(GroupElement::identity(GroupTag::Su2)), &flow, &pts, 10)).unwrap().rho, 0.0);
}

#[test]
fn transfer_zeta_branches() {
    let rho = 1.7;
    let top = su2_transfer_zeta(&AlgebraElement::su2_diag(rho), rho).unwrap();
    assert_eq!(top, GroupElement::identity(GroupTag::Su2));
    let bottom = su2_transfer_zeta(&AlgebraElement::su2_diag(-rho), rho).unwrap();
    let m = bottom.matrix2().unwrap();
    assert_eq!((m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]), (c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
    assert!(matches!(su2_transfer_zeta(&AlgebraElement::su2_diag(rho), 2.0 * rho), Err(LieError::InconsistentDegree { .. })));
}

#[test]
fn straightening_diagonalises_the_manufactured_pair() {
    let flow = TranslationFlow::new(vec![golden()]);
    let pair = manufactured_su2(&flow, 1).unwrap();
    let grid = QuadratureSpec::new(32).points::<f64>(1);
    let at_1e4 = su2_straighten(&pair.phi, &flow, 10_000, &grid, 1e-3).unwrap();
    let at_4e4 = su2_straighten(&pair.phi, &flow, 40_000, &grid, 1e-3).unwrap();
    assert!(at_1e4.max_off_diagonal <= 1e-2, "{:e}", at_1e4.max_off_diagonal);
    assert!(at_4e4.max_off_diagonal < at_1e4.max_off_diagonal, "{:e} -> {:e}", at_1e4.max_off_diagonal, at_4e4.max_off_diagonal);
    let w = at_1e4.winding.unwrap();
    assert!((w - 1.0).abs() <= 1e-6, "winding {w}");
}

#[test]
fn straightening_rejects_vanishing_degree() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = Cocycle::constant(GroupElement::identity(GroupTag::Su2));
    let grid = QuadratureSpec::new(4).points::<f64>(1);
    assert!(matches!(su2_straighten(&phi, &flow, 100, &grid, 1e-3), Err(LieError::DegenerateDegree { .. })));
}

#[test]
fn degrees_push_forward_under_homomorphisms() {
    let flow = TranslationFlow::new(vec![golden()]);
    let pts = random_points(1, 10, 21);
    let anzai = Cocycle::torus_monomial(&flow, vec![vec![2]]).unwrap();
    for h in [Homomorphism::Identity, Homomorphism::TorusPower(3), Homomorphism::TorusPower(-2)] {
        let chk = invariance_check_homomorphism(h, HomSource::Single(&anzai), &flow, 2_000, &pts).unwrap();
        assert!(chk.max_deviation <= 1e-9, "{h}: {chk:?}");
        assert!(chk.m_field_deviation <= 1e-7, "{h}: {chk:?}");
    }
    let pair = manufactured_su2(&flow, 1).unwrap();
    let chk = invariance_check_homomorphism(Homomorphism::DoubleCover, HomSource::Single(&pair.phi), &flow, 2_000, &pts).unwrap();
    assert!(chk.max_deviation <= 1e-9 && chk.m_field_deviation <= 1e-6, "{chk:?}");

    let rotation = Cocycle::so3_rotation(&flow, 0, 1, 0.0).unwrap();
    let circle = Cocycle::torus_monomial(&flow, vec![vec![1]]).unwrap();
    let src = HomSource::So3Torus { rotation: &rotation, circle: &circle };
    let chk = invariance_check_homomorphism(Homomorphism::So3TorusIso, src, &flow, 2_000, &pts).unwrap();
    assert!(chk.max_deviation <= 1e-9 && chk.m_field_deviation <= 1e-6, "{chk:?}");
    // The U2 composite carries the circle rotation number as its trace part.
    let composite = liedeg_core::degree::compose(Homomorphism::So3TorusIso, src).unwrap();
    let deg = degree_pointwise(&composite, &flow, &pts[0], 10_000).value.to_matrix();
    let trace = deg[(0, 0)] + deg[(1, 1)];
    assert!((trace - c(0.0, 2.0 * PI * golden())).norm() <= 1e-3, "{trace}");
}

#[test]
fn obstruction_list() {
    let flow = TranslationFlow::new(vec![golden()]);
    let pair = manufactured_su2(&flow, 1).unwrap();
    let int_m = degree_constant_ergodic(&pair.phi, &QuadratureSpec::new(32), 1);
    let v = ergodicity_verdict(GroupTag::Su2, &int_m, true, true).unwrap();
    assert!(v.fires(Obstruction::NotUniquelyErgodicA) && v.fires(Obstruction::NotUniquelyErgodicB) && v.fires(Obstruction::NotErgodicC));
    assert_eq!(v.headline(), "NOT_ERGODIC(c)");
    let v = ergodicity_verdict(GroupTag::Su2, &int_m, true, false).unwrap();
    assert!(v.fires(Obstruction::NotUniquelyErgodicB) && !v.fires(Obstruction::NotErgodicC));
    let v = ergodicity_verdict(GroupTag::Torus(1), &AlgebraElement::Torus(vec![0.7]), true, true).unwrap();
    assert!(v.obstructions.is_empty());
    let v = ergodicity_verdict(GroupTag::Su2, &int_m, false, true).unwrap();
    assert_eq!(v.labels(), vec!["NO_OBSTRUCTION".to_string()]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn transfer_zeta_conjugates_to_the_diagonal(a in any::<u64>(), rho in 0.01f64..10.0) {
        let mut r = ChaCha8Rng::seed_from_u64(a);
        let v: Vec<f64> = (0..3).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let d = AlgebraElement::from_coords(GroupTag::Su2, &v).scale(rho / (n * AlgebraElement::from_coords(GroupTag::Su2, &[1.0, 0.0, 0.0]).norm()));
        let zeta = su2_transfer_zeta(&d, rho).unwrap();
        let got = ad(&zeta, &d).unwrap();
        prop_assert!((got - AlgebraElement::su2_diag(rho)).norm() <= 1e-8 * rho.max(1.0));
    }
}
