use std::f64::consts::PI;

use liedeg_core::degree::degree_pointwise;
use liedeg_core::dynamics::{manufactured_su2, BasePoint, Cocycle, QuadratureSpec, TranslationFlow, TrigPoly};
use liedeg_core::group::AlgebraElement;
use liedeg_core::koopman::{
    ac_verdict, conjugate_vector, correlation_series, d_n_average, dini_modulus, inner_product, kernel_split, koopman_apply_corr, log_grid,
    mixing_verdict, rep_lie_derivative, wiener_average, DegreeData, FiberVector, Verdict,
};
use liedeg_core::rep::Representation;
use liedeg_core::scalar::c;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn random_trig(seed: u64, max_freq: i64) -> TrigPoly<f64> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut p = TrigPoly::zero(1);
    for f in -max_freq..=max_freq {
        p = p.plus(vec![f], c(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
    }
    p
}

fn su2_probe(l: u32, j: usize, seed: u64) -> FiberVector<f64> {
    let coeffs = (0..=l as u64).map(|k| random_trig(seed * 31 + k, 2)).collect();
    FiberVector::from_trig(Representation::su2(l), j, coeffs).unwrap()
}

fn torus_probe(q: i64, p: TrigPoly<f64>) -> FiberVector<f64> {
    FiberVector::from_trig(Representation::torus(vec![q]), 0, vec![p]).unwrap()
}

#[test]
fn correlations_are_conjugate_symmetric_in_time() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = manufactured_su2(&flow, 1).unwrap().phi;
    let (p1, p2) = (su2_probe(2, 1, 1), su2_probe(2, 1, 2));
    for n in [1i64, 3, 7] {
        let fwd = koopman_apply_corr(&p1, &p2, &phi, &flow, n, None).unwrap();
        let back = koopman_apply_corr(&p2, &p1, &phi, &flow, -n, None).unwrap();
        assert!((fwd.value - back.value.conj()).norm() <= 1e-10, "n = {n}");
        assert!(fwd.error_estimate <= 1e-10, "n = {n}: {:e}", fwd.error_estimate);
    }
}

#[test]
fn series_agrees_with_single_lag_evaluation() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = manufactured_su2(&flow, 1).unwrap().phi;
    let (p1, p2) = (su2_probe(1, 0, 3), su2_probe(1, 0, 4));
    let series = correlation_series(&p1, &p2, &phi, &flow, 10, None).unwrap();
    assert_eq!(series.flagged_count(), 0);
    let q = QuadratureSpec::new(series.nodes);
    for n in [0usize, 4, 10] {
        let single = koopman_apply_corr(&p1, &p2, &phi, &flow, n as i64, Some(q)).unwrap();
        assert!((single.value - series.values[n]).norm() <= 1e-12);
    }
    let norm0 = inner_product(&p1, &p2, &QuadratureSpec::new(16)).unwrap();
    assert!((series.values[0] - norm0).norm() <= 1e-13);
}

#[test]
fn correlations_are_linear_and_bounded() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = manufactured_su2(&flow, 2).unwrap().phi;
    let (p1, pa, pb) = (su2_probe(2, 0, 5), su2_probe(2, 0, 6), su2_probe(2, 0, 7));
    let (ca, cb) = (c(0.3, -1.2), c(2.0, 0.5));
    let combo = FiberVector::new(
        pa.rep.clone(),
        0,
        1,
        (0..3)
            .map(|k| {
                let (fa, fb) = (pa.coeffs[k].clone(), pb.coeffs[k].clone());
                std::sync::Arc::new(move |x: &BasePoint<f64>| ca * fa(x) + cb * fb(x)) as liedeg_core::koopman::CoeffFn<f64>
            })
            .collect(),
        pa.degree_bound,
    )
    .unwrap();
    let q = QuadratureSpec::new(16);
    let (n1, n2) = (inner_product(&p1, &p1, &q).unwrap().re.sqrt(), inner_product(&combo, &combo, &q).unwrap().re.sqrt());
    for n in [1i64, 5] {
        let lhs = koopman_apply_corr(&p1, &combo, &phi, &flow, n, None).unwrap().value;
        let rhs = ca * koopman_apply_corr(&p1, &pa, &phi, &flow, n, None).unwrap().value + cb * koopman_apply_corr(&p1, &pb, &phi, &flow, n, None).unwrap().value;
        assert!((lhs - rhs).norm() <= 1e-10);
        assert!(lhs.norm() <= n1 * n2 * (1.0 + 1e-12));
    }
}

#[test]
fn averaged_degree_operator_matches_the_pushed_degree() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = manufactured_su2(&flow, 1).unwrap().phi;
    let x = BasePoint::new(vec![0.37]);
    for rep in [Representation::<f64>::su2(1), Representation::su2(2), Representation::su2(3)] {
        for n in [1usize, 50, 500] {
            let direct = d_n_average(&rep, &phi, &flow, &x, n).unwrap();
            let deg = degree_pointwise(&phi, &flow, &x, n).value;
            let pushed = rep.differential(&deg).unwrap().matrix * c(0.0, 1.0);
            let dev = (direct - pushed).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            assert!(dev <= 1e-9, "{}: n = {n}, {dev:e}", rep.label());
        }
    }
}

#[test]
fn conjugation_intertwines_cohomologous_cocycles() {
    let flow = TranslationFlow::new(vec![golden()]);
    let pair = manufactured_su2(&flow, 1).unwrap();
    let (p1, p2) = (su2_probe(2, 1, 8), su2_probe(2, 1, 9));
    let (s1, s2) = (conjugate_vector(&p1, &pair.zeta).unwrap(), conjugate_vector(&p2, &pair.zeta).unwrap());
    let lhs = correlation_series(&s1, &s2, &pair.phi, &flow, 20, None).unwrap();
    let rhs = correlation_series(&p1, &p2, &pair.delta, &flow, 20, None).unwrap();
    for n in 0..=20 {
        let dev = (lhs.values[n] - rhs.values[n]).norm();
        assert!(dev <= 1e-8, "N = {n}: {dev:e}");
    }
}

#[test]
fn anzai_correlations_vanish_and_the_trivial_block_is_pure_point() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = Cocycle::torus_monomial(&flow, vec![vec![1]]).unwrap();
    let one = TrigPoly::constant(1, c(1.0, 0.0));
    let s = correlation_series(&torus_probe(1, one.clone()), &torus_probe(1, one.clone()), &phi, &flow, 50, None).unwrap();
    assert!((s.values[0] - c(1.0, 0.0)).norm() <= 1e-14);
    for n in 1..=50 {
        assert!(s.values[n].norm() <= 1e-10, "N = {n}: {:e}", s.values[n].norm());
    }
    // A trigonometric probe has finitely many frequencies; they all drift away.
    let p = random_trig(10, 3);
    let s = correlation_series(&torus_probe(1, p.clone()), &torus_probe(1, p), &phi, &flow, 50, None).unwrap();
    assert!(s.values[7..].iter().all(|v| v.norm() <= 1e-10));
    let s0 = correlation_series(&torus_probe(0, one.clone()), &torus_probe(0, one), &phi, &flow, 50, None).unwrap();
    assert!(wiener_average(&s0)[1..].iter().all(|a| *a >= 0.99));
}

#[test]
fn correlation_series_is_independent_of_thread_count() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = manufactured_su2(&flow, 1).unwrap().phi;
    let p = su2_probe(2, 0, 11);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| correlation_series(&p, &p, &phi, &flow, 15, None).unwrap())
    };
    let (a, b) = (run(1), run(4));
    let bits = |s: &liedeg_core::CorrelationSeries| s.values.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn kernel_split_diagonalises_hermitian_matrices() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let a = DMatrix::from_fn(4, 4, |_, _| Complex::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
    let h = &a + a.adjoint();
    let split = kernel_split(&h).unwrap();
    let diag = &split.q * &h * split.q.adjoint();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { c(split.eigenvalues[i], 0.0) } else { c(0.0, 0.0) };
            assert!((diag[(i, j)] - want).norm() <= 1e-12);
        }
    }
    assert!(split.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    assert!(kernel_split(&a).is_err() || (&a - a.adjoint()).norm() <= 1e-9);
}

#[test]
fn mixing_verdicts_for_abelian_and_diagonal_cocycles() {
    let flow = TranslationFlow::new(vec![golden()]);
    let anzai = Cocycle::torus_monomial(&flow, vec![vec![1]]).unwrap();
    let m = DegreeData::Constant(AlgebraElement::Torus(vec![2.0 * PI * golden()]));
    let probe = |q| torus_probe(q, TrigPoly::constant(1, c(1.0, 0.0)).plus(vec![1], c(0.5, 0.0)));
    let v = mixing_verdict(&Representation::torus(vec![1]), 0, &anzai, &flow, &m, &[probe(1)], 40, None).unwrap();
    assert_eq!(v.verdict, Verdict::Supported, "{:?}", v.notes);
    let v = mixing_verdict(&Representation::torus(vec![0]), 0, &anzai, &flow, &m, &[probe(0)], 40, None).unwrap();
    assert_eq!(v.verdict, Verdict::NoClaim);
    assert_eq!(v.probes[0].status, Verdict::NotInScope);

    // SU2 ℓ = 2 under a diagonal cocycle: index 1 spans ker D.
    let delta = Cocycle::su2_diagonal(&flow, 0, 1).unwrap();
    let md = DegreeData::Constant(AlgebraElement::su2_diag(2.0 * PI * golden()));
    let rep = Representation::su2(2);
    let unit = |k: usize| {
        let coeffs = (0..3).map(|i| if i == k { TrigPoly::constant(1, c(1.0, 0.0)) } else { TrigPoly::zero(1) }).collect();
        FiberVector::from_trig(rep.clone(), 0, coeffs).unwrap()
    };
    let v = mixing_verdict(&rep, 0, &delta, &flow, &md, &[unit(0), unit(1)], 40, None).unwrap();
    assert_eq!(v.kernel_indices, vec![1]);
    assert_eq!(v.probes[0].status, Verdict::Supported);
    assert_eq!(v.probes[1].status, Verdict::NotInScope);
    assert_eq!(v.verdict, Verdict::Supported);
}

#[test]
fn ac_verdicts_follow_the_kernel_of_the_degree() {
    let flow = TranslationFlow::new(vec![golden()]);
    let anzai = Cocycle::torus_monomial(&flow, vec![vec![1]]).unwrap();
    let m = DegreeData::Constant(AlgebraElement::Torus(vec![2.0 * PI * golden()]));
    let quad = QuadratureSpec::new(32);
    for q in [-2i64, -1, 0, 1, 3] {
        let rep = Representation::torus(vec![q]);
        let field = |x: &BasePoint<f64>| rep_lie_derivative(&rep, &anzai, x).unwrap();
        let dini = dini_modulus(&field, &flow, &log_grid(1e-6, 12), &quad).unwrap();
        assert!(dini.decays());
        let v = ac_verdict(&rep, 0, &anzai, &flow, &m, &dini).unwrap();
        let want = if q != 0 { Verdict::AcPredicted } else { Verdict::NotPredicted };
        assert_eq!(v.verdict, want, "q = {q}");
    }
}

#[test]
fn dini_modulus_is_linear_for_smooth_fields() {
    let flow = TranslationFlow::new(vec![golden()]);
    let phi = manufactured_su2(&flow, 1).unwrap().phi;
    let rep = Representation::su2(1);
    let field = |x: &BasePoint<f64>| rep.eval(&phi.eval(x)).unwrap().matrix;
    let grid = log_grid(1e-5, 6);
    let rep_ = dini_modulus(&field, &flow, &grid, &QuadratureSpec::new(64)).unwrap();
    let (t0, w0) = rep_.samples[0];
    let (t1, w1) = rep_.samples[1];
    let slope = (w1 / w0).ln() / (t1 / t0).ln();
    assert!((slope - 1.0).abs() <= 0.05, "slope {slope}");
    assert!(rep_.integral.is_finite() && rep_.heuristic);
    assert!(dini_modulus(&field, &flow, &[0.5, 0.1], &QuadratureSpec::new(4)).is_err());
}
