//! Degrees of cocycles: Cesàro estimates of `P_φ M_φ`, closed forms for the
//! constant case, invariance checks, the SU(2) straightening and
//! non-ergodicity obstructions.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use crate::dynamics::{ordered_reduce, validate_m_field, BasePoint, Cocycle, Orbit, QuadratureSpec, TranslationFlow};
use crate::error::{check_tags, LieError, Result};
use crate::group::{ad, iso_differential, iso_so3_torus_to_u2, p_ad, su2_to_so3_algebra, double_cover, AlgebraElement, Branch, GroupElement, GroupTag};
use crate::koopman::kernel_split;
use crate::rep::Representation;
use crate::scalar::{c, cabs, carg, ci, lit, to_f64, Real};

pub const DEFAULT_N_DEGREE: usize = 10_000;
/// A degree field counts as constant when its cross-point spread is at most
/// this multiple of the largest N-vs-N/2 diagnostic.
pub const CONSTANT_SPREAD_FACTOR: f64 = 10.0;
pub const RHO_THRESHOLD: f64 = 1e-3;
pub const BRANCH_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-6;
/// `P_Ad(∫M)` counts as zero below this norm.
pub const CENTER_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeEstimate<T: Real> {
    pub value: AlgebraElement<T>,
    /// Average over the first `max(1, N/2)` terms.
    pub half: AlgebraElement<T>,
    pub n_used: usize,
}

impl<T: Real> DegreeEstimate<T> {
    pub fn diagnostic(&self) -> T {
        (self.value.clone() - self.half.clone()).norm()
    }
}

/// `(1/N) Σ_{n<N} Ad_{φ^{(n)}(x)} M_φ(F_n x)`.
pub fn degree_pointwise<T: Real>(c: &Cocycle<T>, flow: &TranslationFlow<T>, x: &BasePoint<T>, n: usize) -> DegreeEstimate<T> {
    let n = n.max(1);
    let half_n = (n / 2).max(1);
    let mut acc = AlgebraElement::zero(c.tag);
    let mut half = AlgebraElement::zero(c.tag);
    for (k, xk, g) in Orbit::new(c, flow, x).take(n) {
        acc = acc + ad(&g, &c.m(&xk)).expect("cocycle and its field share a tag");
        if k as usize + 1 == half_n {
            half = acc.scale(T::one() / T::from_usize(half_n).unwrap());
        }
    }
    DegreeEstimate { value: acc.scale(T::one() / T::from_usize(n).unwrap()), half, n_used: n }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeField<T: Real> {
    pub points: Vec<BasePoint<T>>,
    pub values: Vec<AlgebraElement<T>>,
    pub half_values: Vec<AlgebraElement<T>>,
    pub n_used: usize,
    /// `‖estimate_N − estimate_{N/2}‖` per point.
    pub diagnostics: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constancy<T: Real> {
    pub mean: AlgebraElement<T>,
    pub spread: T,
    pub tolerance: T,
    pub constant: bool,
}

impl<T: Real> DegreeField<T> {
    pub fn estimate(c: &Cocycle<T>, flow: &TranslationFlow<T>, points: &[BasePoint<T>], n: usize) -> Self {
        let est: Vec<DegreeEstimate<T>> = points.par_iter().map(|x| degree_pointwise(c, flow, x, n)).collect();
        Self {
            points: points.to_vec(),
            diagnostics: est.iter().map(|e| e.diagnostic()).collect(),
            values: est.iter().map(|e| e.value.clone()).collect(),
            half_values: est.into_iter().map(|e| e.half).collect(),
            n_used: n.max(1),
        }
    }

    pub fn tag(&self) -> Option<GroupTag> {
        self.values.first().map(|v| v.tag())
    }

    pub fn max_diagnostic(&self) -> T {
        self.diagnostics.iter().fold(T::zero(), |a, d| a.max(*d))
    }

    pub fn mean(&self) -> Option<AlgebraElement<T>> {
        let first = self.values.first()?;
        let sum = self.values.iter().skip(1).fold(first.clone(), |a, v| a + v.clone());
        Some(sum.scale(T::one() / T::from_usize(self.values.len()).unwrap()))
    }

    /// Largest pairwise distance between point estimates.
    pub fn spread(&self) -> T {
        let mut s = T::zero();
        for (i, a) in self.values.iter().enumerate() {
            for b in &self.values[i + 1..] {
                s = s.max((a.clone() - b.clone()).norm());
            }
        }
        s
    }

    pub fn constancy(&self) -> Option<Constancy<T>> {
        let mean = self.mean()?;
        let spread = self.spread();
        let floor = lit::<T>(1e-12) * T::one().max(mean.norm());
        let tolerance = (lit::<T>(CONSTANT_SPREAD_FACTOR) * self.max_diagnostic()).max(floor);
        Some(Constancy { constant: spread <= tolerance, mean, spread, tolerance })
    }
}

/// Quadrature average of `M_φ` over the base.
pub fn degree_constant_diagonal<T: Real>(c: &Cocycle<T>, quad: &QuadratureSpec, d: usize) -> AlgebraElement<T> {
    let dim = c.tag.algebra_dim();
    let sum = ordered_reduce(
        quad.total(d),
        |range| {
            let mut acc = vec![T::zero(); dim];
            for i in range {
                let (x, _) = quad.node::<T>(d, i);
                for (a, v) in acc.iter_mut().zip(c.m(&x).coords()) {
                    *a += v;
                }
            }
            acc
        },
        |a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
    )
    .unwrap_or_else(|| vec![T::zero(); dim]);
    let w = T::one() / T::from_usize(quad.total(d)).unwrap();
    AlgebraElement::from_coords(c.tag, &sum.into_iter().map(|v| v * w).collect::<Vec<_>>())
}

/// `P_Ad` of the quadrature average of `M_φ`.
pub fn degree_constant_ergodic<T: Real>(c: &Cocycle<T>, quad: &QuadratureSpec, d: usize) -> AlgebraElement<T> {
    p_ad(&degree_constant_diagonal(c, quad, d))
}

/// `i (dπ)(Z)`, Hermitian for `Z` in the Lie algebra.
pub fn hermitian_degree<T: Real>(rep: &Representation<T>, z: &AlgebraElement<T>) -> Result<DMatrix<Complex<T>>> {
    Ok(rep.differential(z)?.matrix * ci::<T>())
}

/// Minimum over the supplied degree values of the smallest eigenvalue of
/// `(i dπ(D))²`. For a varying field this is the grid minimum, a
/// lower-resolution surrogate for the essential infimum.
pub fn a_phi_pi<T: Real>(rep: &Representation<T>, values: &[AlgebraElement<T>]) -> Result<T> {
    let mut best: Option<T> = None;
    for v in values {
        let split = kernel_split(&hermitian_degree(rep, v)?)?;
        let m = split.eigenvalues.iter().fold(T::max_value().unwrap_or(lit(f64::MAX)), |a, l| a.min(*l * *l));
        best = Some(best.map_or(m, |b| b.min(m)));
    }
    Ok(best.unwrap_or(T::zero()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyCheck<T: Real> {
    /// `max ‖deg_δ(x) − Ad_{ζ(x)} deg_φ(x)‖`.
    pub degree_deviation: T,
    /// `max |‖deg_δ(x)‖ − ‖deg_φ(x)‖|`.
    pub norm_deviation: T,
    pub max_diagnostic: T,
    pub n_used: usize,
}

pub fn invariance_check_cohomology<T: Real>(
    phi: &Cocycle<T>,
    delta: &Cocycle<T>,
    zeta: &Cocycle<T>,
    flow: &TranslationFlow<T>,
    n: usize,
    points: &[BasePoint<T>],
) -> Result<CohomologyCheck<T>> {
    check_tags(phi.tag, delta.tag)?;
    check_tags(phi.tag, zeta.tag)?;
    let fp = DegreeField::estimate(phi, flow, points, n);
    let fd = DegreeField::estimate(delta, flow, points, n);
    let mut out = CohomologyCheck {
        degree_deviation: T::zero(),
        norm_deviation: T::zero(),
        max_diagnostic: fp.max_diagnostic().max(fd.max_diagnostic()),
        n_used: n.max(1),
    };
    for ((x, vp), vd) in points.iter().zip(&fp.values).zip(&fd.values) {
        let moved = ad(&zeta.eval(x), vp)?;
        out.degree_deviation = out.degree_deviation.max((vd.clone() - moved).norm());
        out.norm_deviation = out.norm_deviation.max((vd.norm() - vp.norm()).abs());
    }
    Ok(out)
}

/// Homomorphisms the lab can push cocycles through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homomorphism {
    Identity,
    /// `y ↦ y^p` on a torus.
    TorusPower(i64),
    /// SU(2) → SO(3).
    DoubleCover,
    /// SO(3) × T → U(2), `(R, w) ↦ √w · lift(R)`.
    So3TorusIso,
}

impl fmt::Display for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Homomorphism::Identity => write!(f, "identity"),
            Homomorphism::TorusPower(p) => write!(f, "torus power {p}"),
            Homomorphism::DoubleCover => write!(f, "double cover SU2 -> SO3"),
            Homomorphism::So3TorusIso => write!(f, "SO3 x T -> U2"),
        }
    }
}

/// Source cocycle of a homomorphism check; the SO(3) × T case is a pair.
#[derive(Clone, Copy, Debug)]
pub enum HomSource<'a, T: Real> {
    Single(&'a Cocycle<T>),
    So3Torus { rotation: &'a Cocycle<T>, circle: &'a Cocycle<T> },
}

impl<T: Real> HomSource<'_, T> {
    fn single(&self) -> Result<&Cocycle<T>> {
        match self {
            HomSource::Single(c) => Ok(c),
            HomSource::So3Torus { .. } => Err(LieError::UnsupportedHomomorphism("expected a single cocycle".into())),
        }
    }
}

fn torus_power<T: Real>(g: &GroupElement<T>, p: i64) -> GroupElement<T> {
    match g {
        GroupElement::Torus(v) => GroupElement::Torus(v.iter().map(|z| crate::scalar::cpowi(*z, p)).collect()),
        _ => unreachable!(),
    }
}

impl Homomorphism {
    fn check_source<T: Real>(&self, src: &HomSource<'_, T>) -> Result<()> {
        match (self, src) {
            (Homomorphism::Identity, HomSource::Single(_)) => Ok(()),
            (Homomorphism::TorusPower(_), HomSource::Single(c)) if matches!(c.tag, GroupTag::Torus(_)) => Ok(()),
            (Homomorphism::DoubleCover, HomSource::Single(c)) => check_tags(GroupTag::Su2, c.tag),
            (Homomorphism::So3TorusIso, HomSource::So3Torus { rotation, circle }) => {
                check_tags(GroupTag::So3, rotation.tag)?;
                check_tags(GroupTag::Torus(1), circle.tag)
            }
            _ => Err(LieError::UnsupportedHomomorphism(format!("{self} on this source"))),
        }
    }

    pub fn target<T: Real>(&self, src: &HomSource<'_, T>) -> Result<GroupTag> {
        self.check_source(src)?;
        Ok(match self {
            Homomorphism::Identity | Homomorphism::TorusPower(_) => src.single()?.tag,
            Homomorphism::DoubleCover => GroupTag::So3,
            Homomorphism::So3TorusIso => GroupTag::U2,
        })
    }
}

/// The composite cocycle `h∘δ` with `M_{h∘δ} = (dh)(M_δ)`.
pub fn compose<T: Real>(h: Homomorphism, src: HomSource<'_, T>) -> Result<Cocycle<T>> {
    let target = h.target(&src)?;
    let note = format!("{h} of a source cocycle");
    Ok(match (h, src) {
        (Homomorphism::Identity, HomSource::Single(c)) => c.clone(),
        (Homomorphism::TorusPower(p), HomSource::Single(c)) => {
            let (cv, cm) = (c.clone(), c.clone());
            let bound = c.frequency_bound.map(|b| b * p.unsigned_abs() as u32);
            Cocycle::new(target, move |x| torus_power(&cv.eval(x), p), move |x| cm.m(x).scale(T::from_i64(p).unwrap()), note, bound)
        }
        (Homomorphism::DoubleCover, HomSource::Single(c)) => {
            let (cv, cm) = (c.clone(), c.clone());
            let bound = c.frequency_bound.map(|b| 2 * b);
            Cocycle::new(target, move |x| double_cover(&cv.eval(x)).expect("SU2"), move |x| su2_to_so3_algebra(&cm.m(x)).expect("su2"), note, bound)
        }
        (Homomorphism::So3TorusIso, HomSource::So3Torus { rotation, circle }) => {
            let (rv, cv) = (rotation.clone(), circle.clone());
            let (rm, cm) = (rotation.clone(), circle.clone());
            let value = move |x: &BasePoint<T>| {
                let GroupElement::Torus(w) = cv.eval(x) else { unreachable!() };
                iso_so3_torus_to_u2(&rv.eval(x), w[0], Branch::Plus).expect("SO3")
            };
            let m_field = move |x: &BasePoint<T>| {
                let AlgebraElement::Torus(t) = cm.m(x) else { unreachable!() };
                iso_differential(&rm.m(x), t[0]).expect("so3")
            };
            Cocycle::new(target, value, m_field, format!("{note}; values defined up to sign"), None)
        }
        _ => unreachable!("checked by target"),
    })
}

/// `(dh)(Z)` for the degree of the source.
pub fn hom_differential<T: Real>(h: Homomorphism, z: &AlgebraElement<T>, circle: Option<&AlgebraElement<T>>) -> Result<AlgebraElement<T>> {
    match h {
        Homomorphism::Identity => Ok(z.clone()),
        Homomorphism::TorusPower(p) => Ok(z.scale(T::from_i64(p).unwrap())),
        Homomorphism::DoubleCover => su2_to_so3_algebra(z),
        Homomorphism::So3TorusIso => {
            let Some(AlgebraElement::Torus(t)) = circle else {
                return Err(LieError::UnsupportedHomomorphism("missing circle component".into()));
            };
            iso_differential(z, t[0])
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomomorphismCheck<T: Real> {
    /// `max ‖deg_{h∘δ}(x) − (dh)(deg_δ(x))‖`.
    pub max_deviation: T,
    pub max_diagnostic: T,
    /// Finite-difference validation of the composite M-field.
    pub m_field_deviation: T,
    pub n_used: usize,
}

pub fn invariance_check_homomorphism<T: Real>(
    h: Homomorphism,
    src: HomSource<'_, T>,
    flow: &TranslationFlow<T>,
    n: usize,
    points: &[BasePoint<T>],
) -> Result<HomomorphismCheck<T>> {
    let composite = compose(h, src)?;
    let fc = DegreeField::estimate(&composite, flow, points, n);
    let (primary, circle) = match src {
        HomSource::Single(c) => (DegreeField::estimate(c, flow, points, n), None),
        HomSource::So3Torus { rotation, circle } => (
            DegreeField::estimate(rotation, flow, points, n),
            Some(DegreeField::estimate(circle, flow, points, n)),
        ),
    };
    let mut dev = T::zero();
    for (i, vc) in fc.values.iter().enumerate() {
        let pushed = hom_differential(h, &primary.values[i], circle.as_ref().map(|f| &f.values[i]))?;
        dev = dev.max((vc.clone() - pushed).norm());
    }
    let mut diag = fc.max_diagnostic().max(primary.max_diagnostic());
    if let Some(f) = &circle {
        diag = diag.max(f.max_diagnostic());
    }
    let m_check = validate_m_field(&composite, flow, points, lit(1e-4));
    Ok(HomomorphismCheck { max_deviation: dev, max_diagnostic: diag, m_field_deviation: m_check.max_deviation, n_used: n.max(1) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoReport<T: Real> {
    pub rho: T,
    /// `max |‖deg(x)‖ − ρ|` over the sample points.
    pub max_deviation: T,
}

/// `ρ_φ` as the mean of `‖deg(x)‖` over the field's points.
pub fn rho_phi<T: Real>(field: &DegreeField<T>) -> Result<RhoReport<T>> {
    if let Some(tag) = field.tag() {
        check_tags(GroupTag::Su2, tag)?;
    }
    if field.values.is_empty() {
        return Ok(RhoReport { rho: T::zero(), max_deviation: T::zero() });
    }
    let norms: Vec<T> = field.values.iter().map(|v| v.norm()).collect();
    let rho = norms.iter().fold(T::zero(), |a, v| a + *v) / T::from_usize(norms.len()).unwrap();
    let max_deviation = norms.iter().fold(T::zero(), |a, v| a.max((*v - rho).abs()));
    Ok(RhoReport { rho, max_deviation })
}

/// SU(2) `(a, b, c)` of `[[ia, b+ic], [-b+ic, -ia]]`.
fn su2_abc<T: Real>(d: &AlgebraElement<T>) -> Result<(T, T, T)> {
    check_tags(GroupTag::Su2, d.tag())?;
    let x = d.coords();
    Ok((x[2], x[1], x[0]))
}

/// The three-branch transfer function with `Ad_ζ D = diag(iρ, −iρ)`.
pub fn su2_transfer_zeta<T: Real>(d: &AlgebraElement<T>, rho: T) -> Result<GroupElement<T>> {
    let (a, b, cc) = su2_abc(d)?;
    let norm = d.norm();
    // Negated so that a NaN ρ is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(rho > T::zero()) || (norm - rho).abs() > lit::<T>(NORM_TOL) * T::one().max(rho) {
        return Err(LieError::InconsistentDegree { norm: to_f64(norm), rho: to_f64(rho) });
    }
    let tol: T = lit(BRANCH_TOL);
    if (a - rho).abs() <= tol {
        return Ok(GroupElement::identity(GroupTag::Su2));
    }
    if (a + rho).abs() <= tol {
        return Ok(GroupElement::Su2(c(T::zero(), T::zero()), c(-T::one(), T::zero())));
    }
    let w = c(b, cc);
    let wn = cabs(w);
    if wn == T::zero() {
        return Err(LieError::InconsistentDegree { norm: to_f64(norm), rho: to_f64(rho) });
    }
    let two_rho = rho + rho;
    let plus = ((rho + a).max(T::zero()) / two_rho).sqrt();
    let minus = ((rho - a).max(T::zero()) / two_rho).sqrt();
    let z1 = ci::<T>() * c(plus, T::zero()) * w.conj() / c(wn, T::zero());
    let z2 = c(minus, T::zero());
    Ok(GroupElement::Su2(z1, z2).renormalized())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Straightening<T: Real> {
    pub points: Vec<BasePoint<T>>,
    pub zeta: Vec<GroupElement<T>>,
    pub delta: Vec<GroupElement<T>>,
    pub rho: T,
    /// `max |δ(x)_{01}|`.
    pub max_off_diagonal: T,
    /// `min |b + ic| / ρ` over the grid; small values flag proximity to the
    /// degenerate branch `a = −ρ`.
    pub min_conditioning: T,
    /// Winding number of `δ(x)_{00}` along the supplied point order, when
    /// the base is one-dimensional.
    pub winding: Option<T>,
    pub max_diagnostic: T,
    pub n_used: usize,
}

/// `δ(x) = ζ(x) φ(x) ζ(F_1 x)^{-1}` with `ζ` built pointwise from degree
/// estimates at `x` and `F_1 x`.
pub fn su2_straighten<T: Real>(phi: &Cocycle<T>, flow: &TranslationFlow<T>, n: usize, grid: &[BasePoint<T>], threshold: T) -> Result<Straightening<T>> {
    check_tags(GroupTag::Su2, phi.tag)?;
    let shifted: Vec<BasePoint<T>> = grid.iter().map(|x| flow.advance(x, T::one())).collect();
    let here = DegreeField::estimate(phi, flow, grid, n);
    let there = DegreeField::estimate(phi, flow, &shifted, n);
    let rho = rho_phi(&here)?.rho;
    if rho <= threshold {
        return Err(LieError::DegenerateDegree { rho: to_f64(rho), threshold: to_f64(threshold) });
    }
    let zeta_of = |d: &AlgebraElement<T>| -> Result<GroupElement<T>> {
        let nd = d.norm();
        if nd <= threshold {
            return Err(LieError::DegenerateDegree { rho: to_f64(nd), threshold: to_f64(threshold) });
        }
        su2_transfer_zeta(&d.scale(rho / nd), rho)
    };
    let mut zeta = Vec::with_capacity(grid.len());
    let mut delta = Vec::with_capacity(grid.len());
    let mut off = T::zero();
    let mut cond = T::max_value().unwrap_or(lit(f64::MAX));
    for (i, x) in grid.iter().enumerate() {
        let z0 = zeta_of(&here.values[i])?;
        let z1 = zeta_of(&there.values[i])?;
        let dlt = (&(&z0 * &phi.eval(x)) * &z1.inverse()).renormalized();
        if let GroupElement::Su2(_, w) = &dlt {
            off = off.max(cabs(*w));
        }
        let (_, b, cc) = su2_abc(&here.values[i])?;
        cond = cond.min((b * b + cc * cc).sqrt() / here.values[i].norm());
        zeta.push(z0);
        delta.push(dlt);
    }
    let winding = if grid.first().map(|x| x.dim()) == Some(1) && delta.len() > 1 {
        let args: Vec<T> = delta
            .iter()
            .map(|g| match g {
                GroupElement::Su2(z1, _) => carg(*z1),
                _ => unreachable!(),
            })
            .collect();
        let tp = T::two_pi();
        let mut total = T::zero();
        for k in 0..args.len() {
            let mut step = args[(k + 1) % args.len()] - args[k];
            step -= tp * ((step + T::pi()) / tp).floor();
            total += step;
        }
        Some(total / tp)
    } else {
        None
    };
    Ok(Straightening {
        points: grid.to_vec(),
        zeta,
        delta,
        rho,
        max_off_diagonal: off,
        min_conditioning: cond,
        winding,
        max_diagnostic: here.max_diagnostic().max(there.max_diagnostic()),
        n_used: n.max(1),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Obstruction {
    /// `∫M_φ ⊥ 𝔤^Ad` with nonzero degree.
    NotUniquelyErgodicA,
    /// Connected group with trivial centre of the Lie algebra.
    NotUniquelyErgodicB,
    /// (a) or (b) together with a uniquely ergodic base.
    NotErgodicC,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Obstruction::NotUniquelyErgodicA => "NOT_UNIQUELY_ERGODIC(a)",
            Obstruction::NotUniquelyErgodicB => "NOT_UNIQUELY_ERGODIC(b)",
            Obstruction::NotErgodicC => "NOT_ERGODIC(c)",
        })
    }
}

/// Every obstruction that fires, with a justification line each. These are
/// obstruction reports, never ergodicity certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErgodicityVerdict {
    pub obstructions: Vec<Obstruction>,
    pub justification: Vec<String>,
}

impl ErgodicityVerdict {
    pub fn fires(&self, o: Obstruction) -> bool {
        self.obstructions.contains(&o)
    }

    /// Strongest obstruction, or `NO_OBSTRUCTION`.
    pub fn headline(&self) -> String {
        self.obstructions.iter().max().map_or_else(|| "NO_OBSTRUCTION".to_string(), |o| o.to_string())
    }

    pub fn labels(&self) -> Vec<String> {
        if self.obstructions.is_empty() {
            vec!["NO_OBSTRUCTION".to_string()]
        } else {
            self.obstructions.iter().map(|o| o.to_string()).collect()
        }
    }
}

pub fn ergodicity_verdict<T: Real>(tag: GroupTag, integral_m: &AlgebraElement<T>, degree_nonzero: bool, base_uniquely_ergodic: bool) -> Result<ErgodicityVerdict> {
    check_tags(tag, integral_m.tag())?;
    let mut v = ErgodicityVerdict { obstructions: Vec::new(), justification: Vec::new() };
    if !degree_nonzero {
        v.justification.push("degree vanishes on the sample; no obstruction applies".into());
        return Ok(v);
    }
    let center = p_ad(integral_m).norm();
    if center <= lit(CENTER_TOL) {
        v.obstructions.push(Obstruction::NotUniquelyErgodicA);
        v.justification.push(format!("nonzero degree and |P_Ad(int M)| = {:.3e} <= {CENTER_TOL:e}", to_f64(center)));
    }
    if tag.is_semisimple() {
        v.obstructions.push(Obstruction::NotUniquelyErgodicB);
        v.justification.push(format!("nonzero degree and {tag} is connected with trivial centre"));
    }
    if !v.obstructions.is_empty() && base_uniquely_ergodic {
        v.obstructions.push(Obstruction::NotErgodicC);
        v.justification.push("base translation is uniquely ergodic".into());
    }
    if v.obstructions.is_empty() {
        v.justification.push(format!("|P_Ad(int M)| = {:.3e} and {tag} has a nontrivial centre", to_f64(center)));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepDegreeData {
    pub label: String,
    pub eigenvalues: Vec<f64>,
    pub a_phi_pi: f64,
    pub kernel_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeReport<T: Real> {
    pub group: GroupTag,
    pub m_star: Option<AlgebraElement<T>>,
    pub per_rep: Vec<RepDegreeData>,
    pub verdict: ErgodicityVerdict,
    /// Which closed form justified `m_star` (or why there is none).
    pub provenance: String,
    pub n_used: usize,
    pub diagnostics: Vec<(String, f64)>,
}

/// Per-representation data from a constant degree, or the grid surrogate
/// of `a_{φ,π}` from a varying field.
pub fn rep_degree_data<T: Real>(rep: &Representation<T>, m_star: Option<&AlgebraElement<T>>, field: Option<&DegreeField<T>>) -> Result<RepDegreeData> {
    let label = rep.label().to_string();
    if let Some(m) = m_star {
        let split = kernel_split(&hermitian_degree(rep, m)?)?;
        let a = a_phi_pi(rep, std::slice::from_ref(m))?;
        return Ok(RepDegreeData {
            label,
            eigenvalues: split.eigenvalues.iter().map(|v| to_f64(*v)).collect(),
            a_phi_pi: to_f64(a),
            kernel_indices: split.kernel,
        });
    }
    let a = match field {
        Some(f) => a_phi_pi(rep, &f.values)?,
        None => T::zero(),
    };
    Ok(RepDegreeData { label, eigenvalues: Vec::new(), a_phi_pi: to_f64(a), kernel_indices: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::su2_generator;
    use crate::scalar::cis;
    use std::f64::consts::PI;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn constant_cocycle_has_zero_degree() {
        let flow = TranslationFlow::<f64>::default_for_dim(1);
        let g = GroupElement::Su2(cis(0.3) * 0.6, c(0.8, 0.0));
        let est = degree_pointwise(&Cocycle::constant(g), &flow, &BasePoint::new(vec![0.2]), 100);
        assert_eq!(est.value.norm(), 0.0);
    }

    #[test]
    fn anzai_degree() {
        let flow = TranslationFlow::new(vec![golden()]);
        let c1 = Cocycle::torus_monomial(&flow, vec![vec![2]]).unwrap();
        let est = degree_pointwise(&c1, &flow, &BasePoint::new(vec![0.4]), 1000);
        let AlgebraElement::Torus(s) = est.value else { unreachable!() };
        assert!((s[0] - 4.0 * PI * golden()).abs() < 1e-12);
        let q = QuadratureSpec::new(16);
        let AlgebraElement::Torus(s) = degree_constant_diagonal(&c1, &q, 1) else { unreachable!() };
        assert!((s[0] - 4.0 * PI * golden()).abs() < 1e-13);
    }

    #[test]
    fn ergodic_form_on_su2_is_zero() {
        let flow = TranslationFlow::new(vec![golden()]);
        let c1 = Cocycle::su2_diagonal(&flow, 0, 1).unwrap();
        let z = degree_constant_ergodic(&c1, &QuadratureSpec::new(8), 1);
        assert_eq!(z, AlgebraElement::zero(GroupTag::Su2));
        let diag = degree_constant_diagonal(&c1, &QuadratureSpec::new(8), 1);
        assert!((diag - AlgebraElement::su2_diag(2.0 * PI * golden())).norm() < 1e-13);
    }

    #[test]
    fn a_phi_pi_examples() {
        let rho: f64 = 0.7;
        let d = AlgebraElement::su2_diag(rho);
        assert!(a_phi_pi(&Representation::su2(2), std::slice::from_ref(&d)).unwrap().abs() < 1e-24);
        assert!((a_phi_pi(&Representation::su2(1), &[d]).unwrap() - rho * rho).abs() < 1e-14);
        assert_eq!(a_phi_pi(&Representation::<f64>::su2(3), &[AlgebraElement::zero(GroupTag::Su2)]).unwrap(), 0.0);
    }

    #[test]
    fn transfer_zeta_branches() {
        let rho = 1.3;
        let z = su2_transfer_zeta(&AlgebraElement::su2_diag(rho), rho).unwrap();
        assert_eq!(z, GroupElement::identity(GroupTag::Su2));
        let z = su2_transfer_zeta(&AlgebraElement::su2_diag(-rho), rho).unwrap();
        assert_eq!(z, GroupElement::Su2(c(0.0, 0.0), c(-1.0, 0.0)));
        assert_eq!(z.to_matrix()[(0, 1)], c(-1.0, 0.0));
        assert_eq!(z.to_matrix()[(1, 0)], c(1.0, 0.0));
        assert!(matches!(su2_transfer_zeta(&AlgebraElement::su2_diag(1.0), rho), Err(LieError::InconsistentDegree { .. })));
    }

    #[test]
    fn transfer_zeta_generic_branch() {
        let rho = 0.9;
        for (x, y, w) in [(0.3, -0.5, 0.2), (-0.7, 0.1, -0.6), (0.0, 0.0, -0.5)] {
            let raw = AlgebraElement::from_coords(GroupTag::Su2, &[x, y, w]);
            let d = raw.scale(rho / raw.norm());
            let z = su2_transfer_zeta(&d, rho).unwrap();
            let moved = ad(&z, &d).unwrap();
            assert!((moved - AlgebraElement::su2_diag(rho)).norm() < 1e-12);
        }
        let _ = su2_generator::<f64>(0);
    }

    #[test]
    fn verdicts() {
        let z = AlgebraElement::su2_diag(1.0);
        let v = ergodicity_verdict(GroupTag::Su2, &z, true, false).unwrap();
        assert!(v.fires(Obstruction::NotUniquelyErgodicB));
        let v = ergodicity_verdict(GroupTag::Torus(1), &AlgebraElement::Torus(vec![1.0]), true, true).unwrap();
        assert_eq!(v.headline(), "NO_OBSTRUCTION");
        let traceless = AlgebraElement::su2_diag(1.0).su2_as_u2().unwrap();
        let v = ergodicity_verdict(GroupTag::U2, &traceless, true, false).unwrap();
        assert_eq!(v.obstructions, vec![Obstruction::NotUniquelyErgodicA]);
        let v = ergodicity_verdict(GroupTag::U2, &traceless, true, true).unwrap();
        assert_eq!(v.headline(), "NOT_ERGODIC(c)");
    }
}
