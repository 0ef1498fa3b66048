//! Translation flows on `T^d`, cocycles over them, cocycle iterates, the
//! transfer operator `W_φ`, skew-product orbits and equispaced quadrature.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{check_tags, LieError, Result};
use crate::group::{ad, exp_alg, AlgebraElement, GroupElement, GroupTag};
use crate::scalar::{c, cis, czero, frac, lit, Real};

/// Point of `T^d` stored as phases in `[0, 1)`; `x_k = e^{2πi·phase_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePoint<T: Real> {
    pub phases: Vec<T>,
}

impl<T: Real> BasePoint<T> {
    pub fn new(phases: Vec<T>) -> Self {
        Self { phases: phases.into_iter().map(frac).collect() }
    }

    pub fn origin(d: usize) -> Self {
        Self { phases: vec![T::zero(); d] }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// `x_k = e^{2πi·phase_k}`.
    pub fn coord(&self, k: usize) -> Complex<T> {
        cis(T::two_pi() * self.phases[k])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationFlow<T: Real> {
    pub alpha: Vec<T>,
}

impl<T: Real> TranslationFlow<T> {
    pub fn new(alpha: Vec<T>) -> Self {
        Self { alpha }
    }

    /// Golden mean `(√5-1)/2` for `d = 1`; `(golden, √2-1)` for `d = 2`;
    /// further coordinates use `√p` fractional parts for successive primes.
    pub fn default_for_dim(d: usize) -> Self {
        let golden = (lit::<T>(5.0).sqrt() - T::one()) * lit(0.5);
        let primes = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
        let alpha = (0..d)
            .map(|k| if k == 0 { golden } else { frac(lit::<T>(primes[(k - 1) % primes.len()]).sqrt()) })
            .collect();
        Self { alpha }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn advance(&self, x: &BasePoint<T>, t: T) -> BasePoint<T> {
        BasePoint { phases: x.phases.iter().zip(&self.alpha).map(|(p, a)| frac(*p + t * *a)).collect() }
    }
}

pub fn flow_advance<T: Real>(flow: &TranslationFlow<T>, x: &BasePoint<T>, t: T) -> BasePoint<T> {
    flow.advance(x, t)
}

/// Real function on the base:
/// `s(θ) = c0 + 2π⟨w, θ⟩ + Σ_t [a_t cos(2π⟨n_t, θ⟩) + b_t sin(2π⟨n_t, θ⟩)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunction<T: Real> {
    pub offset: T,
    pub winding: Vec<T>,
    pub terms: Vec<(Vec<i64>, T, T)>,
}

impl<T: Real> PhaseFunction<T> {
    pub fn constant(d: usize, offset: T) -> Self {
        Self { offset, winding: vec![T::zero(); d], terms: Vec::new() }
    }

    /// `2π k θ_coord`.
    pub fn linear(d: usize, coord: usize, k: T) -> Self {
        let mut winding = vec![T::zero(); d];
        winding[coord] = k;
        Self { offset: T::zero(), winding, terms: Vec::new() }
    }

    pub fn with_offset(mut self, offset: T) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_term(mut self, freq: Vec<i64>, a: T, b: T) -> Self {
        self.terms.push((freq, a, b));
        self
    }

    pub fn eval(&self, x: &BasePoint<T>) -> T {
        let tp = T::two_pi();
        let mut s = self.offset;
        for (w, p) in self.winding.iter().zip(&x.phases) {
            s += tp * *w * *p;
        }
        for (n, a, b) in &self.terms {
            let arg = tp * dot_i(n, &x.phases);
            let (sn, cs) = arg.sin_cos();
            s += *a * cs + *b * sn;
        }
        s
    }

    /// Derivative along the flow, `d/dt s(F_t x)` at `t = 0`.
    pub fn lie_derivative(&self, x: &BasePoint<T>, alpha: &[T]) -> T {
        let tp = T::two_pi();
        let mut s = T::zero();
        for (w, a) in self.winding.iter().zip(alpha) {
            s += tp * *w * *a;
        }
        for (n, a, b) in &self.terms {
            let arg = tp * dot_i(n, &x.phases);
            let rate = tp * dot_i(n, alpha);
            let (sn, cs) = arg.sin_cos();
            s += rate * (*b * cs - *a * sn);
        }
        s
    }

    fn is_linear(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the winding is integral, so that `e^{i s}` is well defined on `T^d`.
    pub fn has_integer_winding(&self) -> bool {
        self.winding.iter().all(|w| (*w - w.round()).abs() <= lit(1e-12))
    }
}

fn dot_i<T: Real>(n: &[i64], v: &[T]) -> T {
    n.iter().zip(v).fold(T::zero(), |acc, (k, x)| acc + T::from_i64(*k).unwrap() * *x)
}

/// Complex trigonometric polynomial `Σ c_n e^{2πi⟨n, θ⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<T: Real> {
    pub dim: usize,
    pub terms: Vec<(Vec<i64>, Complex<T>)>,
}

impl<T: Real> TrigPoly<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, v: Complex<T>) -> Self {
        Self { dim, terms: vec![(vec![0; dim], v)] }
    }

    pub fn monomial(freq: Vec<i64>, v: Complex<T>) -> Self {
        Self { dim: freq.len(), terms: vec![(freq, v)] }
    }

    pub fn plus(mut self, freq: Vec<i64>, v: Complex<T>) -> Self {
        assert_eq!(freq.len(), self.dim);
        self.terms.push((freq, v));
        self
    }

    pub fn eval(&self, x: &BasePoint<T>) -> Complex<T> {
        self.terms
            .iter()
            .fold(czero(), |acc, (n, v)| acc + *v * cis(T::two_pi() * dot_i(n, &x.phases)))
    }

    /// Largest per-dimension frequency.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|(n, _)| n.iter().map(|k| k.unsigned_abs() as u32))
            .max()
            .unwrap_or(0)
    }
}

pub type ValueFn<T> = Arc<dyn Fn(&BasePoint<T>) -> GroupElement<T> + Send + Sync>;
pub type FieldFn<T> = Arc<dyn Fn(&BasePoint<T>) -> AlgebraElement<T> + Send + Sync>;

/// A cocycle `φ: T^d → G` together with its analytic derivative field
/// `M_φ = L_Y φ · φ^{-1}`. The callables must be pure.
#[derive(Clone)]
pub struct Cocycle<T: Real> {
    pub tag: GroupTag,
    pub value: ValueFn<T>,
    pub m_field: FieldFn<T>,
    pub smoothness_note: String,
    /// Per-dimension frequency bound of the matrix entries of `φ` (exact for
    /// trigonometric polynomials, an effective bandwidth otherwise).
    pub frequency_bound: Option<u32>,
}

impl<T: Real> fmt::Debug for Cocycle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cocycle")
            .field("tag", &self.tag)
            .field("smoothness_note", &self.smoothness_note)
            .field("frequency_bound", &self.frequency_bound)
            .finish()
    }
}

impl<T: Real> Cocycle<T> {
    pub fn new(
        tag: GroupTag,
        value: impl Fn(&BasePoint<T>) -> GroupElement<T> + Send + Sync + 'static,
        m_field: impl Fn(&BasePoint<T>) -> AlgebraElement<T> + Send + Sync + 'static,
        smoothness_note: impl Into<String>,
        frequency_bound: Option<u32>,
    ) -> Self {
        Self { tag, value: Arc::new(value), m_field: Arc::new(m_field), smoothness_note: smoothness_note.into(), frequency_bound }
    }

    pub fn constant(g: GroupElement<T>) -> Self {
        let tag = g.tag();
        Self::new(tag, move |_| g.clone(), move |_| AlgebraElement::zero(tag), "constant", Some(0))
    }

    pub fn eval(&self, x: &BasePoint<T>) -> GroupElement<T> {
        (self.value)(x)
    }

    pub fn m(&self, x: &BasePoint<T>) -> AlgebraElement<T> {
        (self.m_field)(x)
    }

    /// `φ(x) = Π_k exp(s_k(x) X_k)` with derivative field
    /// `M = Σ_k s_k' Ad_{exp(s_1 X_1)⋯exp(s_{k-1} X_{k-1})} X_k`.
    pub fn exp_product(tag: GroupTag, flow: &TranslationFlow<T>, factors: Vec<(PhaseFunction<T>, AlgebraElement<T>)>, note: impl Into<String>) -> Result<Self> {
        for (s, x) in &factors {
            check_tags(tag, x.tag())?;
            if s.winding.len() != flow.dim() {
                return Err(LieError::InvalidArgument(format!("phase function of dimension {} over a {}-dimensional base", s.winding.len(), flow.dim())));
            }
        }
        let mut bound = 0u32;
        for (s, x) in &factors {
            let rho = spectral_radius(x);
            let mut per_dim = 0u32;
            for cidx in 0..flow.dim() {
                let lin = (s.winding[cidx].abs() * rho).ceil().to_subset().unwrap_or(0.0) as u32;
                let trig: u32 = s
                    .terms
                    .iter()
                    .map(|(n, a, b)| {
                        let amp = ((a.abs() + b.abs()) * rho).ceil().to_subset().unwrap_or(0.0) as u32;
                        n[cidx].unsigned_abs() as u32 * (amp + 16)
                    })
                    .sum();
                per_dim = per_dim.max(lin + trig);
            }
            bound += per_dim;
        }
        let exact = factors.iter().all(|(s, _)| s.is_linear());
        let f_val = factors.clone();
        let f_m = factors;
        let alpha = flow.alpha.clone();
        let value = move |x: &BasePoint<T>| {
            let mut g = GroupElement::identity(tag);
            for (s, dir) in &f_val {
                g = &g * &exp_alg(dir, s.eval(x));
            }
            g
        };
        let m_field = move |x: &BasePoint<T>| {
            let mut prefix = GroupElement::identity(tag);
            let mut acc = AlgebraElement::zero(tag);
            for (s, dir) in &f_m {
                let rate = s.lie_derivative(x, &alpha);
                acc = acc + ad(&prefix, dir).expect("tag").scale(rate);
                prefix = &prefix * &exp_alg(dir, s.eval(x));
            }
            acc
        };
        let mut note = note.into();
        if !exact {
            note.push_str("; frequency bound is an effective bandwidth");
        }
        Ok(Self::new(tag, value, m_field, note, Some(bound)))
    }

    /// Torus-valued `y_r = Π_c x_c^{K[r][c]}` with `M_r = 2π⟨K_r, α⟩`.
    pub fn torus_monomial(flow: &TranslationFlow<T>, exponents: Vec<Vec<i64>>) -> Result<Self> {
        let dp = exponents.len();
        let tag = GroupTag::Torus(dp);
        let factors = exponents
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let s = PhaseFunction { offset: T::zero(), winding: row.iter().map(|k| T::from_i64(*k).unwrap()).collect(), terms: vec![] };
                (s, AlgebraElement::basis(tag)[r].clone())
            })
            .collect();
        Self::exp_product(tag, flow, factors, "torus character map, analytic")
    }

    /// `diag(x_coord^k, conj x_coord^k)` in SU(2).
    pub fn su2_diagonal(flow: &TranslationFlow<T>, coord: usize, k: i64) -> Result<Self> {
        let s = PhaseFunction::linear(flow.dim(), coord, T::from_i64(k).unwrap());
        Self::exp_product(GroupTag::Su2, flow, vec![(s, AlgebraElement::su2_diag(T::one()))], "diagonal SU2, analytic")
    }

    /// x3-rotation by `offset + 2π k θ_coord`.
    pub fn so3_rotation(flow: &TranslationFlow<T>, coord: usize, k: i64, offset: T) -> Result<Self> {
        let s = PhaseFunction::linear(flow.dim(), coord, T::from_i64(k).unwrap()).with_offset(offset);
        let dir = AlgebraElement::So3(crate::group::so3_generator(2));
        Self::exp_product(GroupTag::So3, flow, vec![(s, dir)], "x3-rotation family, analytic")
    }

    /// `e^{i s_z(x)} · g(x)` in U(2), with `g = Π exp(s_k X_k)` built from
    /// su(2) directions.
    pub fn u2_product(flow: &TranslationFlow<T>, z_phase: PhaseFunction<T>, su2_factors: Vec<(PhaseFunction<T>, AlgebraElement<T>)>) -> Result<Self> {
        let mut factors = vec![(z_phase, AlgebraElement::u2_scalar(T::one()))];
        for (s, x) in su2_factors {
            let x = x.su2_as_u2().ok_or_else(|| LieError::InvalidArgument("U2 product factors must be su(2) directions".into()))?;
            factors.push((s, x));
        }
        Self::exp_product(GroupTag::U2, flow, factors, "U2 product of a circle factor and an SU2 factor, analytic")
    }
}

/// Largest modulus of an eigenvalue of the matrix realization of `X`.
fn spectral_radius<T: Real>(x: &AlgebraElement<T>) -> T {
    match x {
        AlgebraElement::Torus(s) => s.iter().fold(T::zero(), |a, v| a.max(v.abs())),
        AlgebraElement::Su2(_) | AlgebraElement::So3(_) => x.norm(),
        AlgebraElement::U2(m) => {
            let half: T = lit(0.5);
            let mu = (m[(0, 0)].im + m[(1, 1)].im) * half;
            let a = (m[(0, 0)].im - m[(1, 1)].im) * half;
            let w = m[(0, 1)];
            mu.abs() + (a * a + w.norm_sqr()).sqrt()
        }
    }
}

/// `φ^{(n)}(x) = φ(x) φ(F_1 x) ⋯ φ(F_{n-1} x)`; `e` for `n = 0`;
/// `(φ^{(-n)}(F_n x))^{-1}` for `n < 0`.
pub fn cocycle_iterate<T: Real>(c: &Cocycle<T>, flow: &TranslationFlow<T>, x: &BasePoint<T>, n: i64) -> GroupElement<T> {
    if n < 0 {
        let y = flow.advance(x, T::from_i64(n).unwrap());
        return cocycle_iterate(c, flow, &y, -n).inverse();
    }
    let mut g = GroupElement::identity(c.tag);
    for k in 0..n {
        let xk = flow.advance(x, T::from_i64(k).unwrap());
        g = &g * &c.eval(&xk);
    }
    g
}

/// Forward orbit of `(x, e)` under the skew product: yields
/// `(n, F_n x, φ^{(n)}(x))` for `n = 0, 1, 2, …`.
pub struct Orbit<'a, T: Real> {
    cocycle: &'a Cocycle<T>,
    flow: &'a TranslationFlow<T>,
    base: BasePoint<T>,
    n: i64,
    acc: GroupElement<T>,
}

impl<'a, T: Real> Orbit<'a, T> {
    pub fn new(cocycle: &'a Cocycle<T>, flow: &'a TranslationFlow<T>, x: &BasePoint<T>) -> Self {
        Self { cocycle, flow, base: x.clone(), n: 0, acc: GroupElement::identity(cocycle.tag) }
    }
}

impl<T: Real> Iterator for Orbit<'_, T> {
    type Item = (i64, BasePoint<T>, GroupElement<T>);

    fn next(&mut self) -> Option<Self::Item> {
        let xn = self.flow.advance(&self.base, T::from_i64(self.n).unwrap());
        let out = (self.n, xn.clone(), self.acc.clone());
        self.acc = &self.acc * &self.cocycle.eval(&xn);
        self.n += 1;
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MFieldReport<T: Real> {
    pub max_deviation: T,
    pub worst_point: Option<BasePoint<T>>,
}

/// Finite-difference scheme for [`validate_m_field_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DifferenceScheme {
    /// `(φ(F_h x) − φ(F_{−h} x)) / 2h`, error `O(h²)`.
    Central,
    /// Central differences at `h` and `h/2` combined as `(4 D_{h/2} − D_h)/3`,
    /// error `O(h⁴)`.
    Richardson,
}

/// [`validate_m_field_with`] using [`DifferenceScheme::Richardson`].
pub fn validate_m_field<T: Real>(c: &Cocycle<T>, flow: &TranslationFlow<T>, points: &[BasePoint<T>], h: T) -> MFieldReport<T> {
    validate_m_field_with(c, flow, points, h, DifferenceScheme::Richardson)
}

/// Compares `M_φ` with a finite difference of `φ` along the flow times
/// `φ(x)^{-1}`, projected to the Lie algebra.
pub fn validate_m_field_with<T: Real>(
    c: &Cocycle<T>,
    flow: &TranslationFlow<T>,
    points: &[BasePoint<T>],
    h: T,
    scheme: DifferenceScheme,
) -> MFieldReport<T> {
    // Neighbouring values are sign-aligned with φ(x), so that cocycles
    // defined only up to sign (two-valued lifts) are differentiated correctly.
    let aligned = |x: &BasePoint<T>, y: &BasePoint<T>| {
        let center = c.eval(x).to_matrix();
        let v = c.eval(y).to_matrix();
        if matches!(c.tag, GroupTag::Su2 | GroupTag::U2) && center.dotc(&v).re < T::zero() {
            -v
        } else {
            v
        }
    };
    let central = |x: &BasePoint<T>, h: T| {
        let plus = aligned(x, &flow.advance(x, h));
        let minus = aligned(x, &flow.advance(x, -h));
        (plus - minus) / crate::scalar::c(h + h, T::zero())
    };
    let mut worst = T::zero();
    let mut at = None;
    for x in points {
        let deriv = match scheme {
            DifferenceScheme::Central => central(x, h),
            DifferenceScheme::Richardson => {
                let coarse = central(x, h);
                let fine = central(x, h * lit(0.5));
                (fine * crate::scalar::c(lit(4.0), T::zero()) - coarse) / crate::scalar::c(lit(3.0), T::zero())
            }
        };
        let est = AlgebraElement::project_matrix(c.tag, &(deriv * c.eval(x).inverse().to_matrix()));
        let dev = (est - c.m(x)).norm();
        if dev > worst || at.is_none() {
            worst = worst.max(dev);
            at = Some(x.clone());
        }
    }
    MFieldReport { max_deviation: worst, worst_point: at }
}

/// `(W^n f)(x) = Ad_{φ^{(n)}(x)} f(F_n x)`.
pub fn w_apply<T: Real>(
    c: &Cocycle<T>,
    flow: &TranslationFlow<T>,
    f: &dyn Fn(&BasePoint<T>) -> AlgebraElement<T>,
    n: i64,
    x: &BasePoint<T>,
) -> AlgebraElement<T> {
    let g = cocycle_iterate(c, flow, x, n);
    ad(&g, &f(&flow.advance(x, T::from_i64(n).unwrap()))).expect("cocycle and field share a tag")
}

/// `T_φ^n(x, g) = (F_n x, g φ^{(n)}(x))`.
pub fn skew_step<T: Real>(c: &Cocycle<T>, flow: &TranslationFlow<T>, x: &BasePoint<T>, g: &GroupElement<T>, n: i64) -> Result<(BasePoint<T>, GroupElement<T>)> {
    let it = cocycle_iterate(c, flow, x, n);
    Ok((flow.advance(x, T::from_i64(n).unwrap()), g.try_mul(&it)?))
}

/// `φ = ζ^{-1} δ (ζ∘F_1)` with
/// `M_φ = -Ad_{ζ^{-1}}(M_ζ - M_δ - Ad_δ(M_ζ∘F_1))`.
pub fn cohomologous_build<T: Real>(delta: &Cocycle<T>, zeta: &Cocycle<T>, flow: &TranslationFlow<T>) -> Result<Cocycle<T>> {
    check_tags(delta.tag, zeta.tag)?;
    let (dv, zv, fl) = (delta.clone(), zeta.clone(), flow.clone());
    let value = move |x: &BasePoint<T>| {
        let x1 = fl.advance(x, T::one());
        &(&zv.eval(x).inverse() * &dv.eval(x)) * &zv.eval(&x1)
    };
    let (dm, zm, fm) = (delta.clone(), zeta.clone(), flow.clone());
    let m_field = move |x: &BasePoint<T>| {
        let x1 = fm.advance(x, T::one());
        let inner = zm.m(x) - dm.m(x) - ad(&dm.eval(x), &zm.m(&x1)).expect("tag");
        -ad(&zm.eval(x).inverse(), &inner).expect("tag")
    };
    let bound = match (delta.frequency_bound, zeta.frequency_bound) {
        (Some(a), Some(b)) => Some(a + 2 * b),
        _ => None,
    };
    let note = format!("cohomologous to [{}] via [{}]", delta.smoothness_note, zeta.smoothness_note);
    Ok(Cocycle::new(delta.tag, value, m_field, note, bound))
}

/// A cocycle `φ = ζ⁻¹ δ (ζ∘F_1)` together with its diagonal partner `δ` and
/// the transfer function `ζ`.
#[derive(Clone, Debug)]
pub struct ManufacturedPair<T: Real> {
    pub phi: Cocycle<T>,
    pub delta: Cocycle<T>,
    pub zeta: Cocycle<T>,
}

/// `δ = diag(x_0^k, conj x_0^k)` and
/// `ζ = exp(0.5 cos(2πθ_0) E_1) · exp((0.3 sin(2πθ_0) + 0.2 cos(4πθ_0)) E_2)`.
/// The rotation angle of `ζ` stays below π, away from the degenerate
/// branch of the transfer-function formula.
pub fn manufactured_su2<T: Real>(flow: &TranslationFlow<T>, k: i64) -> Result<ManufacturedPair<T>> {
    let d = flow.dim();
    let mut e0 = vec![0i64; d];
    if d == 0 {
        return Err(LieError::InvalidArgument("manufactured pair needs a base of dimension at least 1".into()));
    }
    e0[0] = 1;
    let e0x2: Vec<i64> = e0.iter().map(|v| 2 * v).collect();
    let basis = AlgebraElement::basis(GroupTag::Su2);
    let s1 = PhaseFunction::constant(d, T::zero()).with_term(e0.clone(), lit(0.5), T::zero());
    let s2 = PhaseFunction::constant(d, T::zero()).with_term(e0, T::zero(), lit(0.3)).with_term(e0x2, lit(0.2), T::zero());
    let zeta = Cocycle::exp_product(GroupTag::Su2, flow, vec![(s1, basis[0].clone()), (s2, basis[1].clone())], "trigonometric SU2 transfer function, analytic")?;
    let delta = Cocycle::su2_diagonal(flow, 0, k)?;
    let phi = cohomologous_build(&delta, &zeta, flow)?;
    Ok(ManufacturedPair { phi, delta, zeta })
}

/// Equispaced tensor grid with `nodes` points per dimension, offset to start
/// at phase 0. Exact for trigonometric polynomials of per-dimension degree
/// below `nodes`. Error estimates compare against the sub-grid of even
/// indices (half resolution).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub nodes: usize,
}

/// Chunk size for deterministic reductions (independent of thread count).
pub const REDUCTION_CHUNK: usize = 2048;

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Self {
        Self { nodes: nodes.max(1) }
    }

    /// `2(B + |N| F) + 1` nodes, rounded up to even so that the half grid is
    /// a sub-grid.
    pub fn sized(coeff_degree: u32, n: i64, frequency: u32) -> Self {
        let m = 2 * (coeff_degree as u64 + n.unsigned_abs() * frequency as u64) + 1;
        Self::new((m + (m % 2)) as usize)
    }

    pub fn total(&self, d: usize) -> usize {
        self.nodes.pow(d as u32)
    }

    /// Base point for a flat index, together with whether it belongs to the
    /// half-resolution sub-grid.
    pub fn node<T: Real>(&self, d: usize, idx: usize) -> (BasePoint<T>, bool) {
        let mut rem = idx;
        let mut even = true;
        let m = T::from_usize(self.nodes).unwrap();
        let phases = (0..d)
            .map(|_| {
                let i = rem % self.nodes;
                rem /= self.nodes;
                even &= i.is_multiple_of(2);
                T::from_usize(i).unwrap() / m
            })
            .collect();
        (BasePoint { phases }, even)
    }

    pub fn points<T: Real>(&self, d: usize) -> Vec<BasePoint<T>> {
        (0..self.total(d)).map(|i| self.node(d, i).0).collect()
    }

    /// `(fine, coarse)` averages of `f` over the grid and its half sub-grid.
    pub fn integrate<T: Real>(&self, d: usize, f: impl Fn(&BasePoint<T>) -> Complex<T> + Sync) -> (Complex<T>, Complex<T>) {
        let sums = ordered_reduce(
            self.total(d),
            |range| {
                let mut fine = czero::<T>();
                let mut coarse = czero::<T>();
                for i in range {
                    let (x, even) = self.node::<T>(d, i);
                    let v = f(&x);
                    fine += v;
                    if even {
                        coarse += v;
                    }
                }
                (fine, coarse)
            },
            |a, b| (a.0 + b.0, a.1 + b.1),
        );
        let (fine, coarse) = sums.unwrap_or((czero(), czero()));
        let nf = T::from_usize(self.total(d)).unwrap();
        let half = self.nodes.div_ceil(2);
        let nc = T::from_usize(half.pow(d as u32)).unwrap();
        (fine / c(nf, T::zero()), coarse / c(nc, T::zero()))
    }
}

/// Parallel map over fixed-size index chunks, combined sequentially in
/// chunk order so the result does not depend on scheduling.
pub fn ordered_reduce<A: Send>(
    n: usize,
    chunk: impl Fn(Range<usize>) -> A + Sync,
    combine: impl Fn(A, A) -> A,
) -> Option<A> {
    let starts: Vec<usize> = (0..n).step_by(REDUCTION_CHUNK).collect();
    let parts: Vec<A> = starts.par_iter().map(|&s| chunk(s..(s + REDUCTION_CHUNK).min(n))).collect();
    parts.into_iter().reduce(combine)
}
