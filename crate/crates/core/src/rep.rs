//! Irreducible unitary representations of the four groups.
//!
//! Matrices are computed in an orthonormal basis. For SU(2) and U(2) the
//! monomial basis `p_j(ω) = ω1^j ω2^{ℓ-j}` of homogeneous polynomials has
//! `‖p_j‖² = j!(ℓ-j)!`; matrix elements `⟨π(g) p_k, p_j⟩` in that basis are
//! exposed through [`Convention::Monomial`] and [`monomial_element`].

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_tags, LieError, Result};
use crate::group::{double_cover, exp_alg, haar_sample, AlgebraElement, GroupElement, GroupTag, RngHandle};
use crate::scalar::{binomial, c, cabs, cis, cone, cpowi, csqrt, czero, factorial, lit, powi, Real};

/// Largest SU(2)/U(2)/SO(3) weight `ℓ` supported.
pub const MAX_L: u32 = 12;

/// Finite-difference step for differentials along non-diagonal directions.
pub const FD_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RepLabel {
    Torus(Vec<i64>),
    Su2(u32),
    So3(u32),
    U2(u32, i64),
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepLabel::Torus(q) => {
                let parts: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                write!(f, "q=({})", parts.join(","))
            }
            RepLabel::Su2(l) => write!(f, "SU2 l={l}"),
            RepLabel::So3(l) => write!(f, "SO3 l={l}"),
            RepLabel::U2(l, m) => write!(f, "U2 (l,m)=({l},{m})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Orthonormal,
    Monomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepMatrix<T: Real> {
    pub matrix: DMatrix<Complex<T>>,
    pub convention: Convention,
}

#[derive(Clone, Debug)]
pub struct Representation<T: Real> {
    tag: GroupTag,
    label: RepLabel,
    dim: usize,
    /// `sqrt(j!(ℓ-j)!)` per basis index (all ones for torus and SO(3)).
    basis_norms: Vec<T>,
    /// Images of the orthonormal algebra basis under the differential.
    generators: Vec<DMatrix<Complex<T>>>,
}

fn max_abs<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

impl<T: Real> Representation<T> {
    pub fn new(tag: GroupTag, label: RepLabel) -> Result<Self> {
        let dim = match (&tag, &label) {
            (GroupTag::Torus(d), RepLabel::Torus(q)) if q.len() == *d => 1,
            (GroupTag::Su2, RepLabel::Su2(l)) | (GroupTag::U2, RepLabel::U2(l, _)) if *l <= MAX_L => *l as usize + 1,
            (GroupTag::So3, RepLabel::So3(l)) if *l <= MAX_L => 2 * *l as usize + 1,
            _ => return Err(LieError::InvalidArgument(format!("label {label} does not fit group {tag}"))),
        };
        let basis_norms = match label {
            RepLabel::Su2(l) | RepLabel::U2(l, _) => {
                (0..=l).map(|j| (factorial::<T>(j) * factorial::<T>(l - j)).sqrt()).collect()
            }
            _ => vec![T::one(); dim],
        };
        let mut rep = Self { tag, label, dim, basis_norms, generators: Vec::new() };
        rep.generators = AlgebraElement::basis(tag).iter().enumerate().map(|(k, b)| rep.generator(k, b)).collect();
        Ok(rep)
    }

    pub fn torus(q: Vec<i64>) -> Self {
        let d = q.len();
        Self::new(GroupTag::Torus(d), RepLabel::Torus(q)).expect("torus label")
    }

    pub fn su2(l: u32) -> Self {
        Self::new(GroupTag::Su2, RepLabel::Su2(l)).expect("l within range")
    }

    pub fn so3(l: u32) -> Self {
        Self::new(GroupTag::So3, RepLabel::So3(l)).expect("l within range")
    }

    pub fn u2(l: u32, m: i64) -> Self {
        Self::new(GroupTag::U2, RepLabel::U2(l, m)).expect("l within range")
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn label(&self) -> &RepLabel {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bound on the frequency growth of `π∘φ` relative to that of `φ`: the
    /// matrix entries of `π(g)` are polynomials of this degree in the
    /// entries of `g` and their conjugates.
    pub fn degree_factor(&self) -> u32 {
        match &self.label {
            RepLabel::Torus(q) => q.iter().map(|x| x.unsigned_abs() as u32).sum(),
            RepLabel::Su2(l) | RepLabel::So3(l) => *l,
            RepLabel::U2(l, m) => 2 * *l + (2 * *m - *l as i64).unsigned_abs() as u32,
        }
    }

    /// Differential of one basis direction: closed form on the diagonal
    /// subalgebra, Richardson-extrapolated central differences otherwise.
    fn generator(&self, k: usize, b: &AlgebraElement<T>) -> DMatrix<Complex<T>> {
        let d = self.dim;
        let i = |x: T| c(T::zero(), x);
        let diag = |f: &dyn Fn(usize) -> T| DMatrix::from_fn(d, d, |r, s| if r == s { i(f(r)) } else { czero() });
        match (&self.label, k) {
            (RepLabel::Torus(q), _) => diag(&|_| T::from_i64(q[k]).unwrap()),
            (RepLabel::Su2(l), 2) | (RepLabel::U2(l, _), 2) => {
                let l = *l as i64;
                diag(&|j| T::from_i64(2 * j as i64 - l).unwrap())
            }
            (RepLabel::U2(l, m), 3) => {
                let w = 2 * *m - *l as i64;
                diag(&|_| T::from_i64(w).unwrap())
            }
            (RepLabel::So3(l), 2) => {
                let l = *l as i64;
                diag(&|r| T::from_i64(r as i64 - l).unwrap())
            }
            _ => self.finite_difference(b),
        }
    }

    fn finite_difference(&self, z: &AlgebraElement<T>) -> DMatrix<Complex<T>> {
        let f = |t: T| self.eval_ortho(&exp_alg(z, t));
        let central = |h: T| {
            let two: T = lit(2.0);
            let a = f(h) - f(-h);
            let b = f(two * h) - f(-two * h);
            (a * c(lit(8.0), T::zero()) - b) / c(lit::<T>(12.0) * h, T::zero())
        };
        let h: T = lit(FD_STEP);
        let coarse = central(h);
        let fine = central(h * lit(0.5));
        let r = (fine * c(lit(16.0), T::zero()) - coarse) / c(lit(15.0), T::zero());
        (&r - r.adjoint()) * c(lit(0.5), T::zero())
    }

    /// Orthonormal-convention matrix `π(g)`.
    pub fn eval(&self, g: &GroupElement<T>) -> Result<RepMatrix<T>> {
        check_tags(self.tag, g.tag())?;
        Ok(RepMatrix { matrix: self.eval_ortho(g), convention: Convention::Orthonormal })
    }

    pub(crate) fn eval_ortho(&self, g: &GroupElement<T>) -> DMatrix<Complex<T>> {
        match (&self.label, g) {
            (RepLabel::Torus(q), GroupElement::Torus(y)) => {
                let v = q.iter().zip(y).fold(cone(), |acc, (qi, yi)| acc * cpowi(*yi, *qi));
                DMatrix::from_element(1, 1, v)
            }
            (RepLabel::Su2(l), GroupElement::Su2(z1, z2)) => self.su2_ortho(*l, *z1, *z2),
            (RepLabel::U2(l, m), GroupElement::U2(u)) => {
                let z = csqrt(u.determinant());
                let s = u / z;
                let w = cpowi(z, 2 * *m - *l as i64);
                self.su2_ortho(*l, s[(0, 0)], s[(0, 1)]) * w
            }
            (RepLabel::So3(l), GroupElement::So3(_)) => {
                let (a, b, g) = g.so3_euler().expect("SO3");
                wigner(*l, a, b, g)
            }
            _ => panic!("representation {} evaluated on {}", self.label, g.tag()),
        }
    }

    /// Operator matrix in the monomial basis `p_j` (neither unitary nor
    /// Gram-weighted): `π(g) p_k = Σ_j c_{jk} p_j`.
    fn su2_monomial(&self, l: u32, z1: Complex<T>, z2: Complex<T>) -> DMatrix<Complex<T>> {
        let n = l as usize;
        let pw = |z: Complex<T>| {
            let mut v: Vec<Complex<T>> = Vec::with_capacity(n + 1);
            let mut acc: Complex<T> = cone();
            for _ in 0..=n {
                v.push(acc);
                acc *= z;
            }
            v
        };
        let (p1, p1c, p2, p2m) = (pw(z1), pw(z1.conj()), pw(z2), pw(-z2.conj()));
        DMatrix::from_fn(n + 1, n + 1, |j, k| {
            let mut s: Complex<T> = czero();
            for m in 0..=k.min(j) {
                let nn = j - m;
                if nn > n - k {
                    continue;
                }
                let coef = binomial::<T>(k as u32, m as u32) * binomial::<T>((n - k) as u32, nn as u32);
                s += p1[m] * p1c[n - k - nn] * p2[nn] * p2m[k - m] * coef;
            }
            s
        })
    }

    fn su2_ortho(&self, l: u32, z1: Complex<T>, z2: Complex<T>) -> DMatrix<Complex<T>> {
        let mut m = self.su2_monomial(l, z1, z2);
        for j in 0..m.nrows() {
            for k in 0..m.ncols() {
                m[(j, k)] *= self.basis_norms[j] / self.basis_norms[k];
            }
        }
        m
    }

    /// `sqrt(j!(ℓ-j)! k!(ℓ-k)!)`, the factor between the two conventions.
    pub fn monomial_scale(&self, j: usize, k: usize) -> T {
        self.basis_norms[j] * self.basis_norms[k]
    }

    pub fn to_convention(&self, m: &RepMatrix<T>, conv: Convention) -> RepMatrix<T> {
        if m.convention == conv {
            return m.clone();
        }
        let d = self.dim;
        let matrix = DMatrix::from_fn(d, d, |j, k| {
            let s = self.monomial_scale(j, k);
            match conv {
                Convention::Monomial => m.matrix[(j, k)] * s,
                Convention::Orthonormal => m.matrix[(j, k)] / s,
            }
        });
        RepMatrix { matrix, convention: conv }
    }

    /// `(dπ)(Z)` in the orthonormal convention; linear in `Z` by construction.
    pub fn differential(&self, z: &AlgebraElement<T>) -> Result<RepMatrix<T>> {
        check_tags(self.tag, z.tag())?;
        Ok(RepMatrix { matrix: self.differential_raw(z), convention: Convention::Orthonormal })
    }

    pub(crate) fn differential_raw(&self, z: &AlgebraElement<T>) -> DMatrix<Complex<T>> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for (x, g) in z.coords().iter().zip(&self.generators) {
            if *x != T::zero() {
                acc += g * c(*x, T::zero());
            }
        }
        acc
    }

    /// Character `Tr π(g)`.
    pub fn character(&self, g: &GroupElement<T>) -> Result<Complex<T>> {
        Ok(self.eval(g)?.matrix.trace())
    }
}

/// SO(3) matrix elements from Euler angles, rows/columns indexed by
/// `j, k ∈ {-ℓ..ℓ}` stored at `j + ℓ`. Terms with a negative factorial
/// argument are skipped.
fn wigner<T: Real>(l: u32, alpha: T, beta: T, gamma: T) -> DMatrix<Complex<T>> {
    let li = l as i64;
    let n = 2 * l as usize + 1;
    let half: T = lit(0.5);
    let (sb, cb) = (beta * half).sin_cos();
    let fact = |x: i64| factorial::<T>(x as u32);
    DMatrix::from_fn(n, n, |r, s| {
        let j = r as i64 - li;
        let k = s as i64 - li;
        let pref = (fact(li + k) * fact(li - k) * fact(li + j) * fact(li - j)).sqrt();
        let mut sum = T::zero();
        for m in 0..=(2 * li + 1) {
            let args = [li - j - m, li + k - m, m, m + j - k];
            if args.iter().any(|&a| a < 0) {
                continue;
            }
            let den = fact(args[0]) * fact(args[1]) * fact(args[2]) * fact(args[3]);
            let sign = if m % 2 == 0 { T::one() } else { -T::one() };
            let pc = (2 * li + k - j - 2 * m) as u32;
            let ps = (2 * m + j - k) as u32;
            sum += sign * pref / den * powi(cb, pc) * powi(sb, ps);
        }
        cis(T::from_i64(j).unwrap() * alpha + T::from_i64(k).unwrap() * gamma) * sum
    })
}

/// `π(g)` in the orthonormal convention.
pub fn rep_eval<T: Real>(rep: &Representation<T>, g: &GroupElement<T>) -> Result<RepMatrix<T>> {
    rep.eval(g)
}

/// `(dπ)(Z)` in the orthonormal convention.
pub fn rep_differential<T: Real>(rep: &Representation<T>, z: &AlgebraElement<T>) -> Result<RepMatrix<T>> {
    rep.differential(z)
}

/// Matrix element `⟨π(g) p_k, p_j⟩` in the unnormalized monomial basis for
/// SU(2) and U(2); the orthonormal element for the torus and SO(3).
pub fn monomial_element<T: Real>(rep: &Representation<T>, j: usize, k: usize, g: &GroupElement<T>) -> Result<Complex<T>> {
    check_tags(rep.tag, g.tag())?;
    let d = rep.dim;
    if j >= d || k >= d {
        return Err(LieError::IndexOutOfRange { j, k, dim: d });
    }
    let (l, z1, z2, w) = match (&rep.label, g) {
        (RepLabel::Su2(l), GroupElement::Su2(z1, z2)) => (*l, *z1, *z2, cone()),
        (RepLabel::U2(l, m), GroupElement::U2(u)) => {
            let z = csqrt(u.determinant());
            let s = u / z;
            (*l, s[(0, 0)], s[(0, 1)], cpowi(z, 2 * *m - *l as i64))
        }
        _ => return Ok(rep.eval_ortho(g)[(j, k)]),
    };
    let mono = rep.su2_monomial(l, z1, z2);
    Ok(mono[(j, k)] * w * (rep.basis_norms[j] * rep.basis_norms[j]))
}

/// Integration rule used by [`peter_weyl_check`].
#[derive(Clone, Debug)]
pub enum HaarRule {
    /// Product rule: Gauss–Legendre in `cos β` times equispaced phases
    /// (for U(2) one more equispaced circle factor). Exact for matrix
    /// elements of weight below the node count.
    Quadrature { nodes: usize },
    MonteCarlo { samples: usize, rng: RngHandle },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityReport {
    /// `max |⟨π_jk, π_j'k'⟩ - δδ/d|`.
    pub max_deviation: f64,
    /// Quadrature: difference from the half-resolution rule. Monte Carlo:
    /// largest standard error.
    pub error_estimate: f64,
    /// Monte Carlo only: largest deviation measured in standard errors.
    pub max_sigma_ratio: Option<f64>,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nf = T::from_usize(n).unwrap();
    for i in 0..n.div_ceil(2) {
        let mut z = (T::pi() * (T::from_usize(i).unwrap() + lit(0.75)) / (nf + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), z);
            for k in 2..=n {
                let kf = T::from_usize(k).unwrap();
                let p2 = ((kf * lit(2.0) - T::one()) * z * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = T::one();
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - T::one());
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < lit(1e-16) {
                break;
            }
        }
        let wi: T = lit::<T>(2.0) / ((T::one() - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn su2_node<T: Real>(u: T, xi1: T, xi2: T) -> GroupElement<T> {
    let half: T = lit(0.5);
    let a = ((T::one() + u) * half).max(T::zero()).sqrt();
    let b = ((T::one() - u) * half).max(T::zero()).sqrt();
    GroupElement::Su2(cis(xi1) * a, cis(xi2) * b)
}

/// Weighted Haar nodes for the product rule with `n` points per factor.
fn haar_nodes<T: Real>(tag: GroupTag, n: usize) -> Vec<(T, GroupElement<T>)> {
    let nf = T::from_usize(n).unwrap();
    let phase = |i: usize| T::two_pi() * T::from_usize(i).unwrap() / nf;
    let (u, wu) = gauss_legendre::<T>(n);
    let half: T = lit(0.5);
    let mut out = Vec::new();
    match tag {
        GroupTag::Torus(d) => {
            let total = n.pow(d as u32);
            let w = T::one() / T::from_usize(total).unwrap();
            for idx in 0..total {
                let mut rem = idx;
                let y = (0..d)
                    .map(|_| {
                        let i = rem % n;
                        rem /= n;
                        cis(phase(i))
                    })
                    .collect();
                out.push((w, GroupElement::Torus(y)));
            }
        }
        GroupTag::Su2 | GroupTag::So3 | GroupTag::U2 => {
            let circle = if tag == GroupTag::U2 { n } else { 1 };
            for (ui, wi) in u.iter().zip(&wu) {
                for a in 0..n {
                    for b in 0..n {
                        let g = su2_node(*ui, phase(a), phase(b));
                        for z in 0..circle {
                            let w = *wi * half / (nf * nf * T::from_usize(circle).unwrap());
                            let e = match tag {
                                GroupTag::Su2 => g.clone(),
                                GroupTag::So3 => double_cover(&g).expect("SU2"),
                                _ => GroupElement::U2(g.matrix2().unwrap() * cis(phase(z))),
                            };
                            out.push((w, e));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Gram matrix `G[(jk),(j'k')] = Σ w conj(π_jk) π_j'k'` over weighted nodes.
fn gram<T: Real>(rep: &Representation<T>, nodes: &[(T, GroupElement<T>)]) -> DMatrix<Complex<T>> {
    let d2 = rep.dim * rep.dim;
    nodes
        .par_chunks(1024)
        .map(|chunk| {
            let mut acc = DMatrix::<Complex<T>>::zeros(d2, d2);
            for (w, g) in chunk {
                let m = rep.eval_ortho(g);
                let v: Vec<Complex<T>> = m.iter().copied().collect();
                for (a, va) in v.iter().enumerate() {
                    let cw = va.conj() * *w;
                    for (b, vb) in v.iter().enumerate() {
                        acc[(a, b)] += cw * *vb;
                    }
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(DMatrix::zeros(d2, d2), |a, b| a + b)
}

fn deviation<T: Real>(g: &DMatrix<Complex<T>>, dim: usize) -> f64 {
    let inv = T::one() / T::from_usize(dim).unwrap();
    let mut worst = T::zero();
    for a in 0..g.nrows() {
        for b in 0..g.ncols() {
            let want = if a == b { c(inv, T::zero()) } else { czero() };
            worst = worst.max(cabs(g[(a, b)] - want));
        }
    }
    worst.to_subset().unwrap_or(f64::NAN)
}

/// Peter–Weyl orthogonality `⟨π_jk, π_j'k'⟩ = δ_jj' δ_kk' / d_π`.
pub fn peter_weyl_check<T: Real>(rep: &Representation<T>, rule: &HaarRule) -> OrthogonalityReport {
    match rule {
        HaarRule::Quadrature { nodes } => {
            let fine = haar_nodes(rep.tag, *nodes);
            let coarse = haar_nodes(rep.tag, (*nodes / 2).max(1));
            let gf = gram(rep, &fine);
            let gc = gram(rep, &coarse);
            OrthogonalityReport {
                max_deviation: deviation(&gf, rep.dim),
                error_estimate: max_abs(&(gf - gc)).to_subset().unwrap_or(f64::NAN),
                max_sigma_ratio: None,
                evaluations: fine.len() + coarse.len(),
            }
        }
        HaarRule::MonteCarlo { samples, rng } => {
            let mut r = rng.rng();
            let m = (*samples).max(2);
            let d2 = rep.dim * rep.dim;
            let mut sum = DMatrix::<Complex<T>>::zeros(d2, d2);
            let mut sq = DMatrix::<T>::zeros(d2, d2);
            for _ in 0..m {
                let g = haar_sample::<T, _>(rep.tag, &mut r);
                let v: Vec<Complex<T>> = rep.eval_ortho(&g).iter().copied().collect();
                for a in 0..d2 {
                    for b in 0..d2 {
                        let f = v[a].conj() * v[b];
                        sum[(a, b)] += f;
                        sq[(a, b)] += f.norm_sqr();
                    }
                }
            }
            let mf = T::from_usize(m).unwrap();
            let mean = sum / c(mf, T::zero());
            let inv = T::one() / T::from_usize(rep.dim).unwrap();
            let mut worst_sigma = T::zero();
            let mut worst_ratio = T::zero();
            for a in 0..d2 {
                for b in 0..d2 {
                    let var = (sq[(a, b)] / mf - mean[(a, b)].norm_sqr()).max(T::zero());
                    let sigma = (var / (mf - T::one())).sqrt();
                    worst_sigma = worst_sigma.max(sigma);
                    let want = if a == b { c(inv, T::zero()) } else { czero() };
                    let dev = cabs(mean[(a, b)] - want);
                    if sigma > lit(1e-300) {
                        worst_ratio = worst_ratio.max(dev / sigma);
                    } else if dev > lit(1e-12) {
                        worst_ratio = T::max_value().unwrap_or(lit(1e300));
                    }
                }
            }
            OrthogonalityReport {
                max_deviation: deviation(&mean, rep.dim),
                error_estimate: worst_sigma.to_subset().unwrap_or(f64::NAN),
                max_sigma_ratio: Some(worst_ratio.to_subset().unwrap_or(f64::NAN)),
                evaluations: m,
            }
        }
    }
}

/// Largest homomorphism and unitarity defects over `pairs` Haar pairs.
pub fn homomorphism_defects<T: Real, R: Rng + ?Sized>(rep: &Representation<T>, pairs: usize, rng: &mut R) -> (T, T) {
    let mut hom = T::zero();
    let mut unit = T::zero();
    let id = DMatrix::<Complex<T>>::identity(rep.dim, rep.dim);
    for _ in 0..pairs {
        let g = haar_sample::<T, _>(rep.tag, rng);
        let h = haar_sample::<T, _>(rep.tag, rng);
        let pg = rep.eval_ortho(&g);
        let ph = rep.eval_ortho(&h);
        let pgh = rep.eval_ortho(&(&g * &h));
        hom = hom.max(max_abs(&(pgh - &pg * &ph)));
        unit = unit.max(max_abs(&(pg.adjoint() * &pg - &id)));
    }
    (hom, unit)
}
