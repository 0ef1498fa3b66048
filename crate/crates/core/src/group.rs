//! The four compact groups: torus, SU(2), SO(3) and U(2), their Lie algebras,
//! the adjoint action, the invariant inner product, Haar sampling and the
//! Haar-averaged projection `P_Ad`.
//!
//! SU(2) elements are stored as the pair `(z1, z2)` of the matrix
//! `[[z1, z2], [-conj z2, conj z1]]`. Torus algebra elements store the real
//! coefficients `s_k` of the purely imaginary entries `i s_k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Matrix2, Matrix3};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_tags, Result};
use crate::scalar::{c, cabs, ci, cis, cone, csqrt, czero, lit, Real};

/// Products drifting further than this from the group are re-normalized.
pub const RENORM_THRESHOLD: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupTag {
    Torus(usize),
    Su2,
    So3,
    U2,
}

impl GroupTag {
    /// Size of the matrices realizing the group (torus elements are diagonal).
    pub fn matrix_dim(self) -> usize {
        match self {
            GroupTag::Torus(d) => d,
            GroupTag::Su2 | GroupTag::U2 => 2,
            GroupTag::So3 => 3,
        }
    }

    pub fn algebra_dim(self) -> usize {
        match self {
            GroupTag::Torus(d) => d,
            GroupTag::Su2 | GroupTag::So3 => 3,
            GroupTag::U2 => 4,
        }
    }

    /// Whether the center of the Lie algebra is trivial.
    pub fn is_semisimple(self) -> bool {
        matches!(self, GroupTag::Su2 | GroupTag::So3)
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Torus(d) => write!(f, "TORUS({d})"),
            GroupTag::Su2 => write!(f, "SU2"),
            GroupTag::So3 => write!(f, "SO3"),
            GroupTag::U2 => write!(f, "U2"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement<T: Real> {
    Torus(Vec<Complex<T>>),
    Su2(Complex<T>, Complex<T>),
    So3(Matrix3<T>),
    U2(Matrix2<Complex<T>>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraElement<T: Real> {
    Torus(Vec<T>),
    Su2(Matrix2<Complex<T>>),
    So3(Matrix3<T>),
    U2(Matrix2<Complex<T>>),
}

/// Sign choice resolving the two-valued lift in [`iso_so3_torus_to_u2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

fn su2_matrix<T: Real>(z1: Complex<T>, z2: Complex<T>) -> Matrix2<Complex<T>> {
    Matrix2::new(z1, z2, -z2.conj(), z1.conj())
}

fn adjoint2<T: Real>(m: &Matrix2<Complex<T>>) -> Matrix2<Complex<T>> {
    m.map(|z| z.conj()).transpose()
}

fn max_abs2<T: Real>(m: &Matrix2<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

fn max_abs3<T: Real>(m: &Matrix3<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Generator `L_k` of rotations with `(L_k)_{ij} = ε_{kij}`; `exp(α L_3)` is
/// the x3-rotation `[[cos α, sin α, 0], [-sin α, cos α, 0], [0, 0, 1]]`.
pub fn so3_generator<T: Real>(k: usize) -> Matrix3<T> {
    let o = T::one();
    let z = T::zero();
    match k {
        0 => Matrix3::new(z, z, z, z, z, o, z, -o, z),
        1 => Matrix3::new(z, z, -o, z, z, z, o, z, z),
        2 => Matrix3::new(z, o, z, -o, z, z, z, z, z),
        _ => panic!("so(3) generator index {k} out of range"),
    }
}

/// Orthonormal basis `E_1, E_2, E_3` of su(2): `E_1 = [[0, i], [i, 0]]`,
/// `E_2 = [[0, 1], [-1, 0]]`, `E_3 = diag(i, -i)`.
pub fn su2_generator<T: Real>(k: usize) -> Matrix2<Complex<T>> {
    let z = czero();
    let i = ci();
    let o = cone();
    match k {
        0 => Matrix2::new(z, i, i, z),
        1 => Matrix2::new(z, o, -o, z),
        2 => Matrix2::new(i, z, z, -i),
        _ => panic!("su(2) generator index {k} out of range"),
    }
}

impl<T: Real> GroupElement<T> {
    pub fn identity(tag: GroupTag) -> Self {
        match tag {
            GroupTag::Torus(d) => GroupElement::Torus(vec![cone(); d]),
            GroupTag::Su2 => GroupElement::Su2(cone(), czero()),
            GroupTag::So3 => GroupElement::So3(Matrix3::identity()),
            GroupTag::U2 => GroupElement::U2(Matrix2::identity()),
        }
    }

    pub fn tag(&self) -> GroupTag {
        match self {
            GroupElement::Torus(y) => GroupTag::Torus(y.len()),
            GroupElement::Su2(..) => GroupTag::Su2,
            GroupElement::So3(_) => GroupTag::So3,
            GroupElement::U2(_) => GroupTag::U2,
        }
    }

    /// Torus element from phases in units of full turns.
    pub fn torus_from_phases(phases: &[T]) -> Self {
        GroupElement::Torus(phases.iter().map(|&p| cis(T::two_pi() * p)).collect())
    }

    /// SO(3) element `{α, β, γ} = R3(α) R2(β) R3(γ)`.
    pub fn so3_from_euler(alpha: T, beta: T, gamma: T) -> Self {
        let r3 = |a: T| {
            let (s, co) = a.sin_cos();
            Matrix3::new(co, s, T::zero(), -s, co, T::zero(), T::zero(), T::zero(), T::one())
        };
        let (s, co) = beta.sin_cos();
        let r2 = Matrix3::new(co, T::zero(), -s, T::zero(), T::one(), T::zero(), s, T::zero(), co);
        GroupElement::So3(r3(alpha) * r2 * r3(gamma))
    }

    /// Euler angles `(α, β, γ)` with `β ∈ [0, π]`; at the poles `γ = 0`.
    pub fn so3_euler(&self) -> Option<(T, T, T)> {
        let GroupElement::So3(g) = self else { return None };
        let sb = g[(0, 2)].hypot(g[(1, 2)]);
        let beta = sb.atan2(g[(2, 2)]);
        let eps: T = lit(1e-14);
        if sb <= eps {
            if g[(2, 2)] > T::zero() {
                Some((g[(0, 1)].atan2(g[(0, 0)]), beta, T::zero()))
            } else {
                Some((g[(0, 1)].atan2(-g[(0, 0)]), beta, T::zero()))
            }
        } else {
            let alpha = g[(1, 2)].atan2(-g[(0, 2)]);
            let gamma = g[(2, 1)].atan2(g[(2, 0)]);
            Some((alpha, beta, gamma))
        }
    }

    /// Dense complex matrix; torus elements become diagonal matrices.
    pub fn to_matrix(&self) -> DMatrix<Complex<T>> {
        match self {
            GroupElement::Torus(y) => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(y.clone())),
            GroupElement::Su2(z1, z2) => {
                let m = su2_matrix(*z1, *z2);
                DMatrix::from_iterator(2, 2, m.iter().copied())
            }
            GroupElement::So3(g) => DMatrix::from_iterator(3, 3, g.iter().map(|&x| c(x, T::zero()))),
            GroupElement::U2(u) => DMatrix::from_iterator(2, 2, u.iter().copied()),
        }
    }

    /// 2×2 matrix form for SU(2) and U(2) elements.
    pub fn matrix2(&self) -> Option<Matrix2<Complex<T>>> {
        match self {
            GroupElement::Su2(z1, z2) => Some(su2_matrix(*z1, *z2)),
            GroupElement::U2(u) => Some(*u),
            _ => None,
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_tags(self.tag(), other.tag())?;
        let out = match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) => {
                GroupElement::Torus(a.iter().zip(b).map(|(x, y)| *x * *y).collect())
            }
            (GroupElement::Su2(a, b), GroupElement::Su2(cc, d)) => {
                GroupElement::Su2(*a * *cc - *b * d.conj(), *a * *d + *b * cc.conj())
            }
            (GroupElement::So3(g), GroupElement::So3(h)) => GroupElement::So3(g * h),
            (GroupElement::U2(g), GroupElement::U2(h)) => GroupElement::U2(g * h),
            _ => unreachable!(),
        };
        Ok(out.renormalized())
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::Torus(y) => GroupElement::Torus(y.iter().map(|z| z.conj()).collect()),
            GroupElement::Su2(z1, z2) => GroupElement::Su2(z1.conj(), -*z2),
            GroupElement::So3(g) => GroupElement::So3(g.transpose()),
            GroupElement::U2(u) => GroupElement::U2(adjoint2(u)),
        }
    }

    /// Largest deviation from the defining constraints of the group.
    pub fn drift(&self) -> T {
        match self {
            GroupElement::Torus(y) => y.iter().fold(T::zero(), |acc, z| acc.max((cabs(*z) - T::one()).abs())),
            GroupElement::Su2(z1, z2) => (z1.norm_sqr() + z2.norm_sqr() - T::one()).abs(),
            GroupElement::So3(g) => {
                let d = max_abs3(&(g.transpose() * g - Matrix3::identity()));
                d.max((g.determinant() - T::one()).abs())
            }
            GroupElement::U2(u) => max_abs2(&(adjoint2(u) * u - Matrix2::identity())),
        }
    }

    /// Projects back onto the group when drift exceeds [`RENORM_THRESHOLD`].
    pub fn renormalized(self) -> Self {
        let threshold: T = lit(RENORM_THRESHOLD);
        if self.drift() <= threshold {
            return self;
        }
        match self {
            GroupElement::Torus(y) => GroupElement::Torus(y.into_iter().map(|z| z / cabs(z)).collect()),
            GroupElement::Su2(z1, z2) => {
                let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
                GroupElement::Su2(z1 / n, z2 / n)
            }
            GroupElement::So3(mut g) => {
                // Newton–Schulz steps toward the polar factor.
                let three: T = lit(3.0);
                let half: T = lit(0.5);
                for _ in 0..3 {
                    g = g * (Matrix3::identity() * three - g.transpose() * g) * half;
                }
                GroupElement::So3(g)
            }
            GroupElement::U2(mut u) => {
                let three: Complex<T> = c(lit(3.0), T::zero());
                let half: Complex<T> = c(lit(0.5), T::zero());
                for _ in 0..3 {
                    u = u * (Matrix2::identity() * three - adjoint2(&u) * u) * half;
                }
                GroupElement::U2(u)
            }
        }
    }

    /// Max-entry distance between matrix realizations.
    pub fn distance(&self, other: &Self) -> Result<T> {
        check_tags(self.tag(), other.tag())?;
        let d = self.to_matrix() - other.to_matrix();
        Ok(d.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z))))
    }
}

impl<T: Real> Mul for &GroupElement<T> {
    type Output = GroupElement<T>;

    /// Panics on mismatched tags; use [`group_mul`] for a fallible product.
    fn mul(self, rhs: Self) -> GroupElement<T> {
        self.try_mul(rhs).expect("group product of mismatched tags")
    }
}

impl<T: Real> AlgebraElement<T> {
    pub fn zero(tag: GroupTag) -> Self {
        match tag {
            GroupTag::Torus(d) => AlgebraElement::Torus(vec![T::zero(); d]),
            GroupTag::Su2 => AlgebraElement::Su2(Matrix2::zeros()),
            GroupTag::So3 => AlgebraElement::So3(Matrix3::zeros()),
            GroupTag::U2 => AlgebraElement::U2(Matrix2::zeros()),
        }
    }

    pub fn tag(&self) -> GroupTag {
        match self {
            AlgebraElement::Torus(s) => GroupTag::Torus(s.len()),
            AlgebraElement::Su2(_) => GroupTag::Su2,
            AlgebraElement::So3(_) => GroupTag::So3,
            AlgebraElement::U2(_) => GroupTag::U2,
        }
    }

    /// `diag(i s, -i s)` in su(2).
    pub fn su2_diag(s: T) -> Self {
        AlgebraElement::Su2(su2_generator::<T>(2) * c(s, T::zero()))
    }

    /// `i s I` in u(2).
    pub fn u2_scalar(s: T) -> Self {
        AlgebraElement::U2(Matrix2::identity() * c(T::zero(), s))
    }

    /// Orthonormal basis with respect to [`algebra_inner`]. For U(2) the
    /// su(2) generators are followed by `i I`.
    pub fn basis(tag: GroupTag) -> Vec<Self> {
        match tag {
            GroupTag::Torus(d) => (0..d)
                .map(|k| {
                    let mut v = vec![T::zero(); d];
                    v[k] = T::one();
                    AlgebraElement::Torus(v)
                })
                .collect(),
            GroupTag::Su2 => (0..3).map(|k| AlgebraElement::Su2(su2_generator(k))).collect(),
            GroupTag::So3 => (0..3).map(|k| AlgebraElement::So3(so3_generator(k))).collect(),
            GroupTag::U2 => {
                let mut b: Vec<Self> = (0..3).map(|k| AlgebraElement::U2(su2_generator(k))).collect();
                b.push(AlgebraElement::U2(Matrix2::identity() * ci()));
                b
            }
        }
    }

    /// Coordinates in the orthonormal [`basis`](Self::basis).
    pub fn coords(&self) -> Vec<T> {
        match self {
            AlgebraElement::Torus(s) => s.clone(),
            AlgebraElement::Su2(m) => vec![m[(0, 1)].im, m[(0, 1)].re, m[(0, 0)].im],
            AlgebraElement::So3(m) => vec![m[(1, 2)], -m[(0, 2)], m[(0, 1)]],
            AlgebraElement::U2(m) => {
                let half: T = lit(0.5);
                let mu = (m[(0, 0)].im + m[(1, 1)].im) * half;
                let a = (m[(0, 0)].im - m[(1, 1)].im) * half;
                let w = (m[(0, 1)] - m[(1, 0)].conj()) * c(half, T::zero());
                vec![w.im, w.re, a, mu]
            }
        }
    }

    pub fn from_coords(tag: GroupTag, x: &[T]) -> Self {
        assert_eq!(x.len(), tag.algebra_dim(), "coordinate count for {tag}");
        let mut acc = Self::zero(tag);
        for (b, &xi) in Self::basis(tag).into_iter().zip(x) {
            acc = acc + b * xi;
        }
        acc
    }

    /// Dense complex matrix; torus elements become `diag(i s_k)`.
    pub fn to_matrix(&self) -> DMatrix<Complex<T>> {
        match self {
            AlgebraElement::Torus(s) => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(s.len(), s.iter().map(|&x| c(T::zero(), x))))
            }
            AlgebraElement::Su2(m) | AlgebraElement::U2(m) => DMatrix::from_iterator(2, 2, m.iter().copied()),
            AlgebraElement::So3(m) => DMatrix::from_iterator(3, 3, m.iter().map(|&x| c(x, T::zero()))),
        }
    }

    /// Orthogonal projection of an arbitrary complex matrix onto the algebra.
    pub fn project_matrix(tag: GroupTag, m: &DMatrix<Complex<T>>) -> Self {
        let half: Complex<T> = c(lit(0.5), T::zero());
        let skew = (m - m.adjoint()) * half;
        match tag {
            GroupTag::Torus(d) => AlgebraElement::Torus((0..d).map(|k| skew[(k, k)].im).collect()),
            GroupTag::Su2 => {
                let mut z = Matrix2::from_fn(|i, j| skew[(i, j)]);
                let t = (z[(0, 0)] + z[(1, 1)]) * half;
                z[(0, 0)] -= t;
                z[(1, 1)] -= t;
                AlgebraElement::Su2(z)
            }
            GroupTag::So3 => AlgebraElement::So3(Matrix3::from_fn(|i, j| skew[(i, j)].re)),
            GroupTag::U2 => AlgebraElement::U2(Matrix2::from_fn(|i, j| skew[(i, j)])),
        }
    }

    pub fn norm(&self) -> T {
        algebra_inner(self, self).expect("same tag").sqrt()
    }

    /// Largest violation of skew-Hermiticity (and tracelessness for su(2)).
    pub fn defect(&self) -> T {
        match self {
            AlgebraElement::Torus(_) => T::zero(),
            AlgebraElement::Su2(m) => {
                let d = max_abs2(&(m + adjoint2(m)));
                d.max(cabs(m[(0, 0)] + m[(1, 1)]))
            }
            AlgebraElement::So3(m) => max_abs3(&(m + m.transpose())),
            AlgebraElement::U2(m) => max_abs2(&(m + adjoint2(m))),
        }
    }

    pub fn scale(&self, t: T) -> Self {
        match self {
            AlgebraElement::Torus(s) => AlgebraElement::Torus(s.iter().map(|&x| x * t).collect()),
            AlgebraElement::Su2(m) => AlgebraElement::Su2(m * c(t, T::zero())),
            AlgebraElement::So3(m) => AlgebraElement::So3(m * t),
            AlgebraElement::U2(m) => AlgebraElement::U2(m * c(t, T::zero())),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_tags(self.tag(), other.tag())?;
        Ok(match (self, other) {
            (AlgebraElement::Torus(a), AlgebraElement::Torus(b)) => {
                AlgebraElement::Torus(a.iter().zip(b).map(|(x, y)| *x + *y).collect())
            }
            (AlgebraElement::Su2(a), AlgebraElement::Su2(b)) => AlgebraElement::Su2(a + b),
            (AlgebraElement::So3(a), AlgebraElement::So3(b)) => AlgebraElement::So3(a + b),
            (AlgebraElement::U2(a), AlgebraElement::U2(b)) => AlgebraElement::U2(a + b),
            _ => unreachable!(),
        })
    }

    /// Lie bracket `[Z1, Z2]`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        check_tags(self.tag(), other.tag())?;
        Ok(match (self, other) {
            (AlgebraElement::Torus(a), _) => AlgebraElement::Torus(vec![T::zero(); a.len()]),
            (AlgebraElement::Su2(a), AlgebraElement::Su2(b)) => AlgebraElement::Su2(a * b - b * a),
            (AlgebraElement::So3(a), AlgebraElement::So3(b)) => AlgebraElement::So3(a * b - b * a),
            (AlgebraElement::U2(a), AlgebraElement::U2(b)) => AlgebraElement::U2(a * b - b * a),
            _ => unreachable!(),
        })
    }

    /// The same matrix viewed in u(2); only defined for su(2) elements.
    pub fn su2_as_u2(&self) -> Option<Self> {
        match self {
            AlgebraElement::Su2(m) => Some(AlgebraElement::U2(*m)),
            _ => None,
        }
    }
}

impl<T: Real> Add for AlgebraElement<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("algebra sum of mismatched tags")
    }
}

impl<T: Real> Sub for AlgebraElement<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_add(&rhs.scale(-T::one())).expect("algebra difference of mismatched tags")
    }
}

impl<T: Real> Neg for AlgebraElement<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for AlgebraElement<T> {
    type Output = Self;
    fn mul(self, t: T) -> Self {
        self.scale(t)
    }
}

pub fn group_mul<T: Real>(g: &GroupElement<T>, h: &GroupElement<T>) -> Result<GroupElement<T>> {
    g.try_mul(h)
}

pub fn group_inv<T: Real>(g: &GroupElement<T>) -> GroupElement<T> {
    g.inverse()
}

/// `Ad_g Z = g Z g^{-1}`.
pub fn ad<T: Real>(g: &GroupElement<T>, z: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
    check_tags(g.tag(), z.tag())?;
    Ok(match (g, z) {
        (GroupElement::Torus(_), AlgebraElement::Torus(s)) => AlgebraElement::Torus(s.clone()),
        (GroupElement::Su2(z1, z2), AlgebraElement::Su2(m)) => {
            let g = su2_matrix(*z1, *z2);
            AlgebraElement::Su2(g * m * adjoint2(&g))
        }
        (GroupElement::So3(g), AlgebraElement::So3(m)) => AlgebraElement::So3(g * m * g.transpose()),
        (GroupElement::U2(g), AlgebraElement::U2(m)) => AlgebraElement::U2(g * m * adjoint2(g)),
        _ => unreachable!(),
    })
}

/// Ad-invariant inner product: `½ Re Tr(Z1 Z2*)` on the matrix algebras,
/// the dot product of imaginary parts on the torus.
pub fn algebra_inner<T: Real>(z1: &AlgebraElement<T>, z2: &AlgebraElement<T>) -> Result<T> {
    check_tags(z1.tag(), z2.tag())?;
    let half: T = lit(0.5);
    Ok(match (z1, z2) {
        (AlgebraElement::Torus(a), AlgebraElement::Torus(b)) => {
            a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
        }
        (AlgebraElement::Su2(a), AlgebraElement::Su2(b)) | (AlgebraElement::U2(a), AlgebraElement::U2(b)) => {
            (a * adjoint2(b)).trace().re * half
        }
        (AlgebraElement::So3(a), AlgebraElement::So3(b)) => (a * b.transpose()).trace() * half,
        _ => unreachable!(),
    })
}

/// `sin(x)/x` with a series guard near zero.
fn sinc<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / lit(6.0) + x2 * x2 / lit(120.0)
    } else {
        x.sin() / x
    }
}

/// `(1 - cos x)/x²` with a series guard near zero.
fn versc<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-4) {
        let x2 = x * x;
        lit::<T>(0.5) - x2 / lit(24.0) + x2 * x2 / lit(720.0)
    } else {
        let h = x * lit(0.5);
        let s = sinc(h);
        s * s * lit(0.5)
    }
}

fn exp_su2<T: Real>(m: &Matrix2<Complex<T>>, t: T) -> (Complex<T>, Complex<T>) {
    // Z² = -θ² I for traceless skew-Hermitian Z, so exp(tZ) = cos(tθ) + t·sinc(tθ) Z.
    let a = m[(0, 0)].im;
    let w = m[(0, 1)];
    let theta = (a * a + w.norm_sqr()).sqrt();
    let s = t * sinc(t * theta);
    let co = (t * theta).cos();
    (c(co, a * s), w * s)
}

/// `exp(tZ)`: closed forms on every group (diagonalization identities for
/// 2×2 skew-Hermitian matrices, Rodrigues for SO(3)).
pub fn exp_alg<T: Real>(z: &AlgebraElement<T>, t: T) -> GroupElement<T> {
    match z {
        AlgebraElement::Torus(s) => GroupElement::Torus(s.iter().map(|&x| cis(x * t)).collect()),
        AlgebraElement::Su2(m) => {
            let (z1, z2) = exp_su2(m, t);
            GroupElement::Su2(z1, z2)
        }
        AlgebraElement::U2(m) => {
            let half: T = lit(0.5);
            let mu = (m[(0, 0)].im + m[(1, 1)].im) * half;
            let mut m0 = *m;
            m0[(0, 0)] -= c(T::zero(), mu);
            m0[(1, 1)] -= c(T::zero(), mu);
            let (z1, z2) = exp_su2(&m0, t);
            GroupElement::U2(su2_matrix(z1, z2) * cis(mu * t))
        }
        AlgebraElement::So3(m) => {
            let omega = (m[(1, 2)] * m[(1, 2)] + m[(0, 2)] * m[(0, 2)] + m[(0, 1)] * m[(0, 1)]).sqrt();
            let x = t * omega;
            let g = Matrix3::identity() + m * (t * sinc(x)) + m * m * (t * t * versc(x));
            GroupElement::So3(g)
        }
    }
}

/// Deterministic random stream keyed by `(seed, stream)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngHandle {
    pub seed: u64,
    pub stream: u64,
}

impl RngHandle {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = rng.sample(StandardNormal);
    lit(x)
}

fn unit_phase<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let u: f64 = rng.random();
    cis(T::two_pi() * lit(u))
}

fn haar_su2<T: Real, R: Rng + ?Sized>(rng: &mut R) -> (Complex<T>, Complex<T>) {
    loop {
        let v: [T; 4] = [normal(rng), normal(rng), normal(rng), normal(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt();
        if n > lit(1e-8) {
            return (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n));
        }
    }
}

/// One Haar-distributed element.
pub fn haar_sample<T: Real, R: Rng + ?Sized>(tag: GroupTag, rng: &mut R) -> GroupElement<T> {
    match tag {
        GroupTag::Torus(d) => GroupElement::Torus((0..d).map(|_| unit_phase(rng)).collect()),
        GroupTag::Su2 => {
            let (z1, z2) = haar_su2(rng);
            GroupElement::Su2(z1, z2)
        }
        GroupTag::So3 => {
            let (z1, z2) = haar_su2(rng);
            double_cover(&GroupElement::Su2(z1, z2)).expect("SU2 input")
        }
        GroupTag::U2 => {
            let z = unit_phase(rng);
            let (z1, z2) = haar_su2(rng);
            GroupElement::U2(su2_matrix(z1, z2) * z)
        }
    }
}

/// Closed-form `P_Ad`: identity on the torus, zero on su(2) and so(3),
/// `(Tr Z / 2) I` on u(2).
pub fn p_ad<T: Real>(z: &AlgebraElement<T>) -> AlgebraElement<T> {
    match z {
        AlgebraElement::Torus(_) => z.clone(),
        AlgebraElement::Su2(_) | AlgebraElement::So3(_) => AlgebraElement::zero(z.tag()),
        AlgebraElement::U2(m) => {
            let t = (m[(0, 0)] + m[(1, 1)]) * c(lit(0.5), T::zero());
            AlgebraElement::U2(Matrix2::identity() * t)
        }
    }
}

/// `(1/M) Σ Ad_{g_i} Z` over the supplied samples.
pub fn haar_average_ad<T: Real>(samples: &[GroupElement<T>], z: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
    let mut acc = AlgebraElement::zero(z.tag());
    for g in samples {
        acc = acc.try_add(&ad(g, z)?)?;
    }
    let m = T::from_usize(samples.len().max(1)).unwrap();
    Ok(acc.scale(T::one() / m))
}

/// Monte-Carlo estimate of `P_Ad(Z)` from `samples` Haar draws.
pub fn p_ad_monte_carlo<T: Real>(tag: GroupTag, z: &AlgebraElement<T>, samples: usize, rng: RngHandle) -> Result<AlgebraElement<T>> {
    check_tags(tag, z.tag())?;
    let mut r = rng.rng();
    let mut acc = AlgebraElement::zero(tag);
    for _ in 0..samples.max(1) {
        let g = haar_sample::<T, _>(tag, &mut r);
        acc = acc.try_add(&ad(&g, z)?)?;
    }
    Ok(acc.scale(T::one() / T::from_usize(samples.max(1)).unwrap()))
}

/// Double cover `SU(2) → SO(3)`: the matrix of `Ad_g` in the basis
/// `E_1, E_2, E_3`. Maps `diag(e^{iα/2}, e^{-iα/2})` to the x3-rotation by α.
pub fn double_cover<T: Real>(g: &GroupElement<T>) -> Result<GroupElement<T>> {
    check_tags(GroupTag::Su2, g.tag())?;
    let GroupElement::Su2(z1, z2) = g else { unreachable!() };
    let (p, q, r, s) = (z1.re, z1.im, z2.re, z2.im);
    let two: T = lit(2.0);
    let m = Matrix3::new(
        p * p - q * q - r * r + s * s,
        two * (p * q + r * s),
        two * (q * s - p * r),
        two * (r * s - p * q),
        p * p - q * q + r * r - s * s,
        two * (p * s + q * r),
        two * (p * r + q * s),
        two * (q * r - p * s),
        p * p + q * q - r * r - s * s,
    );
    Ok(GroupElement::So3(m))
}

/// Lift of a rotation through the double cover, normalized so that the
/// first nonzero quaternion component `(Re z1, Im z1, Re z2, Im z2)` is
/// positive.
pub fn lift_to_su2<T: Real>(r: &GroupElement<T>) -> Result<GroupElement<T>> {
    check_tags(GroupTag::So3, r.tag())?;
    let GroupElement::So3(m) = r else { unreachable!() };
    let quarter: T = lit(0.25);
    let one = T::one();
    let sq = [
        (one + m[(0, 0)] + m[(1, 1)] + m[(2, 2)]) * quarter,
        (one - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]) * quarter,
        (one - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]) * quarter,
        (one + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]) * quarter,
    ];
    let (imax, _) = sq
        .iter()
        .enumerate()
        .fold((0, sq[0]), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let big = sq[imax].max(T::zero()).sqrt();
    let f = quarter / big;
    // Products from the off-diagonal entries: pq, pr, ps, rs, qs, qr.
    let pq = m[(0, 1)] - m[(1, 0)];
    let pr = m[(2, 0)] - m[(0, 2)];
    let ps = m[(1, 2)] - m[(2, 1)];
    let rs = m[(0, 1)] + m[(1, 0)];
    let qs = m[(0, 2)] + m[(2, 0)];
    let qr = m[(1, 2)] + m[(2, 1)];
    let (p, q, rr, s) = match imax {
        0 => (big, pq * f, pr * f, ps * f),
        1 => (pq * f, big, qr * f, qs * f),
        2 => (pr * f, qr * f, big, rs * f),
        _ => (ps * f, qs * f, rs * f, big),
    };
    let mut v = [p, q, rr, s];
    if let Some(first) = v.iter().copied().find(|x| *x != T::zero()) {
        if first < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok(GroupElement::Su2(c(v[0], v[1]), c(v[2], v[3])).renormalized())
}

/// The map `(R, w) ↦ z·g` with `g` a lift of `R` and `z² = w` (principal
/// root), multiplied by `branch`. It is a homomorphism up to a global sign.
pub fn iso_so3_torus_to_u2<T: Real>(r: &GroupElement<T>, w: Complex<T>, branch: Branch) -> Result<GroupElement<T>> {
    let g = lift_to_su2(r)?.matrix2().expect("SU2");
    let z = csqrt(w / c(cabs(w), T::zero()));
    Ok(GroupElement::U2(g * (z * branch.sign::<T>())))
}

/// su(2) → so(3): the differential of [`double_cover`], `Z ↦ ad_Z`.
pub fn su2_to_so3_algebra<T: Real>(z: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
    check_tags(GroupTag::Su2, z.tag())?;
    let x = z.coords();
    let two: T = lit(2.0);
    let mut m = Matrix3::zeros();
    for (k, xk) in x.iter().enumerate() {
        m += so3_generator::<T>(k) * (*xk * two);
    }
    Ok(AlgebraElement::So3(m))
}

/// Inverse of [`su2_to_so3_algebra`].
pub fn so3_to_su2_algebra<T: Real>(z: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
    check_tags(GroupTag::So3, z.tag())?;
    let half: T = lit(0.5);
    let x: Vec<T> = z.coords().into_iter().map(|v| v * half).collect();
    Ok(AlgebraElement::from_coords(GroupTag::Su2, &x))
}

/// Differential of [`iso_so3_torus_to_u2`] at the identity:
/// `(Ω, i t) ↦ Ω̃ + (i t / 2) I` with `Ω̃` the su(2) preimage of `Ω`.
pub fn iso_differential<T: Real>(omega: &AlgebraElement<T>, t: T) -> Result<AlgebraElement<T>> {
    let lifted = so3_to_su2_algebra(omega)?.su2_as_u2().expect("su2");
    Ok(lifted + AlgebraElement::u2_scalar(t * lit(0.5)))
}

/// Sign tracker for two-valued lifts along a discrete path: each new value
/// is flipped when it lies more than a quarter turn (quaternion distance
/// above π/2) from its predecessor.
#[derive(Clone, Debug)]
pub struct BranchTracker<T: Real> {
    prev: Option<Matrix2<Complex<T>>>,
    first: Option<Matrix2<Complex<T>>>,
    branch: Branch,
    flips: usize,
    max_step: T,
}

impl<T: Real> Default for BranchTracker<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> BranchTracker<T> {
    pub fn new() -> Self {
        Self { prev: None, first: None, branch: Branch::Plus, flips: 0, max_step: T::zero() }
    }

    /// Accepts the next raw value and returns its continuously tracked sign.
    pub fn push(&mut self, raw: &Matrix2<Complex<T>>) -> (Branch, Matrix2<Complex<T>>) {
        let Some(prev) = self.prev else {
            self.prev = Some(*raw);
            self.first = Some(*raw);
            return (Branch::Plus, *raw);
        };
        let overlap = (adjoint2(&prev) * raw).trace().re;
        let branch = if overlap < T::zero() { Branch::Minus } else { Branch::Plus };
        if branch != self.branch {
            self.flips += 1;
            self.branch = branch;
        }
        let value = raw * c(branch.sign::<T>(), T::zero());
        self.max_step = self.max_step.max(max_abs2(&(value - prev)));
        self.prev = Some(value);
        (branch, value)
    }

    pub fn flips(&self) -> usize {
        self.flips
    }

    /// Largest entrywise jump between consecutive tracked values.
    pub fn max_step(&self) -> T {
        self.max_step
    }

    /// For a closed path: whether the tracked final value returns to the
    /// first one (`Plus`) or to its negative (`Minus`).
    pub fn monodromy(&self) -> Option<Branch> {
        let (first, last) = (self.first?, self.prev?);
        let overlap = (adjoint2(&first) * last).trace().re;
        Some(if overlap < T::zero() { Branch::Minus } else { Branch::Plus })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &GroupElement<f64>, b: &GroupElement<f64>, tol: f64) -> bool {
        a.distance(b).unwrap() <= tol
    }

    #[test]
    fn su2_square_of_off_diagonal_unit() {
        let g = GroupElement::Su2(czero(), cone());
        let sq = &g * &g;
        assert!(close(&sq, &GroupElement::Su2(c(-1.0, 0.0), czero()), 1e-15));
    }

    #[test]
    fn su2_product_matches_matrix_product() {
        let mut rng = RngHandle::new(3, 0).rng();
        for _ in 0..20 {
            let g: GroupElement<f64> = haar_sample(GroupTag::Su2, &mut rng);
            let h: GroupElement<f64> = haar_sample(GroupTag::Su2, &mut rng);
            let direct = g.to_matrix() * h.to_matrix();
            let d = (direct - (&g * &h).to_matrix()).iter().fold(0.0f64, |a, z| a.max(cabs(*z)));
            assert!(d < 1e-14);
        }
    }

    #[test]
    fn inverse_formulas() {
        let z1 = cis(0.4) * 0.6;
        let z2 = cis(-1.1) * 0.8;
        assert_eq!(GroupElement::Su2(z1, z2).inverse(), GroupElement::Su2(z1.conj(), -z2));
        let r = GroupElement::so3_from_euler(0.3, 1.2, -0.7);
        let GroupElement::So3(m) = &r else { unreachable!() };
        assert_eq!(r.inverse(), GroupElement::So3(m.transpose()));
        let e = GroupElement::<f64>::identity(GroupTag::U2);
        assert_eq!(e.inverse(), e);
    }

    #[test]
    fn mismatched_tags_are_errors() {
        let g = GroupElement::<f64>::identity(GroupTag::Su2);
        let h = GroupElement::<f64>::identity(GroupTag::U2);
        assert!(group_mul(&g, &h).is_err());
        assert!(ad(&g, &AlgebraElement::zero(GroupTag::So3)).is_err());
        assert!(algebra_inner(&AlgebraElement::<f64>::zero(GroupTag::Torus(1)), &AlgebraElement::zero(GroupTag::Torus(2))).is_err());
    }

    #[test]
    fn ad_of_diagonal_rotates_off_diagonal_entry() {
        let theta = 0.37;
        let g = GroupElement::Su2(cis(theta), czero());
        let w = c(0.4, -1.3);
        let z = AlgebraElement::Su2(Matrix2::new(c(0.0, 0.2), w, -w.conj(), c(0.0, -0.2)));
        let AlgebraElement::Su2(m) = ad(&g, &z).unwrap() else { unreachable!() };
        assert!(cabs(m[(0, 1)] - cis(2.0 * theta) * w) < 1e-15);
        assert!(cabs(m[(0, 0)] - c(0.0, 0.2)) < 1e-15);
    }

    #[test]
    fn inner_of_su2_diagonal() {
        let z = AlgebraElement::<f64>::su2_diag(1.7);
        assert!((algebra_inner(&z, &z).unwrap() - 1.7 * 1.7).abs() < 1e-14);
    }

    #[test]
    fn bases_are_orthonormal_and_coords_roundtrip() {
        for tag in [GroupTag::Torus(2), GroupTag::Su2, GroupTag::So3, GroupTag::U2] {
            let b = AlgebraElement::<f64>::basis(tag);
            for (i, bi) in b.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((algebra_inner(bi, bj).unwrap() - want).abs() < 1e-15, "{tag} {i} {j}");
                }
                let mut e = vec![0.0; b.len()];
                e[i] = 1.0;
                assert_eq!(bi.coords(), e);
            }
            let x: Vec<f64> = (0..tag.algebra_dim()).map(|k| 0.3 * k as f64 - 0.4).collect();
            let z = AlgebraElement::from_coords(tag, &x);
            for (a, b) in z.coords().iter().zip(&x) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exp_closed_forms() {
        let g = exp_alg(&AlgebraElement::su2_diag(0.9), 1.0);
        assert!(close(&g, &GroupElement::Su2(cis(0.9), czero()), 1e-15));
        let alpha = 1.234;
        let r = exp_alg(&AlgebraElement::So3(so3_generator(2)), alpha);
        assert!(close(&r, &GroupElement::so3_from_euler(alpha, 0.0, 0.0), 1e-15));
        for tag in [GroupTag::Torus(3), GroupTag::Su2, GroupTag::So3, GroupTag::U2] {
            let e = exp_alg(&AlgebraElement::<f64>::zero(tag), 0.0);
            assert!(close(&e, &GroupElement::identity(tag), 0.0));
        }
    }

    #[test]
    fn so3_generator_y_matches_euler_beta() {
        let r = exp_alg(&AlgebraElement::So3(so3_generator(1)), 0.8);
        assert!(close(&r, &GroupElement::so3_from_euler(0.0, 0.8, 0.0), 1e-15));
    }

    #[test]
    fn euler_roundtrip_including_poles() {
        for &(a, b, g) in &[(0.3, 1.1, -2.0), (2.5, 0.0, 0.0), (-1.0, std::f64::consts::PI, 0.0), (0.1, 3.0, 2.9)] {
            let r = GroupElement::so3_from_euler(a, b, g);
            let (a2, b2, g2) = r.so3_euler().unwrap();
            assert!(close(&r, &GroupElement::so3_from_euler(a2, b2, g2), 1e-14));
        }
    }

    #[test]
    fn double_cover_of_diagonal_is_x3_rotation() {
        let alpha = 0.77;
        let g = GroupElement::Su2(cis(alpha / 2.0), czero());
        assert!(close(&double_cover(&g).unwrap(), &GroupElement::so3_from_euler(alpha, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn lift_inverts_double_cover_up_to_sign() {
        let mut rng = RngHandle::new(11, 2).rng();
        for _ in 0..200 {
            let g: GroupElement<f64> = haar_sample(GroupTag::Su2, &mut rng);
            let lifted = lift_to_su2(&double_cover(&g).unwrap()).unwrap();
            let neg = GroupElement::Su2(-g.matrix2().unwrap()[(0, 0)], -g.matrix2().unwrap()[(0, 1)]);
            assert!(close(&lifted, &g, 1e-12) || close(&lifted, &neg, 1e-12));
        }
    }

    #[test]
    fn iso_examples() {
        let e = iso_so3_torus_to_u2(&GroupElement::<f64>::identity(GroupTag::So3), cone(), Branch::Plus).unwrap();
        assert!(close(&e, &GroupElement::identity(GroupTag::U2), 1e-15));
        let alpha = 0.6;
        let h = iso_so3_torus_to_u2(&GroupElement::so3_from_euler(alpha, 0.0, 0.0), cone(), Branch::Plus).unwrap();
        let want = GroupElement::U2(Matrix2::new(cis(alpha / 2.0), czero(), czero(), cis(-alpha / 2.0)));
        assert!(close(&h, &want, 1e-15));
    }

    #[test]
    fn algebra_isomorphism_matches_double_cover_derivative() {
        let z = AlgebraElement::from_coords(GroupTag::Su2, &[0.3, -0.8, 0.5]);
        let t = 1e-6;
        let plus = double_cover(&exp_alg(&z, t)).unwrap().to_matrix();
        let minus = double_cover(&exp_alg(&z, -t)).unwrap().to_matrix();
        let fd = AlgebraElement::project_matrix(GroupTag::So3, &((plus - minus) / c(2.0 * t, 0.0)));
        let exact = su2_to_so3_algebra(&z).unwrap();
        assert!((fd - exact.clone()).norm() < 1e-8);
        let back = so3_to_su2_algebra(&exact).unwrap();
        assert!((back - z).norm() < 1e-15);
    }

    #[test]
    fn p_ad_u2_example() {
        let z = AlgebraElement::U2(Matrix2::new(ci(), czero(), czero(), czero()));
        let p = p_ad(&z);
        let want = AlgebraElement::u2_scalar(0.5);
        assert!((p - want).norm() < 1e-16);
    }

    #[test]
    fn p_ad_monte_carlo_single_identity_sample() {
        let z = AlgebraElement::from_coords(GroupTag::Su2, &[0.1, 0.2, 0.3]);
        let avg = haar_average_ad(&[GroupElement::identity(GroupTag::Su2)], &z).unwrap();
        assert_eq!(avg, z);
    }

    #[test]
    fn rng_handle_is_reproducible_and_streams_differ() {
        let a: Vec<GroupElement<f64>> = {
            let mut r = RngHandle::new(5, 1).rng();
            (0..10).map(|_| haar_sample(GroupTag::U2, &mut r)).collect()
        };
        let b: Vec<GroupElement<f64>> = {
            let mut r = RngHandle::new(5, 1).rng();
            (0..10).map(|_| haar_sample(GroupTag::U2, &mut r)).collect()
        };
        let other: GroupElement<f64> = haar_sample(GroupTag::U2, &mut RngHandle::new(5, 2).rng());
        assert_eq!(a, b);
        assert_ne!(a[0], other);
    }

    #[test]
    fn renormalization_repairs_drift() {
        let g = GroupElement::Su2(c(1.0 + 1e-9, 0.0), czero()).renormalized();
        assert!(g.drift() < 1e-15);
        let GroupElement::So3(m) = GroupElement::so3_from_euler(0.3, 0.4, 0.5) else { unreachable!() };
        let r = GroupElement::So3(m * (1.0 + 1e-8)).renormalized();
        assert!(r.drift() < 1e-14);
    }

    #[test]
    fn branch_tracker_detects_sign_monodromy() {
        // z = sqrt(e^{2πiθ}) along θ ∈ [0,1]: the principal root jumps at θ = 1/2.
        let mut tr = BranchTracker::<f64>::new();
        for k in 0..=64 {
            let th = k as f64 / 64.0;
            let u = iso_so3_torus_to_u2(&GroupElement::identity(GroupTag::So3), cis(2.0 * std::f64::consts::PI * th), Branch::Plus).unwrap();
            tr.push(&u.matrix2().unwrap());
        }
        assert_eq!(tr.monodromy(), Some(Branch::Minus));
        assert_eq!(tr.flips(), 1);
        assert!(tr.max_step() < 0.1);
    }
}
