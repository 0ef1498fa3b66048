//! Scalar plumbing shared by every module.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, FromPrimitive};

/// Real scalar the library is generic over (`f32` or `f64`).
pub trait Real: RealField + FloatConst + FromPrimitive + Copy + Send + Sync + 'static {}

impl<T> Real for T where T: RealField + FloatConst + FromPrimitive + Copy + Send + Sync + 'static {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

/// Lossy conversion to `f64` for reports.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_subset().unwrap_or(f64::NAN)
}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// `e^z` for complex `z`.
#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    cis(z.im) * z.re.exp()
}

/// Principal square root, cancellation-free on both half-planes.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = cabs(z);
    if r == T::zero() {
        return czero();
    }
    let half: T = lit(0.5);
    if z.re >= T::zero() {
        let re = ((r + z.re) * half).sqrt();
        Complex::new(re, z.im / (re + re))
    } else {
        let im = ((r - z.re) * half).sqrt();
        let im = if z.im < T::zero() { -im } else { im };
        Complex::new(z.im / (im + im), im)
    }
}

/// Integer power by repeated squaring; negative powers go through `1/z`.
pub fn cpowi<T: Real>(z: Complex<T>, n: i64) -> Complex<T> {
    if n < 0 {
        return cpowi(cone::<T>() / z, -n);
    }
    let mut base = z;
    let mut e = n as u64;
    let mut acc = cone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `x^n` for a real base, `0^0 = 1`.
pub fn powi<T: Real>(x: T, n: u32) -> T {
    let mut acc = T::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// `n!` as a real.
pub fn factorial<T: Real>(n: u32) -> T {
    let mut acc = T::one();
    for k in 2..=n {
        acc *= T::from_u32(k).unwrap();
    }
    acc
}

/// Binomial coefficient as a real.
pub fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_u32(n - i).unwrap() / T::from_u32(i + 1).unwrap();
    }
    acc.round()
}

/// Reduces a phase to `[0, 1)`.
#[inline]
pub fn frac<T: Real>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}
