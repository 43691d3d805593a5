use std::fmt::{Display, LowerExp};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Zero};

/// Floating-point scalar the whole crate is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + rustfft::FftNum + Display + LowerExp + Default + 'static
{
    /// Power-of-two step used when renormalizing recurrences; `2^(2*RESCALE_BITS)`
    /// must stay finite.
    const RESCALE_BITS: i32;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn of_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }
}

impl Real for f32 {
    const RESCALE_BITS: i32 = 48;
}

impl Real for f64 {
    const RESCALE_BITS: i32 = 400;
}

/// `x * 2^e` without intermediate overflow of the power of two.
pub fn ldexp<T: Real>(mut x: T, mut e: i32) -> T {
    let step = T::RESCALE_BITS;
    let two = T::lit(2.0);
    while e > step && x.is_finite() && !x.is_zero() {
        x = x * two.powi(step);
        e -= step;
    }
    while e < -step && !x.is_zero() {
        x = x * two.powi(-step);
        e += step;
    }
    x * two.powi(e)
}

fn cldexp<T: Real>(c: Complex<T>, e: i32) -> Complex<T> {
    Complex::new(ldexp(c.re, e), ldexp(c.im, e))
}

/// Complex value `mant * 2^exp` with an unbounded binary exponent.
///
/// Used for Bessel values of very large or very small magnitude (aliased
/// orders far beyond the argument), whose products are of moderate size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<T> {
    pub mant: Complex<T>,
    pub exp: i32,
}

impl<T: Real> Scaled<T> {
    pub fn zero() -> Self {
        Scaled { mant: Complex::zero(), exp: 0 }
    }

    pub fn from_complex(c: Complex<T>) -> Self {
        Self::from_parts(c, 0)
    }

    pub fn from_real(x: T) -> Self {
        Self::from_complex(Complex::new(x, T::zero()))
    }

    /// Normalizes so that the larger mantissa component lies in `[1, 2)`.
    pub fn from_parts(m: Complex<T>, exp: i32) -> Self {
        let big = m.re.abs().max(m.im.abs());
        if big.is_zero() || !big.is_finite() {
            return Scaled { mant: m, exp: if big.is_zero() { 0 } else { exp } };
        }
        let shift = big.log2().floor().to_i32().unwrap_or(0);
        let mut mant = cldexp(m, -shift);
        let mut e = exp.saturating_add(shift);
        // log2 rounding can leave the mantissa just outside [1, 2).
        let b = mant.re.abs().max(mant.im.abs());
        if b >= T::lit(2.0) {
            mant = mant / T::lit(2.0);
            e = e.saturating_add(1);
        } else if b < T::one() {
            mant = mant * T::lit(2.0);
            e = e.saturating_sub(1);
        }
        Scaled { mant, exp: e }
    }

    /// `e^c` with the real part of `c` folded into the binary exponent.
    pub fn exp_of(c: Complex<T>) -> Self {
        let l2 = c.re / T::LN_2();
        let n = l2.floor();
        let frac = (l2 - n) * T::LN_2();
        let m = Complex::new(c.im.cos(), c.im.sin()) * frac.exp();
        Self::from_parts(m, n.to_i32().unwrap_or(if n > T::zero() { i32::MAX } else { i32::MIN }))
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.mant.re.is_finite() && self.mant.im.is_finite()
    }

    /// Value as an ordinary complex number; saturates to infinity or zero.
    pub fn to_complex(&self) -> Complex<T> {
        cldexp(self.mant, self.exp)
    }

    /// `log2 |value|`; `-inf` for zero.
    pub fn log2_abs(&self) -> T {
        self.mant.norm().log2() + T::of_int(self.exp as i64)
    }

    pub fn scale(self, c: Complex<T>) -> Self {
        Self::from_parts(self.mant * c, self.exp)
    }

    pub fn scale_real(self, x: T) -> Self {
        Self::from_parts(self.mant * x, self.exp)
    }

    pub fn conj(self) -> Self {
        Scaled { mant: self.mant.conj(), exp: self.exp }
    }

    /// `|self - other| / |other|`, computed without leaving scaled form.
    pub fn rel_diff(&self, other: &Self) -> T {
        if other.is_zero() {
            return if self.is_zero() { T::zero() } else { T::infinity() };
        }
        ((*self - *other) / *other).to_complex().norm()
    }
}

impl<T: Real> Mul for Scaled<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_parts(self.mant * o.mant, self.exp.saturating_add(o.exp))
    }
}

impl<T: Real> Div for Scaled<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self::from_parts(self.mant / o.mant, self.exp.saturating_sub(o.exp))
    }
}

impl<T: Real> Add for Scaled<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o;
        }
        let (hi, lo) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = hi.exp.saturating_sub(lo.exp);
        if d > 2 * T::RESCALE_BITS {
            return hi;
        }
        Self::from_parts(hi.mant + cldexp(lo.mant, -d), hi.exp)
    }
}

impl<T: Real> Neg for Scaled<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Scaled { mant: -self.mant, exp: self.exp }
    }
}

impl<T: Real> Sub for Scaled<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldexp_crosses_range() {
        let x = ldexp(1.5f64, 3000);
        assert!(x.is_infinite());
        assert_eq!(ldexp(ldexp(1.5f64, 900), -900), 1.5);
        assert_eq!(ldexp(3.0f32, -2), 0.75);
    }

    #[test]
    fn scaled_round_trip_and_products() {
        let a = Scaled::from_complex(Complex::new(3.0f64, -4.0));
        assert!((a.to_complex() - Complex::new(3.0, -4.0)).norm() < 1e-15);
        let big = Scaled::from_parts(Complex::new(1.0f64, 0.0), 5000);
        let small = Scaled::from_parts(Complex::new(2.0f64, 0.0), -5000);
        let p = (big * small).to_complex();
        assert!((p.re - 2.0).abs() < 1e-15);
        assert!(big.to_complex().re.is_infinite());
        assert_eq!(small.to_complex().re, 0.0);
    }

    #[test]
    fn scaled_add_aligns_exponents() {
        let a = Scaled::from_parts(Complex::new(1.0f64, 0.0), 1000);
        let b = Scaled::from_parts(Complex::new(1.0f64, 0.0), 999);
        let s = a + b;
        assert_eq!(s.exp, 1000);
        assert!((s.mant.re - 1.5).abs() < 1e-15);
        assert_eq!(a - a, Scaled::from_complex(Complex::new(0.0, 0.0)));
    }

    #[test]
    fn exp_of_matches_std() {
        let c = Complex::new(2.3f64, -0.7);
        let e = Scaled::exp_of(c).to_complex();
        assert!((e - c.exp()).norm() < 1e-14 * c.exp().norm());
        let huge = Scaled::exp_of(Complex::new(1000.0f64, 0.0));
        assert!((huge.log2_abs() - 1000.0 / std::f64::consts::LN_2).abs() < 1e-9);
    }
}
