//! Bessel and Hankel functions of integer order and complex argument.
//!
//! `J_q` comes from Miller's backward recurrence normalized by the generating
//! function `e^{±jz} = J_0 + 2 Σ (±j)^n J_n`; `Y_0`, `Y_1` from the Neumann
//! series over the same `J` values; higher `Y_q` by forward recurrence.
//! Values carry a separate binary exponent ([`Scaled`]) so orders far beyond
//! the argument neither overflow nor underflow.

mod hankel;
pub mod oracle;

pub use hankel::hankel2_01;
pub use oracle::{bessel_oracle, OracleEval, OracleTable};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::{ldexp, Real, Scaled};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bessel data for one order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval<T> {
    pub order: i64,
    pub argument: Complex<T>,
    pub j: Scaled<T>,
    pub y: Scaled<T>,
    pub jp: Scaled<T>,
    pub yp: Scaled<T>,
}

impl<T: Real> BesselEval<T> {
    /// `H^{(2)} = J - jY`.
    pub fn h(&self) -> Scaled<T> {
        self.j - self.y.scale(Complex::new(T::zero(), T::one()))
    }

    /// `H^{(2)}' = J' - jY'`.
    pub fn hp(&self) -> Scaled<T> {
        self.jp - self.yp.scale(Complex::new(T::zero(), T::one()))
    }

    /// `|(J Y' - J' Y) πz/2 - 1|`.
    pub fn wronskian_residual(&self) -> T {
        let w = self.j * self.yp - self.jp * self.y;
        let s = w.scale(self.argument * T::FRAC_PI_2());
        (s.to_complex() - Complex::new(T::one(), T::zero())).norm()
    }

    fn reflect(self, order: i64) -> Self {
        if order >= 0 || order % 2 == 0 {
            return BesselEval { order, ..self };
        }
        BesselEval { order, j: -self.j, y: -self.y, jp: -self.jp, yp: -self.yp, ..self }
    }
}

/// `J_n`, `Y_n` for every order `0..=max_order` at one argument.
#[derive(Debug, Clone)]
pub struct BesselTable<T> {
    z: Complex<T>,
    j: Vec<Scaled<T>>,
    y: Vec<Scaled<T>>,
}

impl<T: Real> BesselTable<T> {
    pub fn new(z: Complex<T>, max_order: usize) -> Result<Self> {
        if z.is_zero() {
            return Err(Error::Domain("Bessel argument z = 0".into()));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite Bessel argument {z}")));
        }
        let top = max_order + 1;
        let tol = T::epsilon().sqrt() * T::lit(5e-3);
        let mut margin = 8usize;
        let mut last = T::nan();
        for _ in 0..5 {
            let j = miller(z, top, margin)?;
            let y = forward_y(z, &j.y0, &j.y1, top)?;
            let table = BesselTable { z, j: j.values, y };
            let r0 = table.eval_checked(0).wronskian_residual();
            let rt = table.eval_checked(max_order as i64).wronskian_residual();
            last = r0.max(rt);
            if last < tol {
                return Ok(table);
            }
            margin *= 2;
        }
        Err(Error::Convergence(format!(
            "Wronskian residual {last:e} at z = {z}, max order {max_order}"
        )))
    }

    pub fn argument(&self) -> Complex<T> {
        self.z
    }

    pub fn max_order(&self) -> usize {
        self.j.len() - 2
    }

    /// Values at any order `|order| <= max_order`.
    pub fn eval(&self, order: i64) -> Result<BesselEval<T>> {
        if order.unsigned_abs() as usize > self.max_order() {
            return Err(Error::Domain(format!(
                "order {order} outside table of max order {}",
                self.max_order()
            )));
        }
        Ok(self.eval_checked(order))
    }

    fn eval_checked(&self, order: i64) -> BesselEval<T> {
        let n = order.unsigned_abs() as usize;
        let half = T::lit(0.5);
        let (jp, yp) = if n == 0 {
            (-self.j[1], -self.y[1])
        } else {
            ((self.j[n - 1] - self.j[n + 1]).scale_real(half), (self.y[n - 1] - self.y[n + 1]).scale_real(half))
        };
        BesselEval { order: n as i64, argument: self.z, j: self.j[n], y: self.y[n], jp, yp }.reflect(order)
    }
}

/// Single-order evaluation; builds a table up to `|order|`.
pub fn bessel_jy<T: Real>(order: i64, z: Complex<T>) -> Result<BesselEval<T>> {
    BesselTable::new(z, order.unsigned_abs() as usize)?.eval(order)
}

struct MillerOut<T> {
    values: Vec<Scaled<T>>,
    y0: Scaled<T>,
    y1: Scaled<T>,
}

/// Order above which the backward recurrence is started: forward-run the
/// unnormalized dominant solution from `n0` until it exceeds `1/eps`.
fn miller_start<T: Real>(z: Complex<T>, n0: usize) -> Result<usize> {
    let two_z = Complex::new(T::lit(2.0), T::zero()) / z;
    let target = T::one() / T::epsilon();
    let mut prev = Complex::<T>::zero();
    let mut cur = Complex::new(T::one(), T::zero());
    let limit = n0 + 100 + 20 * (z.norm().to_usize().unwrap_or(usize::MAX / 64));
    let mut n = n0;
    while cur.norm() < target {
        let next = two_z * T::of_int(n as i64) * cur - prev;
        prev = cur;
        cur = next;
        n += 1;
        if n > limit {
            return Err(Error::Convergence(format!("Miller start search at z = {z} passed order {limit}")));
        }
    }
    Ok(n)
}

fn miller<T: Real>(z: Complex<T>, top: usize, margin: usize) -> Result<MillerOut<T>> {
    let zabs = z.norm().ceil().to_usize().unwrap_or(usize::MAX / 4);
    let n0 = top.max(zabs) + 1;
    let start = miller_start(z, n0)? + margin;

    let two_z = Complex::new(T::lit(2.0), T::zero()) / z;
    let big = ldexp(T::one(), T::RESCALE_BITS);
    let shrink = ldexp(T::one(), -T::RESCALE_BITS);
    // Generating-function phase: j for Im z <= 0 keeps |e^{jz}| >= 1.
    let t = if z.im <= T::zero() { Complex::new(T::zero(), T::one()) } else { Complex::new(T::zero(), -T::one()) };
    let mut tn = Complex::new(T::one(), T::zero());
    for _ in 0..(start % 4) {
        tn = tn * t;
    }
    let tinv = t.conj();

    let mut values = vec![Scaled::zero(); top + 1];
    let mut above = Complex::<T>::zero();
    let mut cur = Complex::new(T::one(), T::zero());
    let mut c = 0i32;
    let mut norm = Complex::<T>::zero();
    let mut s0 = Complex::<T>::zero();
    let mut s1 = Complex::<T>::zero();
    if start <= top {
        values[start] = Scaled::from_parts(cur, 0);
    }
    let mut n = start;
    while n >= 1 {
        let nt = T::of_int(n as i64);
        norm = norm + tn * cur * T::lit(2.0);
        if n % 2 == 0 {
            let k = (n / 2) as i64;
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            s0 = s0 + cur * (sign / T::of_int(k));
        } else if n >= 3 {
            let k = ((n - 1) / 2) as i64;
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            let w = T::of_int(2 * k + 1) / T::of_int(k * (k + 1));
            s1 = s1 + cur * (sign * w);
        }
        let below = two_z * nt * cur - above;
        above = cur;
        cur = below;
        tn = tn * tinv;
        n -= 1;
        while cur.norm() > big {
            cur = cur * shrink;
            above = above * shrink;
            norm = norm * shrink;
            s0 = s0 * shrink;
            s1 = s1 * shrink;
            c += T::RESCALE_BITS;
        }
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(Error::Overflow { order: n as i64, argument: format!("{z}") });
        }
        if n <= top {
            values[n] = Scaled::from_parts(cur, c);
        }
    }
    norm = norm + cur;
    if norm.is_zero() {
        return Err(Error::Convergence(format!("vanishing Miller normalization at z = {z}")));
    }

    let scale = Scaled::exp_of(t * z) / Scaled::from_parts(norm, c);
    for v in values.iter_mut() {
        *v = *v * scale;
    }
    let sum0 = Scaled::from_parts(s0, c) * scale;
    let sum1 = Scaled::from_parts(s1, c) * scale;
    let log_term = (z / T::lit(2.0)).ln() + T::lit(EULER_GAMMA);
    let two_pi = T::lit(2.0) / T::PI();
    let j0 = values[0];
    let j1 = if top >= 1 { values[1] } else { Scaled::zero() };
    let y0 = (j0.scale(log_term) - sum0.scale_real(T::lit(2.0))).scale_real(two_pi);
    let y1 = (j1.scale(log_term - T::one()) - j0.scale(Complex::new(T::one(), T::zero()) / z) - sum1).scale_real(two_pi);
    Ok(MillerOut { values, y0, y1 })
}

fn forward_y<T: Real>(z: Complex<T>, y0: &Scaled<T>, y1: &Scaled<T>, top: usize) -> Result<Vec<Scaled<T>>> {
    let e = y0.exp.max(y1.exp);
    let mut prev = Complex::new(ldexp(y0.mant.re, y0.exp - e), ldexp(y0.mant.im, y0.exp - e));
    let mut cur = Complex::new(ldexp(y1.mant.re, y1.exp - e), ldexp(y1.mant.im, y1.exp - e));
    let mut c = e;
    let big = ldexp(T::one(), T::RESCALE_BITS);
    let shrink = ldexp(T::one(), -T::RESCALE_BITS);
    let two_z = Complex::new(T::lit(2.0), T::zero()) / z;
    let mut out = Vec::with_capacity(top + 1);
    out.push(*y0);
    if top >= 1 {
        out.push(*y1);
    }
    for n in 1..top {
        let next = two_z * T::of_int(n as i64) * cur - prev;
        prev = cur;
        cur = next;
        while cur.norm() > big {
            cur = cur * shrink;
            prev = prev * shrink;
            c = c.checked_add(T::RESCALE_BITS).ok_or_else(|| Error::Overflow {
                order: n as i64 + 1,
                argument: format!("{z}"),
            })?;
        }
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(Error::Overflow { order: n as i64 + 1, argument: format!("{z}") });
        }
        out.push(Scaled::from_parts(cur, c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn j0_of_two() {
        let b = bessel_jy(0, c(2.0, 0.0)).unwrap();
        let o = bessel_oracle(0, c(2.0, 0.0), 30).unwrap().to_eval();
        assert!(b.j.rel_diff(&o.j) < 1e-14);
        assert!((b.j.to_complex().re - 0.223_890_779_141_235_67).abs() < 1e-15);
    }

    #[test]
    fn small_argument_leading_term() {
        let b = bessel_jy(1, c(1e-6, 0.0)).unwrap();
        assert!((b.j.to_complex().re - 5e-7).abs() < 1e-12);
    }

    #[test]
    fn wronskian_complex_argument() {
        let b = bessel_jy(5, c(3.0, 0.4)).unwrap();
        assert!(b.wronskian_residual() < 1e-10);
    }

    #[test]
    fn zero_argument_is_domain_error() {
        assert!(matches!(bessel_jy(0, c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn reflection() {
        let t = BesselTable::new(c(7.3, -0.9), 12).unwrap();
        for q in 0..=12i64 {
            let p = t.eval(q).unwrap();
            let m = t.eval(-q).unwrap();
            let s = if q % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(m.j, p.j.scale_real(s));
            assert_eq!(m.yp, p.yp.scale_real(s));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(q, z) in &[(0i64, c(4.0, 0.0)), (7, c(10.0, -1.0)), (30, c(25.0, 0.0))] {
            let step = 1e-5 * z.norm();
            let b = bessel_jy(q, z).unwrap();
            let fwd = bessel_jy(q, z + step).unwrap();
            let bwd = bessel_jy(q, z - step).unwrap();
            let fd_j = (fwd.j.to_complex() - bwd.j.to_complex()) / (2.0 * step);
            let fd_y = (fwd.y.to_complex() - bwd.y.to_complex()) / (2.0 * step);
            assert!((fd_j - b.jp.to_complex()).norm() < 1e-6 * b.jp.to_complex().norm());
            assert!((fd_y - b.yp.to_complex()).norm() < 1e-6 * b.yp.to_complex().norm());
        }
    }

    #[test]
    fn large_orders_stay_finite() {
        let t = BesselTable::new(c(100.0, 0.0), 2000).unwrap();
        let e = t.eval(2000).unwrap();
        assert!(e.j.is_finite() && e.y.is_finite());
        assert!(e.j.log2_abs() < -3000.0);
        assert!(e.y.log2_abs() > 3000.0);
        assert!(e.wronskian_residual() < 1e-10);
    }

    #[test]
    fn single_precision_table() {
        let t = BesselTable::new(Complex::new(10.0f32, 0.0), 20).unwrap();
        let e = t.eval(3).unwrap();
        assert!((e.j.to_complex().re - 0.058_379_38).abs() < 1e-5);
    }

    #[test]
    fn wronskian_over_domain() {
        for &zr in &[0.5f64, 3.0, 50.0, 700.0, 5000.0] {
            for &zi in &[0.0, (-0.4 * zr.cbrt()).max(-5.0), 5.0f64.min(0.5 * zr), -5.0f64.min(0.5 * zr)] {
                let t = BesselTable::new(c(zr, zi), 40).unwrap();
                for q in [0i64, 1, 13, 40] {
                    assert!(t.eval(q).unwrap().wronskian_residual() < 1e-10, "z = {zr}{zi:+}j q = {q}");
                }
            }
        }
    }
}
