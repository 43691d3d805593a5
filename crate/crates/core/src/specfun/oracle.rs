//! Arbitrary-precision reference values, independent of the recurrence engine.
//!
//! `J_n` from its Maclaurin series, `Y_n` from the logarithmic series with
//! digamma coefficients. Working precision grows until the bits lost to
//! cancellation are covered. Meant for tests; it is slow.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_complex::Complex;

use super::BesselEval;
use crate::error::{Error, Result};
use crate::real::Scaled;

const RM: RoundingMode = RoundingMode::ToEven;
const EULER_GAMMA_DIGITS: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";
const MAX_TERMS: usize = 200_000;
const GUARD_BITS: usize = 64;

#[derive(Debug, Clone)]
struct BigC {
    re: BigFloat,
    im: BigFloat,
}

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn new(p: usize) -> Self {
        Ctx { p, cc: Consts::new().expect("constant cache") }
    }

    fn real(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.p)
    }

    fn c(&self, z: Complex<f64>) -> BigC {
        BigC { re: self.real(z.re), im: self.real(z.im) }
    }

    fn cr(&self, x: BigFloat) -> BigC {
        BigC { re: x, im: self.int(0) }
    }

    fn add(&self, a: &BigC, b: &BigC) -> BigC {
        BigC { re: a.re.add(&b.re, self.p, RM), im: a.im.add(&b.im, self.p, RM) }
    }

    fn sub(&self, a: &BigC, b: &BigC) -> BigC {
        BigC { re: a.re.sub(&b.re, self.p, RM), im: a.im.sub(&b.im, self.p, RM) }
    }

    fn mul(&self, a: &BigC, b: &BigC) -> BigC {
        let p = self.p;
        let re = a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM);
        let im = a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM);
        BigC { re, im }
    }

    fn scale(&self, a: &BigC, x: &BigFloat) -> BigC {
        BigC { re: a.re.mul(x, self.p, RM), im: a.im.mul(x, self.p, RM) }
    }

    fn div_real(&self, a: &BigC, x: &BigFloat) -> BigC {
        BigC { re: a.re.div(x, self.p, RM), im: a.im.div(x, self.p, RM) }
    }

    fn div(&self, a: &BigC, b: &BigC) -> BigC {
        let p = self.p;
        let den = b.re.mul(&b.re, p, RM).add(&b.im.mul(&b.im, p, RM), p, RM);
        let conj = BigC { re: b.re.clone(), im: b.im.neg() };
        self.div_real(&self.mul(a, &conj), &den)
    }

    fn ln(&mut self, z: &BigC) -> BigC {
        let p = self.p;
        let r2 = z.re.mul(&z.re, p, RM).add(&z.im.mul(&z.im, p, RM), p, RM);
        let re = r2.ln(p, RM, &mut self.cc).div(&self.int(2), p, RM);
        let pi = self.cc.pi(p, RM);
        let im = if z.re.is_zero() {
            let half = pi.div(&self.int(2), p, RM);
            if z.im.is_negative() { half.neg() } else { half }
        } else {
            let base = z.im.div(&z.re, p, RM).atan(p, RM, &mut self.cc);
            if z.re.is_positive() {
                base
            } else if z.im.is_negative() {
                base.sub(&pi, p, RM)
            } else {
                base.add(&pi, p, RM)
            }
        };
        BigC { re, im }
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    fn gamma(&mut self) -> BigFloat {
        BigFloat::parse(EULER_GAMMA_DIGITS, Radix::Dec, self.p, RM, &mut self.cc)
    }
}

fn exp_of(x: &BigFloat) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.exponent().map(|e| e as i64)
    }
}

/// Binary exponent of `max(|re|, |im|)`; `None` for zero.
fn cexp(a: &BigC) -> Option<i64> {
    match (exp_of(&a.re), exp_of(&a.im)) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn to_mant_exp(x: &BigFloat) -> (f64, i64) {
    if x.is_zero() {
        return (0.0, 0);
    }
    let words: &[Word] = x.mantissa_digits().expect("finite value");
    let top = *words.last().expect("non-empty mantissa") as f64 / 2f64.powi(WORD_BIT_SIZE as i32);
    let s = if x.sign() == Some(Sign::Neg) { -1.0 } else { 1.0 };
    (s * top, x.exponent().expect("finite value") as i64)
}

fn to_scaled(a: &BigC) -> Scaled<f64> {
    let (mr, er) = to_mant_exp(&a.re);
    let (mi, ei) = to_mant_exp(&a.im);
    let e = match (mr == 0.0, mi == 0.0) {
        (true, true) => return Scaled::zero(),
        (false, true) => er,
        (true, false) => ei,
        (false, false) => er.max(ei),
    };
    let shift = |m: f64, ex: i64| if m == 0.0 { 0.0 } else { m * 2f64.powi((ex - e).max(-1100) as i32) };
    Scaled::from_parts(Complex::new(shift(mr, er), shift(mi, ei)), e as i32)
}

/// Bits lost to cancellation, and whether the sum converged.
struct SeriesOut {
    value: BigC,
    lost_bits: i64,
}

fn j_series(ctx: &Ctx, n: usize, z: &BigC, zabs: f64) -> Result<SeriesOut> {
    let w = ctx.div_real(z, &ctx.int(2));
    let w2 = ctx.mul(&w, &w);
    let neg_w2 = BigC { re: w2.re.neg(), im: w2.im.neg() };
    let mut term = ctx.cr(ctx.int(1));
    for k in 1..=n {
        term = ctx.div_real(&ctx.mul(&term, &w), &ctx.int(k as i64));
    }
    let mut sum = term.clone();
    let mut max_exp = cexp(&term).unwrap_or(i64::MIN);
    let peak = (zabs / 2.0) as usize + 2;
    for m in 1..MAX_TERMS {
        let d = ctx.int((m * (m + n)) as i64);
        term = ctx.div_real(&ctx.mul(&term, &neg_w2), &d);
        sum = ctx.add(&sum, &term);
        let te = cexp(&term);
        if let Some(te) = te {
            max_exp = max_exp.max(te);
        }
        if m > peak {
            match (te, cexp(&sum)) {
                (None, _) => break,
                (Some(te), Some(se)) if te < se - ctx.p as i64 - 8 => break,
                _ => {}
            }
        }
        if m == MAX_TERMS - 1 {
            return Err(Error::Convergence(format!(
                "J series of order {n} stalled after {m} terms; partial sum exponent {:?}, last term exponent {te:?}",
                cexp(&sum)
            )));
        }
    }
    let lost = cexp(&sum).map(|se| max_exp - se).unwrap_or(ctx.p as i64);
    Ok(SeriesOut { value: sum, lost_bits: lost.max(0) })
}

fn y_series(ctx: &mut Ctx, n: usize, z: &BigC, zabs: f64, jn: &BigC) -> Result<SeriesOut> {
    let p = ctx.p;
    let w = ctx.div_real(z, &ctx.int(2));
    let w2 = ctx.mul(&w, &w);
    let neg_w2 = BigC { re: w2.re.neg(), im: w2.im.neg() };
    let pi = ctx.pi();
    let gamma = ctx.gamma();
    let mut max_exp = i64::MIN;
    let mut track = |x: &BigC| {
        if let Some(e) = cexp(x) {
            max_exp = max_exp.max(e);
        }
    };

    // w^n
    let mut wn = ctx.cr(ctx.int(1));
    for _ in 0..n {
        wn = ctx.mul(&wn, &w);
    }

    // Finite part: sum_{k<n} (n-k-1)!/k! w^{2k}, scaled by -w^{-n}/π.
    let mut finite = ctx.cr(ctx.int(0));
    if n > 0 {
        let mut fact = ctx.int(1);
        for k in 1..n {
            fact = fact.mul(&ctx.int(k as i64), p, RM);
        }
        let mut t = ctx.cr(fact);
        finite = t.clone();
        for k in 0..n - 1 {
            let d = ctx.int(((k + 1) * (n - k - 1)) as i64);
            t = ctx.div_real(&ctx.mul(&t, &w2), &d);
            finite = ctx.add(&finite, &t);
        }
        finite = ctx.div(&finite, &wn);
        finite = ctx.div_real(&finite, &pi);
        finite = BigC { re: finite.re.neg(), im: finite.im.neg() };
        track(&finite);
    }

    // Logarithmic part.
    let lnw = ctx.ln(&w);
    let mut logpart = ctx.mul(&lnw, jn);
    logpart = ctx.scale(&logpart, &ctx.int(2).div(&pi, p, RM));
    track(&logpart);

    // Digamma series: sum (psi(k+1)+psi(n+k+1)) (-w^2)^k/(k!(n+k)!).
    let mut u = ctx.cr(ctx.int(1));
    for k in 1..=n {
        u = ctx.div_real(&u, &ctx.int(k as i64));
    }
    let mut hk = ctx.int(0);
    let mut hnk = ctx.int(0);
    for k in 1..=n {
        hnk = hnk.add(&ctx.int(1).div(&ctx.int(k as i64), p, RM), p, RM);
    }
    let two_gamma = gamma.mul(&ctx.int(2), p, RM);
    let coef = |hk: &BigFloat, hnk: &BigFloat| hk.add(hnk, p, RM).sub(&two_gamma, p, RM);
    let mut series = ctx.scale(&u, &coef(&hk, &hnk));
    let mut smax = cexp(&series).unwrap_or(i64::MIN);
    let peak = (zabs / 2.0) as usize + 2;
    for k in 1..MAX_TERMS {
        let d = ctx.int((k * (n + k)) as i64);
        u = ctx.div_real(&ctx.mul(&u, &neg_w2), &d);
        hk = hk.add(&ctx.int(1).div(&ctx.int(k as i64), p, RM), p, RM);
        hnk = hnk.add(&ctx.int(1).div(&ctx.int((n + k) as i64), p, RM), p, RM);
        let term = ctx.scale(&u, &coef(&hk, &hnk));
        series = ctx.add(&series, &term);
        let te = cexp(&term);
        if let Some(te) = te {
            smax = smax.max(te);
        }
        if k > peak {
            match (te, cexp(&series)) {
                (None, _) => break,
                (Some(te), Some(se)) if te < se - p as i64 - 8 => break,
                _ => {}
            }
        }
        if k == MAX_TERMS - 1 {
            return Err(Error::Convergence(format!(
                "Y series of order {n} stalled after {k} terms; partial sum exponent {:?}",
                cexp(&series)
            )));
        }
    }
    let mut tail = ctx.mul(&series, &wn);
    tail = ctx.div_real(&tail, &pi);
    let tail = BigC { re: tail.re.neg(), im: tail.im.neg() };
    let wn_e = cexp(&wn).unwrap_or(0);
    track(&tail);
    let total = ctx.add(&ctx.add(&finite, &logpart), &tail);
    let inner_loss = if smax == i64::MIN { 0 } else { smax + wn_e - cexp(&tail).unwrap_or(smax + wn_e) };
    let lost = cexp(&total).map(|e| max_exp - e).unwrap_or(p as i64) + inner_loss.max(0);
    Ok(SeriesOut { value: total, lost_bits: lost.max(0) })
}

/// High-precision Bessel data for one order and argument.
#[derive(Debug, Clone)]
pub struct OracleEval {
    pub order: i64,
    pub argument: Complex<f64>,
    precision: usize,
    j: BigC,
    y: BigC,
    jp: BigC,
    yp: BigC,
}

impl OracleEval {
    /// Rounds every value to double precision (with unbounded exponent).
    pub fn to_eval(&self) -> BesselEval<f64> {
        BesselEval {
            order: self.order,
            argument: self.argument,
            j: to_scaled(&self.j),
            y: to_scaled(&self.y),
            jp: to_scaled(&self.jp),
            yp: to_scaled(&self.yp),
        }
    }

    /// `|(J Y' - J' Y) πz/2 - 1|` evaluated at working precision.
    pub fn wronskian_residual(&self) -> f64 {
        let mut ctx = Ctx::new(self.precision);
        let w = ctx.sub(&ctx.mul(&self.j, &self.yp), &ctx.mul(&self.jp, &self.y));
        let pi = ctx.pi();
        let half_pi = pi.div(&ctx.int(2), ctx.p, RM);
        let s = ctx.scale(&ctx.mul(&w, &ctx.c(self.argument)), &half_pi);
        let r = ctx.sub(&s, &ctx.cr(ctx.int(1)));
        to_scaled(&r).to_complex().norm()
    }
}

fn check_args(z: Complex<f64>, digits: u32) -> Result<()> {
    if !(20..=60).contains(&digits) {
        return Err(Error::Domain(format!("oracle digits {digits} outside [20, 60]")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("Bessel argument z = 0".into()));
    }
    Ok(())
}

fn target_bits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
}

/// Evaluates `J_n`, `J_{n+1}` to `bits` correct bits, growing precision as needed.
fn j_pair(n: usize, z: Complex<f64>, bits: usize) -> Result<(Ctx, BigC, BigC)> {
    let zabs = z.norm();
    let mut p = bits + GUARD_BITS;
    loop {
        let ctx = Ctx::new(p);
        let bz = ctx.c(z);
        let a = j_series(&ctx, n, &bz, zabs)?;
        let b = j_series(&ctx, n + 1, &bz, zabs)?;
        let need = bits + GUARD_BITS + a.lost_bits.max(b.lost_bits) as usize;
        if need <= p {
            return Ok((ctx, a.value, b.value));
        }
        p = need + 32;
    }
}

/// `J_n, J_{n+1}, Y_n, Y_{n+1}` to `bits` correct bits.
fn jy_pairs(n: usize, z: Complex<f64>, bits: usize) -> Result<(Ctx, [BigC; 4])> {
    let zabs = z.norm();
    let mut p = bits;
    loop {
        let (mut ctx, j, j1) = j_pair(n, z, p)?;
        let bz = ctx.c(z);
        let a = y_series(&mut ctx, n, &bz, zabs, &j)?;
        let b = y_series(&mut ctx, n + 1, &bz, zabs, &j1)?;
        let need = bits + GUARD_BITS + a.lost_bits.max(b.lost_bits) as usize;
        if need <= ctx.p {
            return Ok((ctx, [j, j1, a.value, b.value]));
        }
        p = need + 32;
    }
}

/// High-precision `J_n, Y_n, J'_n, Y'_n` with at least `digits` significant digits.
pub fn bessel_oracle(order: i64, z: Complex<f64>, digits: u32) -> Result<OracleEval> {
    check_args(z, digits)?;
    let n = order.unsigned_abs() as usize;
    let (ctx, [j, j1, y, y1]) = jy_pairs(n, z, target_bits(digits))?;
    let bz = ctx.c(z);
    let nz = ctx.div(&ctx.cr(ctx.int(n as i64)), &bz);
    let jp = ctx.sub(&ctx.mul(&nz, &j), &j1);
    let yp = ctx.sub(&ctx.mul(&nz, &y), &y1);
    let mut out = OracleEval { order: n as i64, argument: z, precision: ctx.p, j, y, jp, yp };
    if order < 0 && n % 2 == 1 {
        for v in [&mut out.j, &mut out.y, &mut out.jp, &mut out.yp] {
            *v = BigC { re: v.re.neg(), im: v.im.neg() };
        }
        out.order = order;
    }
    Ok(out)
}

/// Oracle values for all orders `0..=max_order` at one argument.
///
/// Series seeds (`J` at the two top orders, `Y_0`, `Y_1`) propagated by
/// recurrence in the stable direction at high precision.
pub struct OracleTable {
    argument: Complex<f64>,
    j: Vec<Scaled<f64>>,
    y: Vec<Scaled<f64>>,
}

impl OracleTable {
    pub fn new(z: Complex<f64>, max_order: usize, digits: u32) -> Result<Self> {
        check_args(z, digits)?;
        let bits = target_bits(digits);
        let top = max_order + 1;
        // Recurrence over `top` steps loses at most a few bits per step
        // relative to the larger of the two solutions.
        let extra = 64 + (top as f64).log2().ceil() as usize * 2;
        let (ctx_top, jt, jt1) = j_pair(top, z, bits + extra)?;
        let (ctx_low, [_, _, y0, y1]) = jy_pairs(0, z, bits + extra)?;
        let ctx = Ctx::new(ctx_top.p.max(ctx_low.p));
        let bz = ctx.c(z);
        let two_z = ctx.div(&ctx.cr(ctx.int(2)), &bz);

        let mut jv = vec![ctx.cr(ctx.int(0)); top + 2];
        jv[top] = jt;
        jv[top + 1] = jt1;
        for n in (1..=top).rev() {
            let f = ctx.scale(&two_z, &ctx.int(n as i64));
            jv[n - 1] = ctx.sub(&ctx.mul(&f, &jv[n]), &jv[n + 1]);
        }
        let mut yv = Vec::with_capacity(top + 2);
        yv.push(y0);
        yv.push(y1);
        for n in 1..=top {
            let f = ctx.scale(&two_z, &ctx.int(n as i64));
            let next = ctx.sub(&ctx.mul(&f, &yv[n]), &yv[n - 1]);
            yv.push(next);
        }
        Ok(OracleTable {
            argument: z,
            j: jv.iter().map(to_scaled).collect(),
            y: yv.iter().map(to_scaled).collect(),
        })
    }

    pub fn max_order(&self) -> usize {
        self.j.len() - 3
    }

    /// Values at `0 <= order <= max_order`; derivatives by `J'_n = (n/z)J_n - J_{n+1}`.
    pub fn eval(&self, order: usize) -> BesselEval<f64> {
        let nz = Complex::new(order as f64, 0.0) / self.argument;
        let jp = self.j[order].scale(nz) - self.j[order + 1];
        let yp = self.y[order].scale(nz) - self.y[order + 1];
        BesselEval { order: order as i64, argument: self.argument, j: self.j[order], y: self.y[order], jp, yp }
    }
}
