//! Continuous eigenvalues of the boundary integral operators on the circle.
//!
//! With `z = ka` (or `k̃a`), `J = J_q(z)`, `H = H_q^{(2)}(z)`:
//!
//! | operator | eigenvalue |
//! |---|---|
//! | `S` | `-(jπz/2) J H` |
//! | `D`, `D*` | `-(jπz/4)(J'H + JH')` |
//! | `N` | `(jπz/2) J'H'` |
//! | TM-MFIO `I/2 + D*` | `-(jπz/2) J'H` |
//! | TE-MFIO `I/2 - D` | `(jπz/2) JH'` |
//!
//! Calderón composites: TM-CCFIO `= N^{k̃}S^{k} + (TE-MFIO)^{k̃}(TM-MFIO)^{k}`,
//! TE-CCFIO `= S^{k̃}N^{k} + (TM-MFIO)^{k̃}(TE-MFIO)^{k}`.

use std::sync::OnceLock;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::{BesselEval, BesselTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    TM,
    TE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    SingleLayer,
    DoubleLayer,
    AdjDoubleLayer,
    Hypersingular,
    Identity,
    TmMfio,
    TeMfio,
    TmCefio,
    TmCmfio,
    TeCefio,
    TeCmfio,
    TmCcfio,
    TeCcfio,
    FilteredHypersingular,
}

impl Operator {
    pub const ALL: [Operator; 14] = [
        Operator::SingleLayer,
        Operator::DoubleLayer,
        Operator::AdjDoubleLayer,
        Operator::Hypersingular,
        Operator::Identity,
        Operator::TmMfio,
        Operator::TeMfio,
        Operator::TmCefio,
        Operator::TmCmfio,
        Operator::TeCefio,
        Operator::TeCmfio,
        Operator::TmCcfio,
        Operator::TeCcfio,
        Operator::FilteredHypersingular,
    ];

    /// Products and sums of other operators, evaluated at fixed wavenumbers.
    pub fn is_composite(self) -> bool {
        matches!(
            self,
            Operator::TmCefio | Operator::TmCmfio | Operator::TeCefio | Operator::TeCmfio | Operator::TmCcfio | Operator::TeCcfio
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::SingleLayer => "S",
            Operator::DoubleLayer => "D",
            Operator::AdjDoubleLayer => "Dstar",
            Operator::Hypersingular => "N",
            Operator::Identity => "I",
            Operator::TmMfio => "TM-MFIO",
            Operator::TeMfio => "TE-MFIO",
            Operator::TmCefio => "TM-CEFIO",
            Operator::TmCmfio => "TM-CMFIO",
            Operator::TeCefio => "TE-CEFIO",
            Operator::TeCmfio => "TE-CMFIO",
            Operator::TmCcfio => "TM-CCFIO",
            Operator::TeCcfio => "TE-CCFIO",
            Operator::FilteredHypersingular => "NF",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wavenumber {
    Physical,
    Complex,
}

/// Operator tag plus wavenumber choice.
///
/// `filtered` replaces every hypersingular factor (also inside composites)
/// by its band-limited version. Composites ignore `wavenumber`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorKind {
    pub op: Operator,
    pub wavenumber: Wavenumber,
    pub filtered: bool,
}

impl OperatorKind {
    pub fn new(op: Operator, wavenumber: Wavenumber) -> Self {
        OperatorKind { op, wavenumber, filtered: op == Operator::FilteredHypersingular }
    }

    pub fn physical(op: Operator) -> Self {
        Self::new(op, Wavenumber::Physical)
    }

    pub fn complex(op: Operator) -> Self {
        Self::new(op, Wavenumber::Complex)
    }

    pub fn with_filter(mut self) -> Self {
        self.filtered = true;
        self
    }

    fn at(self, op: Operator, wavenumber: Wavenumber) -> Self {
        OperatorKind { op, wavenumber, filtered: self.filtered }
    }

    /// Composite kinds as `[(a, b)]` products summed; base kinds return `None`.
    ///
    /// CEFIO/CMFIO/CCFIO discrete forms divide each product by the Gram eigenvalue.
    pub fn expand(self) -> Option<Vec<(OperatorKind, OperatorKind)>> {
        use Operator::*;
        use Wavenumber::{Complex as Kc, Physical as Kp};
        let n = if self.filtered { FilteredHypersingular } else { Hypersingular };
        let tm_cefio = (self.at(n, Kc), self.at(SingleLayer, Kp));
        let tm_cmfio = (self.at(TeMfio, Kc), self.at(TmMfio, Kp));
        let te_cefio = (self.at(SingleLayer, Kc), self.at(n, Kp));
        let te_cmfio = (self.at(TmMfio, Kc), self.at(TeMfio, Kp));
        match self.op {
            TmCefio => Some(vec![tm_cefio]),
            TmCmfio => Some(vec![tm_cmfio]),
            TeCefio => Some(vec![te_cefio]),
            TeCmfio => Some(vec![te_cmfio]),
            TmCcfio => Some(vec![tm_cefio, tm_cmfio]),
            TeCcfio => Some(vec![te_cefio, te_cmfio]),
            _ => None,
        }
    }

    pub fn label(self) -> String {
        let mut s = self.op.name().to_string();
        if self.filtered && self.op != Operator::FilteredHypersingular {
            s.push_str("_F");
        }
        if !self.op.is_composite() && self.wavenumber == Wavenumber::Complex {
            s.push_str("(k~)");
        }
        s
    }
}

/// Geometry, frequency and discretization of one problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConfig<T> {
    pub a: T,
    pub k: T,
    pub eta: T,
    /// Number of mesh elements (odd).
    pub n: usize,
    pub n_lambda: T,
    /// Aliasing harmonics `s ∈ [-S, S]` kept in discrete eigenvalues.
    pub harmonics: usize,
    /// Gauss-Legendre points per integration interval.
    pub quadrature: usize,
    /// Filter margin `ε` in `q_lim = ⌊(n_λ - 1 - ε) ka⌋`.
    pub epsilon: T,
}

/// Odd integer nearest to `x` (ties and even roundings go up), at least 3.
pub fn odd_mesh_count<T: Real>(x: T) -> usize {
    let r = x.round().to_usize().unwrap_or(3);
    let n = if r % 2 == 1 {
        r
    } else if T::of_int(r as i64) > x {
        r.saturating_sub(1)
    } else {
        r + 1
    };
    n.max(3)
}

impl<T: Real> ProblemConfig<T> {
    /// `N` is the odd integer nearest to `n_λ ka`; `S = 1`, 100-point
    /// quadrature and `ε = 0.1` by default.
    pub fn new(a: T, k: T, eta: T, n_lambda: T) -> Result<Self> {
        if !(a > T::zero() && k > T::zero() && eta > T::zero() && n_lambda > T::one()) {
            return Err(Error::InvalidConfig(format!("need a, k, η > 0 and n_λ > 1 (a = {a}, k = {k}, η = {eta}, n_λ = {n_lambda})")));
        }
        Ok(ProblemConfig {
            a,
            k,
            eta,
            n: odd_mesh_count(n_lambda * k * a),
            n_lambda,
            harmonics: 1,
            quadrature: 100,
            epsilon: T::lit(0.1),
        })
    }

    /// Unit radius, unit impedance, given `ka`.
    pub fn from_ka(ka: T, n_lambda: T) -> Result<Self> {
        Self::new(T::one(), ka, T::one(), n_lambda)
    }

    pub fn with_mesh(mut self, n: usize) -> Result<Self> {
        if n % 2 == 0 || n < 3 {
            return Err(Error::InvalidConfig(format!("mesh count {n} must be odd and at least 3")));
        }
        self.n = n;
        Ok(self)
    }

    pub fn with_harmonics(mut self, s: usize) -> Self {
        self.harmonics = s;
        self
    }

    pub fn with_quadrature(mut self, q: usize) -> Self {
        self.quadrature = q;
        self
    }

    pub fn with_epsilon(mut self, eps: T) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn ka(&self) -> T {
        self.k * self.a
    }

    /// Element arc length `2πa/N`.
    pub fn h(&self) -> T {
        T::TAU() * self.a / T::of_int(self.n as i64)
    }

    /// Largest retained mode index `(N-1)/2`.
    pub fn max_mode(&self) -> i64 {
        (self.n as i64 - 1) / 2
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let m = self.max_mode();
        -m..=m
    }

    pub fn complex_wavenumber(&self) -> Complex<T> {
        complex_wavenumber(self)
    }

    pub fn wavenumber(&self, w: Wavenumber) -> Complex<T> {
        match w {
            Wavenumber::Physical => Complex::new(self.k, T::zero()),
            Wavenumber::Complex => self.complex_wavenumber(),
        }
    }

    /// `q_lim = ⌊(n_λ - 1 - ε) ka⌋`.
    pub fn filter_cutoff(&self) -> i64 {
        ((self.n_lambda - T::one() - self.epsilon) * self.ka()).floor().to_i64().unwrap_or(0)
    }
}

/// `k̃ = k - 0.4j k^{1/3} a^{-2/3}`.
pub fn complex_wavenumber<T: Real>(cfg: &ProblemConfig<T>) -> Complex<T> {
    let im = T::lit(0.4) * cfg.k.cbrt() / (cfg.a.cbrt() * cfg.a.cbrt());
    Complex::new(cfg.k, -im)
}

/// Bessel tables at `ka` and `k̃a` covering every order an aliased sum needs.
#[derive(Debug)]
pub struct ModalContext<T> {
    cfg: ProblemConfig<T>,
    max_order: usize,
    physical: OnceLock<std::result::Result<BesselTable<T>, Error>>,
    complex: OnceLock<std::result::Result<BesselTable<T>, Error>>,
}

impl<T: Real> ModalContext<T> {
    pub fn new(cfg: ProblemConfig<T>) -> Self {
        let max_order = (cfg.max_mode() as usize) + cfg.harmonics * cfg.n + 1;
        ModalContext { cfg, max_order, physical: OnceLock::new(), complex: OnceLock::new() }
    }

    pub fn config(&self) -> &ProblemConfig<T> {
        &self.cfg
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn table(&self, w: Wavenumber) -> Result<&BesselTable<T>> {
        let cell = match w {
            Wavenumber::Physical => &self.physical,
            Wavenumber::Complex => &self.complex,
        };
        let z = self.cfg.wavenumber(w) * self.cfg.a;
        cell.get_or_init(|| BesselTable::new(z, self.max_order)).as_ref().map_err(|e| e.clone())
    }

    pub fn bessel(&self, w: Wavenumber, q: i64) -> Result<BesselEval<T>> {
        self.table(w)?.eval(q)
    }

    /// Closed-form continuous eigenvalue.
    pub fn continuous(&self, kind: OperatorKind, q: i64) -> Result<Complex<T>> {
        use Operator::*;
        if let Some(parts) = kind.expand() {
            let mut sum = Complex::zero();
            for (x, y) in parts {
                sum = sum + self.continuous(x, q)? * self.continuous(y, q)?;
            }
            return Ok(sum);
        }
        let op = if kind.filtered && kind.op == Hypersingular { FilteredHypersingular } else { kind.op };
        if op == Identity {
            return Ok(Complex::new(T::one(), T::zero()));
        }
        if op == FilteredHypersingular && q.abs() > self.cfg.filter_cutoff() {
            return Ok(Complex::zero());
        }
        let b = self.bessel(kind.wavenumber, q)?;
        let z = b.argument;
        let jz = Complex::new(T::zero(), T::one()) * z;
        let half_pi = T::FRAC_PI_2();
        let v = match op {
            SingleLayer => (b.j * b.h()).scale(-jz * half_pi),
            DoubleLayer | AdjDoubleLayer => (b.jp * b.h() + b.j * b.hp()).scale(-jz * T::FRAC_PI_4()),
            Hypersingular | FilteredHypersingular => (b.jp * b.hp()).scale(jz * half_pi),
            TmMfio => (b.jp * b.h()).scale(-jz * half_pi),
            TeMfio => (b.j * b.hp()).scale(jz * half_pi),
            _ => unreachable!("composites expanded above"),
        };
        Ok(v.to_complex())
    }

    /// Continuous values over the retained band.
    pub fn spectrum(&self, kind: OperatorKind) -> Result<SpectrumView<T>> {
        let values = self.cfg.modes().map(|q| self.continuous(kind, q)).collect::<Result<Vec<_>>>()?;
        Ok(SpectrumView { config: self.cfg, kind, values })
    }

    /// `(|J_q/H_q|, |J'_q/H'_q|)` minimized over `0 <= q < ka`.
    pub fn resonance_proximity(&self) -> Result<(T, T)> {
        let ka = self.cfg.ka();
        let mut mj = T::infinity();
        let mut mjp = T::infinity();
        let mut q = 0i64;
        while T::of_int(q) < ka {
            let b = self.bessel(Wavenumber::Physical, q)?;
            mj = mj.min((b.j / b.h()).to_complex().norm());
            mjp = mjp.min((b.jp / b.hp()).to_complex().norm());
            q += 1;
        }
        Ok((mj, mjp))
    }

    pub fn is_masked(&self, rule: MaskRule<T>) -> Result<bool> {
        match rule {
            MaskRule::Off => Ok(false),
            MaskRule::Normalized { threshold } => {
                let (a, b) = self.resonance_proximity()?;
                Ok(a < threshold || b < threshold)
            }
            MaskRule::Absolute { threshold, margin } => {
                let ka = self.cfg.ka();
                let mut q = 0i64;
                while T::of_int(q) <= ka + T::of_int(margin) {
                    let b = self.bessel(Wavenumber::Physical, q)?;
                    if b.j.to_complex().norm() < threshold || b.jp.to_complex().norm() < threshold {
                        return Ok(true);
                    }
                    q += 1;
                }
                Ok(false)
            }
        }
    }
}

/// Continuous eigenvalue for a single mode (builds its own Bessel tables).
pub fn continuous_eigenvalue<T: Real>(kind: OperatorKind, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    let mut c = *cfg;
    c.harmonics = 0;
    c.n = c.n.max(2 * q.unsigned_abs() as usize + 1);
    ModalContext::new(c).continuous(kind, q)
}

/// Rule deciding whether a frequency sample sits near an interior resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskRule<T> {
    Off,
    /// `min_{0<=q<ka} |J_q/H_q|` or `|J'_q/H'_q|` below `threshold`: the
    /// eigenvalues of `S`, `N` and the MFIOs, relative to their envelope.
    Normalized { threshold: T },
    /// `min_{|q| <= ka + margin} |J_q(ka)|` or `|J'_q(ka)|` below `threshold`.
    /// Orders above `ka` decay, so this flags almost every sample once
    /// `margin` reaches a few units.
    Absolute { threshold: T, margin: i64 },
}

impl<T: Real> MaskRule<T> {
    pub fn standard() -> Self {
        MaskRule::Normalized { threshold: T::lit(1e-3) }
    }
}

/// Per-mode eigenvalues over `q ∈ [-(N-1)/2, (N-1)/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumView<T> {
    pub config: ProblemConfig<T>,
    pub kind: OperatorKind,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> SpectrumView<T> {
    pub fn get(&self, q: i64) -> Complex<T> {
        self.values[(q + self.config.max_mode()) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.config.modes().zip(self.values.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Hyperbolic,
    Transition,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Re,
    Im,
    Abs,
}

/// Growth exponent in `ka` (in `q` for the elliptic region) of eigenvalues.
pub fn asymptotic_slope(kind: OperatorKind, region: Region, part: Part) -> Result<Rational64> {
    use Operator::*;
    use Part::*;
    use Region::*;
    let r = |n: i64, d: i64| Ok(Rational64::new(n, d));
    let missing = || Err(Error::NotTabulated(format!("{} / {region:?} / {part:?}", kind.label())));
    match (kind.op, region, part) {
        (Identity, _, _) => r(0, 1),
        (SingleLayer, Hyperbolic, Abs) => r(0, 1),
        (SingleLayer, Transition, Abs) => r(1, 3),
        (SingleLayer, Elliptic, Abs) => r(-1, 1),
        (Hypersingular, Hyperbolic, Abs) => r(0, 1),
        (Hypersingular, Transition, Abs) => r(-1, 3),
        (Hypersingular, Elliptic, Abs) => r(1, 1),
        (DoubleLayer | AdjDoubleLayer, Hyperbolic, Abs) => r(0, 1),
        (DoubleLayer | AdjDoubleLayer, Transition, Re) => r(-2, 3),
        (DoubleLayer | AdjDoubleLayer, Transition, Im | Abs) => r(0, 1),
        (DoubleLayer | AdjDoubleLayer, Elliptic, Abs) => r(-3, 1),
        (TmMfio | TeMfio | TmCefio | TmCmfio | TeCefio | TeCmfio | TmCcfio | TeCcfio, Hyperbolic | Transition, Abs) => r(0, 1),
        (FilteredHypersingular, Hyperbolic | Transition, Abs) => r(0, 1),
        _ => missing(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_oracle;

    fn cfg(ka: f64) -> ProblemConfig<f64> {
        ProblemConfig::from_ka(ka, 4.0).unwrap()
    }

    #[test]
    fn complex_wavenumber_examples() {
        let c = ProblemConfig::new(1.0, 1.0, 1.0, 4.0).unwrap();
        assert!((complex_wavenumber(&c) - Complex::new(1.0, -0.4)).norm() < 1e-15);
        let c = ProblemConfig::new(1.0, 8.0, 1.0, 4.0).unwrap();
        assert!((complex_wavenumber(&c) - Complex::new(8.0, -0.8)).norm() < 1e-15);
        let c = ProblemConfig::new(8.0, 1.0, 1.0, 4.0).unwrap();
        assert!((complex_wavenumber(&c) - Complex::new(1.0, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn mesh_count_is_nearest_odd() {
        assert_eq!(cfg(10.0).n, 41);
        assert_eq!(odd_mesh_count(41.6f64), 41);
        assert_eq!(odd_mesh_count(42.4f64), 43);
        assert_eq!(odd_mesh_count(15.0f64), 15);
        let c = cfg(123.4);
        assert!((c.n as f64 - 4.0 * 123.4).abs() <= 1.0);
    }

    #[test]
    fn identity_is_one() {
        let ctx = ModalContext::new(cfg(3.0));
        assert_eq!(ctx.continuous(OperatorKind::physical(Operator::Identity), 4).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn single_layer_against_oracle() {
        let o = bessel_oracle(0, Complex::new(1.0, 0.0), 30).unwrap().to_eval();
        let expect = (o.j * o.h()).to_complex() * Complex::new(0.0, -std::f64::consts::FRAC_PI_2);
        let got = continuous_eigenvalue(OperatorKind::physical(Operator::SingleLayer), 0, &cfg(1.0)).unwrap();
        assert!((got - expect).norm() < 1e-14 * expect.norm());
    }

    #[test]
    fn mfio_equals_half_plus_minus_double_layer() {
        let ctx = ModalContext::new(cfg(7.5));
        for w in [Wavenumber::Physical, Wavenumber::Complex] {
            for q in [0i64, 3, 7, 12] {
                let d = ctx.continuous(OperatorKind::new(Operator::DoubleLayer, w), q).unwrap();
                let tm = ctx.continuous(OperatorKind::new(Operator::TmMfio, w), q).unwrap();
                let te = ctx.continuous(OperatorKind::new(Operator::TeMfio, w), q).unwrap();
                assert!((tm - (d + 0.5)).norm() < 1e-12, "{w:?} {q}");
                assert!((te - (-d + 0.5)).norm() < 1e-12, "{w:?} {q}");
            }
        }
    }

    #[test]
    fn ccfio_decomposition_is_exact() {
        let ctx = ModalContext::new(cfg(12.3));
        let ctx = &ctx;
        let ev = |op, w| move |q| ctx.continuous(OperatorKind::new(op, w), q).unwrap();
        for q in -20..=20 {
            let lhs = ctx.continuous(OperatorKind::physical(Operator::TmCcfio), q).unwrap();
            let rhs = ev(Operator::Hypersingular, Wavenumber::Complex)(q) * ev(Operator::SingleLayer, Wavenumber::Physical)(q)
                + ev(Operator::TeMfio, Wavenumber::Complex)(q) * ev(Operator::TmMfio, Wavenumber::Physical)(q);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn modulus_depends_on_order_magnitude() {
        let ctx = ModalContext::new(cfg(9.0));
        for op in Operator::ALL {
            for w in [Wavenumber::Physical, Wavenumber::Complex] {
                let k = OperatorKind::new(op, w);
                for q in 1..15 {
                    let a = ctx.continuous(k, q).unwrap().norm();
                    let b = ctx.continuous(k, -q).unwrap().norm();
                    assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{} {q}", k.label());
                }
            }
        }
    }

    #[test]
    fn filtered_hypersingular_zero_beyond_cutoff() {
        let c = cfg(10.0);
        let ql = c.filter_cutoff();
        assert_eq!(ql, 29);
        let ctx = ModalContext::new(c);
        let f = OperatorKind::physical(Operator::FilteredHypersingular);
        let n = OperatorKind::physical(Operator::Hypersingular);
        assert_eq!(ctx.continuous(f, ql + 1).unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(ctx.continuous(f, ql).unwrap(), ctx.continuous(n, ql).unwrap());
    }

    #[test]
    fn slope_table() {
        let k = OperatorKind::physical;
        assert_eq!(asymptotic_slope(k(Operator::SingleLayer), Region::Transition, Part::Abs).unwrap(), Rational64::new(1, 3));
        assert_eq!(asymptotic_slope(k(Operator::Hypersingular), Region::Elliptic, Part::Abs).unwrap(), Rational64::new(1, 1));
        assert_eq!(asymptotic_slope(k(Operator::Identity), Region::Hyperbolic, Part::Abs).unwrap(), Rational64::new(0, 1));
        assert_eq!(asymptotic_slope(k(Operator::DoubleLayer), Region::Elliptic, Part::Abs).unwrap(), Rational64::new(-3, 1));
        assert!(matches!(
            asymptotic_slope(k(Operator::FilteredHypersingular), Region::Elliptic, Part::Abs),
            Err(Error::NotTabulated(_))
        ));
    }

    #[test]
    fn absolute_mask_rule_flags_nearly_everything() {
        let rule = MaskRule::Absolute { threshold: 0.02, margin: 10 };
        let flagged = (0..10).filter(|i| ModalContext::new(cfg(30.0 + 7.3 * *i as f64)).is_masked(rule).unwrap()).count();
        assert_eq!(flagged, 10);
    }
}
