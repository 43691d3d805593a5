//! Current and scattering errors of the discrete solutions.
//!
//! With `Û_q` the modes of the discrete current and `U_q` the exact ones,
//! `υ_q = Û_q/U_q - 1` and `ρ_q = F_q(υ_q + 1) - 1`. The predicted engine
//! evaluates `υ_q` in closed form from the discrete spectra; the numerical
//! engine reads `Û_q` off the assembled BEM solution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::bem::{spectral_condition, BemModel, Formulation};
use crate::discretization::{discrete_eigenvalue_in, hazard, pyramid_fourier_coeff, spectral_error_in};
use crate::error::{Error, Result};
use crate::excitation::ModalSolution;
use crate::real::Real;
use crate::spectra::{MaskRule, ModalContext, Operator, OperatorKind, Polarization, ProblemConfig, Wavenumber};

/// Source of the discrete solution modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Predicted,
    Numerical,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Predicted => "predicted",
            Engine::Numerical => "numerical",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "predicted" => Ok(Engine::Predicted),
            "numerical" => Ok(Engine::Numerical),
            _ => Err(Error::InvalidConfig(format!("unknown engine `{s}`"))),
        }
    }
}

/// Current-error norms plus the far-field error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    L2,
    Hs,
    Hsk,
    P,
    ScatteringL2,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::L2, Measure::Hs, Measure::Hsk, Measure::P, Measure::ScatteringL2];
    /// Current norms swept by default; `P` is opt-in.
    pub const CURRENT: [Measure; 3] = [Measure::L2, Measure::Hs, Measure::Hsk];

    pub fn name(self) -> &'static str {
        match self {
            Measure::L2 => "L2",
            Measure::Hs => "Hs",
            Measure::Hsk => "Hsk",
            Measure::P => "P",
            Measure::ScatteringL2 => "S_L2",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Measure::ALL
            .iter()
            .copied()
            .find(|m| m.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown measure `{s}`")))
    }
}

/// Error measures of one formulation at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<T> {
    pub formulation: Formulation,
    pub engine: Engine,
    pub ka: T,
    pub measures: BTreeMap<Measure, T>,
    pub masked: bool,
}

/// Per-mode exact data and discrete deviations over `|q| <= (N-1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub formulation: Formulation,
    pub config: ProblemConfig<T>,
    pub u: Vec<Complex<T>>,
    pub r: Vec<Complex<T>>,
    /// `Û_q - U_q`.
    pub du: Vec<Complex<T>>,
    /// `R̂_q - R_q`.
    pub dr: Vec<Complex<T>>,
    pub upsilon: Vec<Complex<T>>,
    pub rho: Vec<Complex<T>>,
    /// `U_q J_q(ka)` (TM) or `U_q J'_q(ka)` (TE).
    pub uj: Vec<Complex<T>>,
    /// `α_q = (kηπa/2) J_q H_q` (TM) or `(kηπa/2) J'_q H'_q` (TE).
    pub alpha: Vec<Complex<T>>,
}

impl<T: Real> Coefficients<T> {
    fn exponent(&self) -> T {
        match self.formulation.polarization() {
            Polarization::TM => -T::lit(0.5),
            Polarization::TE => T::lit(0.5),
        }
    }

    /// `(Σ|ΔU_q|² w_q / Σ|U_q|² w_q)^{1/2}`; `P` takes the modulus of the
    /// complex quotient before the root.
    pub fn current_error(&self, norm: Measure) -> Result<T> {
        if norm == Measure::ScatteringL2 {
            return self.scattering_error();
        }
        let s = self.exponent();
        let k2 = self.config.k * self.config.k;
        let mut num = Complex::<T>::zero();
        let mut den = Complex::<T>::zero();
        for (i, q) in self.config.modes().enumerate() {
            let q2 = T::of_int(q * q);
            let w = match norm {
                Measure::L2 => Complex::one(),
                Measure::Hs => Complex::new((T::one() + q2).powf(s), T::zero()),
                Measure::Hsk => Complex::new((k2 + q2).powf(s), T::zero()),
                Measure::P => self.alpha[i],
                Measure::ScatteringL2 => unreachable!(),
            };
            num = num + w * self.du[i].norm_sqr();
            den = den + w * self.u[i].norm_sqr();
        }
        quotient_root(num, den)
    }

    /// `(Σ|R_q ρ_q|² / Σ|R_q|²)^{1/2}`.
    pub fn scattering_error(&self) -> Result<T> {
        let num: T = self.dr.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
        let den: T = self.r.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
        quotient_root(Complex::new(num, T::zero()), Complex::new(den, T::zero()))
    }

    /// Same measure written with `U_q J_q` (or `U_q J'_q`) in place of `R_q`.
    pub fn scattering_error_via_current(&self) -> Result<T> {
        let mut num = T::zero();
        let mut den = T::zero();
        for (uj, rho) in self.uj.iter().zip(&self.rho) {
            num = num + (*uj * *rho).norm_sqr();
            den = den + uj.norm_sqr();
        }
        quotient_root(Complex::new(num, T::zero()), Complex::new(den, T::zero()))
    }
}

fn quotient_root<T: Real>(num: Complex<T>, den: Complex<T>) -> Result<T> {
    if den.is_zero() {
        return Err(Error::EmptySpectrum);
    }
    Ok((num / den).norm().sqrt())
}

/// Error analysis of one problem instance, sharing Bessel tables and
/// assembled matrices across formulations.
#[derive(Debug)]
pub struct Analysis<T> {
    ctx: ModalContext<T>,
    filtered: OnceLock<ModalContext<T>>,
    model: BemModel<T>,
}

impl<T: Real> Analysis<T> {
    pub fn new(cfg: ProblemConfig<T>) -> Self {
        Analysis { ctx: ModalContext::new(cfg), filtered: OnceLock::new(), model: BemModel::new(cfg) }
    }

    pub fn config(&self) -> &ProblemConfig<T> {
        self.ctx.config()
    }

    pub fn context(&self) -> &ModalContext<T> {
        &self.ctx
    }

    pub fn model(&self) -> &BemModel<T> {
        &self.model
    }

    /// Context for band-limited operators: enough harmonics that every
    /// order up to the cutoff enters the aliased sums.
    fn context_for(&self, f: Formulation) -> &ModalContext<T> {
        if !f.is_filtered() {
            return &self.ctx;
        }
        self.filtered.get_or_init(|| {
            let mut c = *self.ctx.config();
            let need = c.filter_cutoff().max(0) as usize / c.n + 2;
            c.harmonics = c.harmonics.max(need);
            ModalContext::new(c)
        })
    }

    fn singular(&self, q: i64) -> Error {
        Error::SingularMode { q, ka: self.config().ka().to_f64().unwrap_or(f64::NAN) }
    }

    fn guard(&self, v: Complex<T>, q: i64) -> Result<Complex<T>> {
        if v.norm() < hazard::<T>() || !(v.re.is_finite() && v.im.is_finite()) {
            return Err(self.singular(q));
        }
        Ok(v)
    }

    /// `[F_q(1 - F_q) - E^A_q] / (1 + E_q)` for the direct equation of `kind`.
    fn upsilon_direct(&self, ctx: &ModalContext<T>, kind: OperatorKind, q: i64) -> Result<Complex<T>> {
        let f = pyramid_fourier_coeff::<T>(q, ctx.config().n);
        let e = spectral_error_in(ctx, kind, q).map_err(|e| match e {
            Error::DivisionHazard { .. } => self.singular(q),
            other => other,
        })?;
        let den = self.guard(e.total + T::one(), q)?;
        Ok((Complex::new(f * (T::one() - f), T::zero()) - e.aliasing) / den)
    }

    /// `F_q λ_q / λ̂_q - 1`, with `λ_q` from the unfiltered operator (the
    /// right-hand side always carries the true field).
    fn upsilon_ratio(&self, ctx: &ModalContext<T>, kind: OperatorKind, q: i64) -> Result<Complex<T>> {
        let f = pyramid_fourier_coeff::<T>(q, ctx.config().n);
        let lam = ctx.continuous(OperatorKind { filtered: false, ..kind }, q)?;
        let lam_hat = self.guard(discrete_eigenvalue_in(ctx, kind, q)?, q)?;
        Ok(lam * f / lam_hat - Complex::one())
    }

    fn upsilon_factor(&self, ctx: &ModalContext<T>, kind: OperatorKind, q: i64) -> Result<Complex<T>> {
        if kind.filtered {
            self.upsilon_ratio(ctx, kind, q)
        } else {
            self.upsilon_direct(ctx, kind, q)
        }
    }

    /// Predicted `υ_q`. Calderón forms average the `υ` of their physical
    /// factors, weighted by the discrete eigenvalues of the two products.
    pub fn upsilon(&self, f: Formulation, q: i64) -> Result<Complex<T>> {
        let ctx = self.context_for(f);
        let kind = f.system_kind();
        if f == Formulation::TeEfieF && q.abs() > ctx.config().filter_cutoff() {
            return Ok(-Complex::one());
        }
        let Some(parts) = kind.expand() else {
            return self.upsilon_factor(ctx, kind, q);
        };
        let g = self.guard(discrete_eigenvalue_in(ctx, OperatorKind::physical(Operator::Identity), q)?, q)?;
        let mut num = Complex::<T>::zero();
        let mut den = Complex::<T>::zero();
        for (x, y) in parts {
            let w = discrete_eigenvalue_in(ctx, x, q)? * discrete_eigenvalue_in(ctx, y, q)? / g;
            num = num + w * self.upsilon_factor(ctx, y, q)?;
            den = den + w;
        }
        Ok(num / self.guard(den, q)?)
    }

    /// Unfiltered Calderón `υ_q` through the Bessel-product weights
    /// `J'_q(k̃a)J_q(ka)` and `J_q(k̃a)J'_q(ka)` (TM; roles swap for TE).
    pub fn upsilon_two_term(&self, f: Formulation, q: i64) -> Result<Complex<T>> {
        use Operator::*;
        let ctx = &self.ctx;
        let one = Complex::<T>::one();
        let fq = pyramid_fourier_coeff::<T>(q, ctx.config().n);
        let bc = ctx.bessel(Wavenumber::Complex, q)?;
        let bp = ctx.bessel(Wavenumber::Physical, q)?;
        let e = |kind: OperatorKind| -> Result<Complex<T>> { Ok(spectral_error_in(ctx, kind, q)?.total + one) };
        let ei = e(OperatorKind::physical(Identity))?;
        let (pa, pb, ea, eb) = match f {
            Formulation::TmCcfie => (
                bc.jp * bp.j,
                bc.j * bp.jp,
                (e(OperatorKind::complex(Hypersingular))?, e(OperatorKind::physical(SingleLayer))?),
                (e(OperatorKind::complex(TeMfio))?, e(OperatorKind::physical(TmMfio))?),
            ),
            Formulation::TeCcfie => (
                bc.j * bp.jp,
                bc.jp * bp.j,
                (e(OperatorKind::complex(SingleLayer))?, e(OperatorKind::physical(Hypersingular))?),
                (e(OperatorKind::complex(TmMfio))?, e(OperatorKind::physical(TeMfio))?),
            ),
            other => return Err(Error::InvalidConfig(format!("{other} is not an unfiltered Calderón formulation"))),
        };
        let total = pa + pb;
        let a = (pa / total).to_complex() * ea.0 * ea.1 / ei;
        let b = (pb / total).to_complex() * eb.0 * eb.1 / ei;
        let den = self.guard(a + b, q)?;
        Ok((a * (ea.1.inv() * fq - one) + b * (eb.1.inv() * fq - one)) / den)
    }

    /// `ρ_q = F_q(υ_q + 1) - 1`.
    pub fn rho(&self, f: Formulation, q: i64) -> Result<Complex<T>> {
        let fq = pyramid_fourier_coeff::<T>(q, self.config().n);
        Ok((self.upsilon(f, q)? + T::one()) * fq - Complex::one())
    }

    /// Exact data plus the discrete deviations of either engine.
    pub fn coefficients(&self, f: Formulation, engine: Engine) -> Result<Coefficients<T>> {
        let cfg = *self.config();
        let pol = f.polarization();
        let exact = ModalSolution::exact(&self.ctx, pol)?;
        let (upsilon, uhat): (Vec<Complex<T>>, _) = match engine {
            Engine::Predicted => (cfg.modes().map(|q| self.upsilon(f, q)).collect::<Result<_>>()?, None),
            Engine::Numerical => {
                let uhat = self.model.solve_modes(f)?;
                let ups = uhat.iter().zip(&exact.u).map(|(uh, u)| if u.is_zero() { Complex::zero() } else { *uh / *u - Complex::one() }).collect();
                (ups, Some(uhat))
            }
        };
        let scale = cfg.k * cfg.eta * T::PI() * cfg.a / T::lit(2.0);
        let mut c = Coefficients {
            formulation: f,
            config: cfg,
            u: exact.u.clone(),
            r: exact.r.clone(),
            du: Vec::with_capacity(cfg.n),
            dr: Vec::with_capacity(cfg.n),
            upsilon,
            rho: Vec::with_capacity(cfg.n),
            uj: Vec::with_capacity(cfg.n),
            alpha: Vec::with_capacity(cfg.n),
        };
        for (i, q) in cfg.modes().enumerate() {
            let fq = pyramid_fourier_coeff::<T>(q, cfg.n);
            let rho = (c.upsilon[i] + T::one()) * fq - Complex::one();
            c.du.push(match &uhat {
                Some(uh) => uh[i] - c.u[i],
                None => c.u[i] * c.upsilon[i],
            });
            c.dr.push(c.r[i] * rho);
            c.rho.push(rho);
            let b = self.ctx.bessel(Wavenumber::Physical, q)?;
            let (jj, prod) = match pol {
                Polarization::TM => (b.j, b.j * b.h()),
                Polarization::TE => (b.jp, b.jp * b.hp()),
            };
            c.uj.push(c.u[i] * jj.to_complex());
            c.alpha.push(prod.to_complex() * scale);
        }
        Ok(c)
    }

    pub fn current_error(&self, f: Formulation, engine: Engine, norm: Measure) -> Result<T> {
        self.coefficients(f, engine)?.current_error(norm)
    }

    pub fn scattering_error(&self, f: Formulation, engine: Engine) -> Result<T> {
        self.coefficients(f, engine)?.scattering_error()
    }

    pub fn is_masked(&self) -> Result<bool> {
        self.ctx.is_masked(MaskRule::standard())
    }

    /// All requested measures of one formulation.
    pub fn report(&self, f: Formulation, engine: Engine, measures: &[Measure]) -> Result<ErrorReport<T>> {
        let c = self.coefficients(f, engine)?;
        let mut out = BTreeMap::new();
        for &m in measures {
            out.insert(m, c.current_error(m)?);
        }
        Ok(ErrorReport { formulation: f, engine, ka: self.config().ka(), measures: out, masked: self.is_masked()? })
    }

    /// `max|λ̂| / min|λ̂|` of the system over the solved modes.
    pub fn condition_number(&self, f: Formulation, engine: Engine) -> Result<T> {
        match engine {
            Engine::Numerical => self.model.condition_number(f),
            Engine::Predicted => {
                let ctx = self.context_for(f);
                let cut = ctx.config().filter_cutoff();
                let kind = f.system_kind();
                let values = self
                    .config()
                    .modes()
                    .filter(|q| f != Formulation::TeEfieF || q.abs() <= cut)
                    .map(|q| Ok((q, discrete_eigenvalue_in(ctx, kind, q)?)))
                    .collect::<Result<Vec<_>>>()?;
                spectral_condition(values.into_iter(), self.config().ka())
            }
        }
    }
}

pub fn upsilon<T: Real>(f: Formulation, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    Analysis::new(*cfg).upsilon(f, q)
}

pub fn rho<T: Real>(f: Formulation, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    Analysis::new(*cfg).rho(f, q)
}

pub fn current_error<T: Real>(f: Formulation, cfg: &ProblemConfig<T>, norm: Measure) -> Result<T> {
    Analysis::new(*cfg).current_error(f, Engine::Predicted, norm)
}

pub fn scattering_error<T: Real>(f: Formulation, cfg: &ProblemConfig<T>) -> Result<T> {
    Analysis::new(*cfg).scattering_error(f, Engine::Predicted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(Error::InvalidConfig(format!("unknown spacing `{s}`"))),
        }
    }
}

/// Sample points in `[start, stop]`. A point within 0.05 of an integer is
/// moved 0.1 toward the interior, so `q = ka` never coincides with a mode.
pub fn ka_grid<T: Real>(start: T, stop: T, points: usize, spacing: Spacing) -> Result<Vec<T>> {
    if points < 2 || !(start > T::zero()) || !(stop > start) {
        return Err(Error::InvalidConfig(format!("ka grid needs 0 < start < stop and >= 2 points, got [{start}, {stop}] x {points}")));
    }
    let last = T::of_int(points as i64 - 1);
    let near = T::lit(0.05);
    let step = T::lit(0.1);
    let mut grid: Vec<T> = (0..points)
        .map(|i| {
            let t = T::of_int(i as i64) / last;
            let x = match spacing {
                Spacing::Linear => start + (stop - start) * t,
                Spacing::Log => start * (stop / start).powf(t),
            };
            if (x - x.round()).abs() >= near {
                x
            } else if x + step <= stop {
                x + step
            } else {
                x - step
            }
        })
        .collect();
    // A point pushed down near `stop` can pass its neighbour on fine grids.
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(grid)
}

/// Fewest unmasked points a slope fit accepts.
pub const MIN_FIT_POINTS: usize = 12;

/// Least-squares slope of `ln value` against `ln ka` over the unmasked
/// points, with its standard error.
pub fn fit_slope<T: Real>(series: &[(T, T)], mask: &[bool]) -> Result<(T, T)> {
    if series.len() != mask.len() {
        return Err(Error::InvalidConfig(format!("{} points but {} mask flags", series.len(), mask.len())));
    }
    let mut pts = Vec::with_capacity(series.len());
    for (&(x, y), &m) in series.iter().zip(mask) {
        if m {
            continue;
        }
        if !(x > T::zero() && y > T::zero() && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("log-log fit needs positive finite data, got ({x}, {y})")));
        }
        pts.push((x.ln(), y.ln()));
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { found: pts.len(), needed: MIN_FIT_POINTS });
    }
    let n = T::of_int(pts.len() as i64);
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    if sxx.is_zero() {
        return Err(Error::Domain("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let ssr = pts.iter().fold(T::zero(), |a, p| {
        let r = p.1 - my - slope * (p.0 - mx);
        a + r * r
    });
    let stderr = (ssr / (n - T::lit(2.0)) / sxx).sqrt();
    Ok((slope, stderr))
}

#[cfg(test)]
mod tests;
