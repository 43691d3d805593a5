//! Mie data for the plane wave `e^{-jkx}` incident on the cylinder.
//!
//! Mode convention: a function on the boundary is `Σ_q c_q e^{-jqφ}`.

use num_complex::Complex;

use crate::discretization::pyramid_fourier_coeff;
use crate::error::Result;
use crate::real::{Real, Scaled};
use crate::spectra::{ModalContext, Polarization, ProblemConfig, Wavenumber};
use crate::specfun::{BesselEval, BesselTable};

/// Incident field component sampled on the boundary.
///
/// Normalized so that the modes are `j^{-q} J_q(ka)` (`Ez`),
/// `j^{-q} J'_q(ka)` (`Et`), and `1/(jη)` times those (`Hz`, `Ht`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Ez,
    Ht,
    Et,
    Hz,
}

/// `j^{n}`.
pub fn j_pow<T: Real>(n: i64) -> Complex<T> {
    match n.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

fn one_over_j_eta<T: Real>(eta: T) -> Complex<T> {
    Complex::new(T::zero(), -T::one() / eta)
}

fn bessel_at<T: Real>(q: i64, cfg: &ProblemConfig<T>) -> Result<BesselEval<T>> {
    BesselTable::new(Complex::new(cfg.ka(), T::zero()), q.unsigned_abs() as usize)?.eval(q)
}

fn current_from<T: Real>(b: &BesselEval<T>, pol: Polarization, q: i64, eta: T) -> Complex<T> {
    let c = j_pow::<T>(-q) * (T::lit(2.0) / (T::PI() * eta)) / b.argument;
    let den = match pol {
        Polarization::TM => b.h(),
        Polarization::TE => b.hp(),
    };
    (Scaled::from_complex(c) / den).to_complex()
}

fn scattering_from<T: Real>(b: &BesselEval<T>, pol: Polarization) -> Complex<T> {
    match pol {
        Polarization::TM => (b.j / b.h()).to_complex(),
        Polarization::TE => (b.jp / b.hp()).to_complex(),
    }
}

fn rhs_from<T: Real>(b: &BesselEval<T>, field: Field, q: i64, n: usize, eta: T) -> Complex<T> {
    let f = pyramid_fourier_coeff::<T>(q, n);
    let base = match field {
        Field::Ez | Field::Hz => b.j,
        Field::Et | Field::Ht => b.jp,
    };
    let scale = match field {
        Field::Ez | Field::Et => Complex::new(T::one(), T::zero()),
        Field::Hz | Field::Ht => one_over_j_eta(eta),
    };
    base.scale(j_pow::<T>(-q) * scale * f).to_complex()
}

/// `U_q^{TM} = 2 j^{-q} / (πη ka H_q(ka))`, `U_q^{TE}` with `H'_q`.
pub fn mie_current_coeff<T: Real>(pol: Polarization, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    Ok(current_from(&bessel_at(q, cfg)?, pol, q, cfg.eta))
}

/// `R_q^{TM} = J_q/H_q`, `R_q^{TE} = J'_q/H'_q` at `ka`.
pub fn mie_scattering_coeff<T: Real>(pol: Polarization, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    Ok(scattering_from(&bessel_at(q, cfg)?, pol))
}

/// Mode `q` of the incident field tested against the pyramids, including
/// the factor `F_q` (`= F_{-q}`).
pub fn rhs_modal_coeff<T: Real>(field: Field, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    Ok(rhs_from(&bessel_at(q, cfg)?, field, q, cfg.n, cfg.eta))
}

pub fn mie_current_coeff_in<T: Real>(ctx: &ModalContext<T>, pol: Polarization, q: i64) -> Result<Complex<T>> {
    Ok(current_from(&ctx.bessel(Wavenumber::Physical, q)?, pol, q, ctx.config().eta))
}

pub fn mie_scattering_coeff_in<T: Real>(ctx: &ModalContext<T>, pol: Polarization, q: i64) -> Result<Complex<T>> {
    Ok(scattering_from(&ctx.bessel(Wavenumber::Physical, q)?, pol))
}

pub fn rhs_modal_coeff_in<T: Real>(ctx: &ModalContext<T>, field: Field, q: i64) -> Result<Complex<T>> {
    let cfg = ctx.config();
    Ok(rhs_from(&ctx.bessel(Wavenumber::Physical, q)?, field, q, cfg.n, cfg.eta))
}

/// Incident field on the boundary point at angle `phi`.
pub fn incident_field<T: Real>(field: Field, phi: T, cfg: &ProblemConfig<T>) -> Complex<T> {
    let c = phi.cos();
    let arg = -cfg.ka() * c;
    let wave = Complex::new(arg.cos(), arg.sin());
    match field {
        Field::Ez => wave,
        Field::Hz => wave * one_over_j_eta(cfg.eta),
        Field::Et => wave * Complex::new(T::zero(), -c),
        Field::Ht => wave * (-c / cfg.eta),
    }
}

/// Exact modes over the retained band, plus discrete counterparts once known.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSolution<T> {
    pub polarization: Polarization,
    pub config: ProblemConfig<T>,
    pub u: Vec<Complex<T>>,
    pub r: Vec<Complex<T>>,
    pub uhat: Option<Vec<Complex<T>>>,
    pub rhat: Option<Vec<Complex<T>>>,
}

impl<T: Real> ModalSolution<T> {
    pub fn exact(ctx: &ModalContext<T>, pol: Polarization) -> Result<Self> {
        let cfg = *ctx.config();
        let mut u = Vec::with_capacity(cfg.n);
        let mut r = Vec::with_capacity(cfg.n);
        for q in cfg.modes() {
            let b = ctx.bessel(Wavenumber::Physical, q)?;
            u.push(current_from(&b, pol, q, cfg.eta));
            r.push(scattering_from(&b, pol));
        }
        Ok(ModalSolution { polarization: pol, config: cfg, u, r, uhat: None, rhat: None })
    }

    fn index(&self, q: i64) -> usize {
        (q + self.config.max_mode()) as usize
    }

    pub fn u_at(&self, q: i64) -> Complex<T> {
        self.u[self.index(q)]
    }

    pub fn r_at(&self, q: i64) -> Complex<T> {
        self.r[self.index(q)]
    }

    /// Stores `Û_q` and the far-field modes `R̂_q = F_q R_q Û_q / U_q`.
    pub fn with_discrete(mut self, uhat: Vec<Complex<T>>) -> Self {
        assert_eq!(uhat.len(), self.u.len(), "one discrete mode per retained mode");
        let n = self.config.n;
        let rhat = self
            .config
            .modes()
            .zip(uhat.iter().zip(self.u.iter().zip(&self.r)))
            .map(|(q, (uh, (u, r)))| *r * (*uh / *u) * pyramid_fourier_coeff::<T>(q, n))
            .collect();
        self.uhat = Some(uhat);
        self.rhat = Some(rhat);
        self
    }
}
