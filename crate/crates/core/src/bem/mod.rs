//! Galerkin boundary elements on the uniform circular mesh with pyramid
//! basis functions, normalized as `O_{mn} = (1/h) ⟨f_m, O f_n⟩`.
//!
//! On the circle the kernels depend only on the arc-length offset `v`, so
//! the first row reduces to one-dimensional integrals
//! `O_{0n} = ∫ K(v) B(v/h + n) dv`, where `B` is the cubic B-spline (the
//! pyramid autocorrelation divided by `h`). The hypersingular operator uses
//! the integration-by-parts form
//! `⟨f_m, N f_n⟩ = (1/k) ∫∫ G [∂f_m ∂f_n - k² cos(φ-φ') f_m f_n]`, whose
//! derivative part has autocorrelation `-B''(v/h)/h`.
//!
//! Every matrix is circulant; solves are diagonal in the DFT basis.

mod quadrature;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::FftPlanner;

pub use quadrature::{Graded, Rule};

use crate::discretization::{discrete_eigenvalue_in, hazard};
use crate::error::{Error, Result};
use crate::excitation::{incident_field, Field, ModalSolution};
use crate::real::Real;
use crate::spectra::{ModalContext, Operator, OperatorKind, Polarization, ProblemConfig, Wavenumber};
use crate::specfun::hankel2_01;

/// `X_q = (1/N) Σ_n x_n e^{+2πjqn/N}`, returned for `q = -(N-1)/2 ..= (N-1)/2`.
pub fn modes_of<T: Real>(samples: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let inv = T::one() / T::of_int(n as i64);
    let m = (n as i64 - 1) / 2;
    (-m..=m).map(|q| buf[q.rem_euclid(n as i64) as usize] * inv).collect()
}

/// Inverse of [`modes_of`]: `x_n = Σ_q X_q e^{-2πjqn/N}`.
pub fn samples_of<T: Real>(modes: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = modes.len();
    let m = (n as i64 - 1) / 2;
    let mut buf = vec![Complex::zero(); n];
    for (i, q) in (-m..=m).enumerate() {
        buf[q.rem_euclid(n as i64) as usize] = modes[i];
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

/// Circulant Galerkin matrix, stored as its first row and its eigenvalues
/// `λ̂_q = Σ_n row_n e^{-2πjqn/N}` (eigenvector `e^{-jqφ_n}`).
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantOperatorMatrix<T> {
    pub kind: OperatorKind,
    pub n: usize,
    pub first_row: Vec<Complex<T>>,
    /// Indexed by `q + (N-1)/2`.
    pub dft_eigenvalues: Vec<Complex<T>>,
}

impl<T: Real> CirculantOperatorMatrix<T> {
    pub fn from_first_row(kind: OperatorKind, first_row: Vec<Complex<T>>) -> Self {
        let n = first_row.len();
        let mut buf = first_row.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let m = (n as i64 - 1) / 2;
        let dft_eigenvalues = (-m..=m).map(|q| buf[q.rem_euclid(n as i64) as usize]).collect();
        CirculantOperatorMatrix { kind, n, first_row, dft_eigenvalues }
    }

    pub fn from_eigenvalues(kind: OperatorKind, dft_eigenvalues: Vec<Complex<T>>) -> Self {
        let n = dft_eigenvalues.len();
        let m = (n as i64 - 1) / 2;
        let mut row = vec![Complex::zero(); n];
        for (i, q) in (-m..=m).enumerate() {
            row[q.rem_euclid(n as i64) as usize] = dft_eigenvalues[i];
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut row);
        let inv = T::one() / T::of_int(n as i64);
        let first_row = row.into_iter().map(|c| c * inv).collect();
        CirculantOperatorMatrix { kind, n, first_row, dft_eigenvalues }
    }

    pub fn eigenvalue(&self, q: i64) -> Complex<T> {
        self.dft_eigenvalues[(q + (self.n as i64 - 1) / 2) as usize]
    }

    /// Entry `(m, n)` of the full matrix.
    pub fn entry(&self, m: usize, n: usize) -> Complex<T> {
        self.first_row[(n + self.n - m % self.n) % self.n]
    }

    /// `max_m |row_m - row_{N-m}| / max_m |row_m|`.
    pub fn symmetry_defect(&self) -> T {
        let scale = self.first_row.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        let worst = (1..self.n)
            .map(|m| (self.first_row[m] - self.first_row[self.n - m]).norm())
            .fold(T::zero(), T::max);
        worst / scale
    }
}

/// Cubic B-spline centered at 0 with unit knot spacing.
fn b3<T: Real>(x: T) -> T {
    let t = x.abs();
    if t >= T::lit(2.0) {
        T::zero()
    } else if t >= T::one() {
        let u = T::lit(2.0) - t;
        u * u * u / T::lit(6.0)
    } else {
        T::lit(2.0 / 3.0) - t * t + t * t * t / T::lit(2.0)
    }
}

fn b3_second<T: Real>(x: T) -> T {
    let t = x.abs();
    if t >= T::lit(2.0) {
        T::zero()
    } else if t >= T::one() {
        T::lit(2.0) - t
    } else {
        T::lit(3.0) * t - T::lit(2.0)
    }
}

/// Assembled single-layer, double-layer and hypersingular matrices at one
/// wavenumber. The double layer and its adjoint coincide on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSet<T> {
    pub single: CirculantOperatorMatrix<T>,
    pub double: CirculantOperatorMatrix<T>,
    pub hyper: CirculantOperatorMatrix<T>,
}

const GRADED_POINTS: usize = 16;
const GRADED_LEVELS: usize = 20;
const REFINE_TOL: f64 = 1e-10;

/// First rows of `S`, `D` and `N` at wavenumber `w`, sharing kernel evaluations.
pub fn assemble_layers<T: Real>(cfg: &ProblemConfig<T>, w: Wavenumber) -> Result<LayerSet<T>> {
    let n = cfg.n;
    let h = cfg.h();
    let a = cfg.a;
    let kappa = cfg.wavenumber(w);
    let rule = Rule::new(cfg.quadrature)?;
    // Innermost cell shrinks to about eps/100 of the interval, never deeper.
    let depth = ((T::epsilon() * T::lit(1e-2)).ln() / T::lit(0.15).ln()).ceil().to_usize().unwrap_or(GRADED_LEVELS);
    let levels = depth.min(GRADED_LEVELS);
    let graded = Graded::new(GRADED_POINTS, levels)?;
    let fine = Graded::new(GRADED_POINTS + 8, levels + 6)?;
    let two = T::lit(2.0);
    let tiny = h * T::lit(1e-8);
    let mj4 = Complex::new(T::zero(), -T::lit(0.25));
    let d_limit = Complex::new(-T::one() / (T::lit(4.0) * T::PI() * a), T::zero());

    let mut rows: [Vec<Complex<T>>; 3] = [vec![Complex::zero(); n], vec![Complex::zero(); n], vec![Complex::zero(); n]];
    for col in 0..n {
        let shift = T::of_int(col as i64);
        let mut kernel = |v: T| -> Result<[Complex<T>; 3]> {
            let theta = v / a;
            let r = (two * a * (theta / two).sin()).abs();
            if r.is_zero() {
                return Ok([Complex::zero(); 3]);
            }
            let x = v / h + shift;
            let b = b3(x);
            let b2 = b3_second(x) / (h * h);
            let (h0, h1) = hankel2_01(kappa * r)?;
            let g = h0 * mj4;
            let s = g * kappa * b;
            let d = if r < tiny { d_limit } else { -(h1 * mj4) * kappa * (r / (two * a)) } * b;
            let nn = -g * (kappa * kappa * theta.cos() * b + b2) / kappa;
            Ok([s, d, nn])
        };
        let mut total = [Complex::zero(); 3];
        for j in -2i64..=1 {
            let lo_idx = j - col as i64;
            let lo = T::of_int(lo_idx) * h;
            let hi = lo + h;
            let left = lo_idx.rem_euclid(n as i64) == 0;
            let right = (lo_idx + 1).rem_euclid(n as i64) == 0;
            let part = match (left, right) {
                (false, false) => rule.integrate(lo, hi, &mut kernel)?,
                _ => {
                    let (sing, other) = if left { (lo, hi) } else { (hi, lo) };
                    let coarse = graded.integrate(sing, other, &mut kernel)?;
                    let refined = fine.integrate(sing, other, &mut kernel)?;
                    let tol = T::lit(REFINE_TOL).max(T::epsilon() * T::lit(1e3));
                    for (c, f) in coarse.iter().zip(&refined) {
                        let change = (*c - *f).norm() / f.norm().max(T::min_positive_value());
                        if change > tol {
                            return Err(Error::Quadrature { entry: col, change: change.to_f64().unwrap_or(f64::INFINITY) });
                        }
                    }
                    // Graded integrates from `sing` toward `other`.
                    if left {
                        refined
                    } else {
                        refined.map(|c| -c)
                    }
                }
            };
            for (t, p) in total.iter_mut().zip(part) {
                *t = *t + p;
            }
        }
        for (row, t) in rows.iter_mut().zip(total) {
            row[col] = t;
        }
    }
    let [s, d, nn] = rows;
    Ok(LayerSet {
        single: CirculantOperatorMatrix::from_first_row(OperatorKind::new(Operator::SingleLayer, w), s),
        double: CirculantOperatorMatrix::from_first_row(OperatorKind::new(Operator::DoubleLayer, w), d),
        hyper: CirculantOperatorMatrix::from_first_row(OperatorKind::new(Operator::Hypersingular, w), nn),
    })
}

/// Gram matrix row `[2/3, 1/6, 0, …, 0, 1/6]`.
pub fn identity_row<T: Real>(n: usize) -> Vec<Complex<T>> {
    let mut row = vec![Complex::zero(); n];
    row[0] = Complex::new(T::lit(2.0 / 3.0), T::zero());
    row[1] = row[1] + Complex::new(T::lit(1.0 / 6.0), T::zero());
    row[n - 1] = row[n - 1] + Complex::new(T::lit(1.0 / 6.0), T::zero());
    row
}

/// Galerkin matrix of one base operator: `S`, `D`, `D*`, `N` or `I`.
pub fn assemble<T: Real>(kind: OperatorKind, cfg: &ProblemConfig<T>) -> Result<CirculantOperatorMatrix<T>> {
    use Operator::*;
    if kind.filtered {
        return Err(Error::InvalidConfig("filtered operators are not assembled by quadrature".into()));
    }
    match kind.op {
        Identity => Ok(CirculantOperatorMatrix::from_first_row(kind, identity_row(cfg.n))),
        SingleLayer => Ok(assemble_layers(cfg, kind.wavenumber)?.single),
        DoubleLayer | AdjDoubleLayer => {
            let mut m = assemble_layers(cfg, kind.wavenumber)?.double;
            m.kind = kind;
            Ok(m)
        }
        Hypersingular => Ok(assemble_layers(cfg, kind.wavenumber)?.hyper),
        _ => Err(Error::InvalidConfig(format!("{} is not a base operator", kind.label()))),
    }
}

/// Integral equation solved for the surface current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    TmEfie,
    TmMfie,
    TeEfie,
    TeMfie,
    TmCcfie,
    TeCcfie,
    TeEfieF,
    TmCcfieF,
    TeCcfieF,
}

impl Formulation {
    pub const ALL: [Formulation; 9] = [
        Formulation::TmEfie,
        Formulation::TmMfie,
        Formulation::TeEfie,
        Formulation::TeMfie,
        Formulation::TmCcfie,
        Formulation::TeCcfie,
        Formulation::TeEfieF,
        Formulation::TmCcfieF,
        Formulation::TeCcfieF,
    ];

    /// The six unfiltered formulations.
    pub const STANDARD: [Formulation; 6] = [
        Formulation::TmEfie,
        Formulation::TmMfie,
        Formulation::TeEfie,
        Formulation::TeMfie,
        Formulation::TmCcfie,
        Formulation::TeCcfie,
    ];

    pub fn name(self) -> &'static str {
        use Formulation::*;
        match self {
            TmEfie => "TM-EFIE",
            TmMfie => "TM-MFIE",
            TeEfie => "TE-EFIE",
            TeMfie => "TE-MFIE",
            TmCcfie => "TM-CCFIE",
            TeCcfie => "TE-CCFIE",
            TeEfieF => "TE-EFIE_F",
            TmCcfieF => "TM-CCFIE_F",
            TeCcfieF => "TE-CCFIE_F",
        }
    }

    pub fn polarization(self) -> Polarization {
        use Formulation::*;
        match self {
            TmEfie | TmMfie | TmCcfie | TmCcfieF => Polarization::TM,
            _ => Polarization::TE,
        }
    }

    pub fn is_filtered(self) -> bool {
        matches!(self, Formulation::TeEfieF | Formulation::TmCcfieF | Formulation::TeCcfieF)
    }

    pub fn is_calderon(self) -> bool {
        matches!(self, Formulation::TmCcfie | Formulation::TeCcfie | Formulation::TmCcfieF | Formulation::TeCcfieF)
    }

    /// Operator of the discrete system, at the physical wavenumber.
    pub fn system_kind(self) -> OperatorKind {
        use Formulation::*;
        use Operator::*;
        let k = match self {
            TmEfie => OperatorKind::physical(SingleLayer),
            TmMfie => OperatorKind::physical(TmMfio),
            TeEfie | TeEfieF => OperatorKind::physical(Hypersingular),
            TeMfie => OperatorKind::physical(TeMfio),
            TmCcfie | TmCcfieF => OperatorKind::physical(TmCcfio),
            TeCcfie | TeCcfieF => OperatorKind::physical(TeCcfio),
        };
        if self.is_filtered() {
            k.with_filter()
        } else {
            k
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        Formulation::ALL
            .iter()
            .copied()
            .find(|f| f.name().replace('_', "-") == norm)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown formulation `{s}`")))
    }
}

/// Field and factor on the right-hand side of the direct equation whose
/// operator is `op` (`S`: `E_z/(jη)`, TM-MFIO: `H_t`, `N`: `-E_t/(jη)`,
/// TE-MFIO: `-H_z`).
pub fn equation_rhs<T: Real>(op: Operator, eta: T) -> Result<(Field, Complex<T>)> {
    let inv_j_eta = Complex::new(T::zero(), -T::one() / eta);
    match op {
        Operator::SingleLayer => Ok((Field::Ez, inv_j_eta)),
        Operator::TmMfio => Ok((Field::Ht, Complex::new(T::one(), T::zero()))),
        Operator::Hypersingular | Operator::FilteredHypersingular => Ok((Field::Et, -inv_j_eta)),
        Operator::TeMfio => Ok((Field::Hz, Complex::new(-T::one(), T::zero()))),
        other => Err(Error::InvalidConfig(format!("{} is not the operator of a direct equation", other.name()))),
    }
}

/// Pyramid weights `Ĵ_n` of a discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurrent<T> {
    pub coefficients: Vec<Complex<T>>,
    pub polarization: Polarization,
    pub formulation: Formulation,
}

impl<T: Real> DiscreteCurrent<T> {
    /// `Û_q` with `Ĵ_n = Σ_q Û_q e^{-jqφ_n}`.
    pub fn modes(&self) -> Vec<Complex<T>> {
        modes_of(&self.coefficients)
    }
}

/// Assembled matrices of one problem, built on first use.
#[derive(Debug)]
pub struct BemModel<T> {
    cfg: ProblemConfig<T>,
    physical: OnceLock<std::result::Result<LayerSet<T>, Error>>,
    complex: OnceLock<std::result::Result<LayerSet<T>, Error>>,
}

impl<T: Real> BemModel<T> {
    pub fn new(cfg: ProblemConfig<T>) -> Self {
        BemModel { cfg, physical: OnceLock::new(), complex: OnceLock::new() }
    }

    pub fn config(&self) -> &ProblemConfig<T> {
        &self.cfg
    }

    pub fn layers(&self, w: Wavenumber) -> Result<&LayerSet<T>> {
        let cell = match w {
            Wavenumber::Physical => &self.physical,
            Wavenumber::Complex => &self.complex,
        };
        cell.get_or_init(|| assemble_layers(&self.cfg, w)).as_ref().map_err(|e| e.clone())
    }

    /// Galerkin eigenvalues of the band-limited hypersingular operator: the
    /// aliased sum is finite, so it is evaluated exactly from its spectrum.
    fn filtered_hyper(&self, w: Wavenumber) -> Result<Vec<Complex<T>>> {
        let cutoff = self.cfg.filter_cutoff().max(0) as usize;
        let mut c = self.cfg;
        c.harmonics = cutoff / c.n + 2;
        let ctx = ModalContext::new(c);
        let kind = OperatorKind::new(Operator::Hypersingular, w).with_filter();
        self.cfg.modes().map(|q| discrete_eigenvalue_in(&ctx, kind, q)).collect()
    }

    /// Eigenvalues over the retained band for any operator kind; composites
    /// follow the matrix algebra `Σ A G^{-1} B`.
    pub fn eigenvalues(&self, kind: OperatorKind) -> Result<Vec<Complex<T>>> {
        use Operator::*;
        if let Some(parts) = kind.expand() {
            let g = self.eigenvalues(OperatorKind::physical(Identity))?;
            let mut acc = vec![Complex::zero(); self.cfg.n];
            for (x, y) in parts {
                let ex = self.eigenvalues(x)?;
                let ey = self.eigenvalues(y)?;
                for i in 0..acc.len() {
                    acc[i] = acc[i] + ex[i] * ey[i] / g[i];
                }
            }
            return Ok(acc);
        }
        let half = T::lit(0.5);
        let op = if kind.filtered && kind.op == Hypersingular { FilteredHypersingular } else { kind.op };
        Ok(match op {
            Identity => CirculantOperatorMatrix::from_first_row(kind, identity_row(self.cfg.n)).dft_eigenvalues,
            SingleLayer => self.layers(kind.wavenumber)?.single.dft_eigenvalues.clone(),
            DoubleLayer | AdjDoubleLayer => self.layers(kind.wavenumber)?.double.dft_eigenvalues.clone(),
            Hypersingular => self.layers(kind.wavenumber)?.hyper.dft_eigenvalues.clone(),
            FilteredHypersingular => self.filtered_hyper(kind.wavenumber)?,
            TmMfio | TeMfio => {
                let sign = if op == TmMfio { T::one() } else { -T::one() };
                let g = self.eigenvalues(OperatorKind::physical(Identity))?;
                let d = &self.layers(kind.wavenumber)?.double.dft_eigenvalues;
                g.iter().zip(d).map(|(g, d)| *g * half + *d * sign).collect()
            }
            _ => unreachable!("composites expanded above"),
        })
    }

    pub fn operator(&self, kind: OperatorKind) -> Result<CirculantOperatorMatrix<T>> {
        Ok(CirculantOperatorMatrix::from_eigenvalues(kind, self.eigenvalues(kind)?))
    }

    /// Incident field tested against each pyramid, `(1/h) ∫ f_m e`.
    pub fn rhs_vector(&self, field: Field) -> Result<Vec<Complex<T>>> {
        let rule = Rule::new(self.cfg.quadrature)?;
        let n = self.cfg.n;
        let dphi = T::TAU() / T::of_int(n as i64);
        (0..n)
            .map(|m| {
                let phi_m = dphi * T::of_int(m as i64);
                let mut f = |t: T| Ok([incident_field(field, phi_m + t * dphi, &self.cfg) * (T::one() - t.abs())]);
                let l = rule.integrate(-T::one(), T::zero(), &mut f)?;
                let r = rule.integrate(T::zero(), T::one(), &mut f)?;
                Ok(l[0] + r[0])
            })
            .collect()
    }

    fn equation_modes(&self, op: Operator) -> Result<Vec<Complex<T>>> {
        let (field, factor) = equation_rhs(op, self.cfg.eta)?;
        Ok(modes_of(&self.rhs_vector(field)?).into_iter().map(|c| c * factor).collect())
    }

    /// System eigenvalues and tested right-hand-side modes.
    pub fn system(&self, f: Formulation) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        let kind = f.system_kind();
        match kind.expand() {
            None => Ok((self.eigenvalues(kind)?, self.equation_modes(kind.op)?)),
            Some(parts) => {
                let g = self.eigenvalues(OperatorKind::physical(Operator::Identity))?;
                let mut sys = vec![Complex::zero(); self.cfg.n];
                let mut rhs = vec![Complex::zero(); self.cfg.n];
                for (x, y) in parts {
                    let ex = self.eigenvalues(x)?;
                    let ey = self.eigenvalues(y)?;
                    let b = self.equation_modes(y.op)?;
                    for i in 0..sys.len() {
                        sys[i] = sys[i] + ex[i] * ey[i] / g[i];
                        rhs[i] = rhs[i] + ex[i] * b[i] / g[i];
                    }
                }
                Ok((sys, rhs))
            }
        }
    }

    /// Modes solved for: all of them, except `|q| <= q_lim` for TE-EFIE_F.
    fn active(&self, f: Formulation, q: i64) -> bool {
        f != Formulation::TeEfieF || q.abs() <= self.cfg.filter_cutoff()
    }

    /// Discrete solution modes `Û_q`.
    pub fn solve_modes(&self, f: Formulation) -> Result<Vec<Complex<T>>> {
        let (sys, rhs) = self.system(f)?;
        self.cfg
            .modes()
            .zip(sys.iter().zip(&rhs))
            .map(|(q, (s, b))| {
                if !self.active(f, q) {
                    return Ok(Complex::zero());
                }
                if s.norm() < hazard::<T>() {
                    return Err(Error::SingularMode { q, ka: self.cfg.ka().to_f64().unwrap_or(f64::NAN) });
                }
                Ok(*b / *s)
            })
            .collect()
    }

    pub fn solve(&self, f: Formulation) -> Result<DiscreteCurrent<T>> {
        Ok(DiscreteCurrent { coefficients: samples_of(&self.solve_modes(f)?), polarization: f.polarization(), formulation: f })
    }

    /// Exact modes with the discrete `Û_q`, `R̂_q` filled in.
    pub fn modal_solution(&self, f: Formulation, ctx: &ModalContext<T>) -> Result<ModalSolution<T>> {
        Ok(ModalSolution::exact(ctx, f.polarization())?.with_discrete(self.solve_modes(f)?))
    }

    /// `max|λ̂| / min|λ̂|` of the system over its active modes.
    pub fn condition_number(&self, f: Formulation) -> Result<T> {
        let (sys, _) = self.system(f)?;
        let active: Vec<_> = self.cfg.modes().zip(sys).filter(|(q, _)| self.active(f, *q)).collect();
        spectral_condition(active.into_iter(), self.cfg.ka())
    }
}

/// `max|λ| / min|λ|` over `(q, λ)` pairs.
pub fn spectral_condition<T: Real>(values: impl Iterator<Item = (i64, Complex<T>)>, ka: T) -> Result<T> {
    let mut hi = T::zero();
    let mut lo = T::infinity();
    let mut arg_lo = 0;
    for (q, v) in values {
        let m = v.norm();
        hi = hi.max(m);
        if m < lo {
            lo = m;
            arg_lo = q;
        }
    }
    if lo.is_infinite() {
        return Err(Error::EmptySpectrum);
    }
    if lo < hazard::<T>() {
        return Err(Error::SingularMode { q: arg_lo, ka: ka.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(hi / lo)
}

pub fn solve<T: Real>(f: Formulation, cfg: &ProblemConfig<T>) -> Result<DiscreteCurrent<T>> {
    BemModel::new(*cfg).solve(f)
}

/// Far-field modes `R̂_q = F_q R_q Û_q / U_q` of a discrete current.
pub fn far_field<T: Real>(current: &DiscreteCurrent<T>, cfg: &ProblemConfig<T>) -> Result<Vec<Complex<T>>> {
    let ctx = ModalContext::new(*cfg);
    let sol = ModalSolution::exact(&ctx, current.polarization)?.with_discrete(current.modes());
    Ok(sol.rhat.expect("set by with_discrete"))
}

pub fn condition_number<T: Real>(f: Formulation, cfg: &ProblemConfig<T>) -> Result<T> {
    BemModel::new(*cfg).condition_number(f)
}
