//! Spectral error prediction and Galerkin boundary-element solution of 2D
//! TM/TE plane-wave scattering by a perfectly conducting circular cylinder.
//!
//! Two engines produce the same error measures:
//! - the predicted engine evaluates closed-form continuous and aliased
//!   discrete eigenvalues ([`spectra`], [`discretization`]);
//! - the numerical engine assembles the circulant Galerkin matrices by
//!   quadrature and solves them by FFT ([`bem`]).
//!
//! [`analysis`] turns either set of modal data into current and scattering
//! error measures and fits log-log slopes over frequency sweeps.
//!
//! Everything is generic over [`Real`]; the `*64` aliases below fix `f64`.

pub mod analysis;
pub mod bem;
pub mod discretization;
mod error;
pub mod excitation;
mod real;
pub mod spectra;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use real::{Real, Scaled};

pub use analysis::{Analysis, Engine, Measure};
pub use bem::Formulation;
pub use spectra::{Operator, OperatorKind, Polarization, Wavenumber};

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

pub type Scaled64 = Scaled<f64>;
pub type BesselEval64 = specfun::BesselEval<f64>;
pub type BesselTable64 = specfun::BesselTable<f64>;
pub type ProblemConfig64 = spectra::ProblemConfig<f64>;
pub type ModalContext64 = spectra::ModalContext<f64>;
pub type SpectrumView64 = spectra::SpectrumView<f64>;
pub type SpectralErrorBreakdown64 = discretization::SpectralErrorBreakdown<f64>;
pub type ModalSolution64 = excitation::ModalSolution<f64>;
pub type CirculantOperatorMatrix64 = bem::CirculantOperatorMatrix<f64>;
pub type DiscreteCurrent64 = bem::DiscreteCurrent<f64>;
pub type ErrorReport64 = analysis::ErrorReport<f64>;
pub type Analysis64 = analysis::Analysis<f64>;
pub type BemModel64 = bem::BemModel<f64>;
