//! Discrete (Galerkin, pyramid basis) eigenvalues predicted in closed form.
//!
//! `λ̂_q = Σ_{s=-S}^{S} λ_{q+sN} F_{q+sN}^2`, split into the projection error
//! `E^P = F_q^2 - 1` and the aliasing error from the `s != 0` terms.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectra::{ModalContext, Operator, OperatorKind, ProblemConfig, SpectrumView, Wavenumber};

/// Fourier coefficient of the pyramid basis, `(sin(πq/N)/(πq/N))^2`.
pub fn pyramid_fourier_coeff<T: Real>(q: i64, n: usize) -> T {
    if q == 0 {
        return T::one();
    }
    if q % n as i64 == 0 {
        return T::zero();
    }
    let x = T::PI() * T::of_int(q) / T::of_int(n as i64);
    let s = x.sin() / x;
    s * s
}

/// Smallest magnitude treated as a usable denominator.
pub(crate) fn hazard<T: Real>() -> T {
    T::lit(1e-300).max(T::min_positive_value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralErrorBreakdown<T> {
    pub q: i64,
    pub projection: T,
    pub aliasing: Complex<T>,
    pub total: Complex<T>,
}

impl<T: Real> SpectralErrorBreakdown<T> {
    fn from_parts(q: i64, projection: T, aliasing: Complex<T>) -> Self {
        SpectralErrorBreakdown { q, projection, aliasing, total: aliasing + projection }
    }

    fn from_total(q: i64, projection: T, total: Complex<T>) -> Self {
        SpectralErrorBreakdown { q, projection, aliasing: total - projection, total }
    }
}

/// Aliased sum `Σ_{s} λ_{q+sN} F^2_{q+sN}` restricted to `s != 0` when `alias_only`.
fn aliased_sum<T: Real>(ctx: &ModalContext<T>, kind: OperatorKind, q: i64, alias_only: bool) -> Result<Complex<T>> {
    let cfg = ctx.config();
    let n = cfg.n as i64;
    let s_max = cfg.harmonics as i64;
    let mut sum = Complex::zero();
    for s in -s_max..=s_max {
        if alias_only && s == 0 {
            continue;
        }
        let m = q + s * n;
        let f = pyramid_fourier_coeff::<T>(m, cfg.n);
        if f.is_zero() {
            continue;
        }
        let lam = ctx.continuous(kind, m)?;
        if !(lam.re.is_finite() && lam.im.is_finite()) {
            return Err(Error::Overflow { order: m, argument: format!("{}", cfg.wavenumber(kind.wavenumber) * cfg.a) });
        }
        sum = sum + lam * (f * f);
    }
    Ok(sum)
}

fn gram<T: Real>(ctx: &ModalContext<T>, q: i64) -> Result<Complex<T>> {
    aliased_sum(ctx, OperatorKind::physical(Operator::Identity), q, false)
}

/// Discrete eigenvalue; composites use the exact discrete algebra
/// (products divided by the Gram eigenvalue).
pub fn discrete_eigenvalue_in<T: Real>(ctx: &ModalContext<T>, kind: OperatorKind, q: i64) -> Result<Complex<T>> {
    match kind.expand() {
        None => aliased_sum(ctx, kind, q, false),
        Some(parts) => {
            let g = gram(ctx, q)?;
            let mut sum = Complex::zero();
            for (x, y) in parts {
                sum = sum + discrete_eigenvalue_in(ctx, x, q)? * discrete_eigenvalue_in(ctx, y, q)? / g;
            }
            Ok(sum)
        }
    }
}

pub fn discrete_eigenvalue<T: Real>(kind: OperatorKind, q: i64, cfg: &ProblemConfig<T>) -> Result<Complex<T>> {
    discrete_eigenvalue_in(&ModalContext::new(*cfg), kind, q)
}

/// Discrete values over the retained band.
pub fn discrete_spectrum<T: Real>(ctx: &ModalContext<T>, kind: OperatorKind) -> Result<SpectrumView<T>> {
    let cfg = *ctx.config();
    let values = cfg.modes().map(|q| discrete_eigenvalue_in(ctx, kind, q)).collect::<Result<Vec<_>>>()?;
    Ok(SpectrumView { config: cfg, kind, values })
}

fn check<T: Real>(v: Complex<T>, q: i64, what: &str) -> Result<()> {
    if v.norm() < hazard::<T>() {
        return Err(Error::DivisionHazard { q, what: what.to_string() });
    }
    Ok(())
}

/// Projection/aliasing error split for any kind.
pub fn spectral_error_in<T: Real>(ctx: &ModalContext<T>, kind: OperatorKind, q: i64) -> Result<SpectralErrorBreakdown<T>> {
    let cfg = ctx.config();
    let f = pyramid_fourier_coeff::<T>(q, cfg.n);
    let projection = f * f - T::one();
    match kind.op {
        Operator::TmMfio | Operator::TeMfio => mfio_error(ctx, kind, q),
        _ if kind.op.is_composite() => {
            let parts = kind.expand().expect("composite");
            let e_i = spectral_error_in(ctx, OperatorKind::physical(Operator::Identity), q)?;
            let one_i = e_i.total + T::one();
            check(one_i, q, "1 + E^I")?;
            let mut num = Complex::<T>::zero();
            let mut den = Complex::<T>::zero();
            for (x, y) in parts {
                let w = ctx.continuous(x, q)? * ctx.continuous(y, q)?;
                let ex = spectral_error_in(ctx, x, q)?;
                let ey = spectral_error_in(ctx, y, q)?;
                let one_plus = (ex.total + T::one()) * (ey.total + T::one()) / one_i;
                num = num + w * one_plus;
                den = den + w;
            }
            check(den, q, &format!("continuous eigenvalue of {}", kind.label()))?;
            Ok(SpectralErrorBreakdown::from_total(q, projection, num / den - Complex::one()))
        }
        _ => {
            let lam = ctx.continuous(kind, q)?;
            check(lam, q, &format!("continuous eigenvalue of {}", kind.label()))?;
            let alias = aliased_sum(ctx, kind, q, true)? / lam;
            Ok(SpectralErrorBreakdown::from_parts(q, projection, alias))
        }
    }
}

/// MFIO error as the eigenvalue-weighted mean of the identity and
/// double-layer errors (`I/2 ± D`).
fn mfio_error<T: Real>(ctx: &ModalContext<T>, kind: OperatorKind, q: i64) -> Result<SpectralErrorBreakdown<T>> {
    let (dop, sign) = match kind.op {
        Operator::TmMfio => (Operator::AdjDoubleLayer, T::one()),
        _ => (Operator::DoubleLayer, -T::one()),
    };
    let dk = OperatorKind::new(dop, kind.wavenumber);
    let wi = Complex::new(T::lit(0.5), T::zero());
    let wd = ctx.continuous(dk, q)? * sign;
    let den = wi + wd;
    check(den, q, &format!("continuous eigenvalue of {}", kind.label()))?;
    let ei = spectral_error_in(ctx, OperatorKind::new(Operator::Identity, kind.wavenumber), q)?;
    let ed = spectral_error_in(ctx, dk, q)?;
    let alias = (wi * ei.aliasing + wd * ed.aliasing) / den;
    Ok(SpectralErrorBreakdown::from_parts(q, ei.projection, alias))
}

pub fn spectral_error<T: Real>(kind: OperatorKind, q: i64, cfg: &ProblemConfig<T>) -> Result<SpectralErrorBreakdown<T>> {
    spectral_error_in(&ModalContext::new(*cfg), kind, q)
}

/// `E^{MN} = E^M + E^N + E^M E^N` for a product of operators.
pub fn compose_product<T: Real>(em: Complex<T>, en: Complex<T>) -> Complex<T> {
    em + en + em * en
}

/// Error of `Σ w_i O_i` from the errors `e_i` of its terms.
pub fn compose_sum<T: Real>(terms: &[(Complex<T>, Complex<T>)]) -> Complex<T> {
    let den: Complex<T> = terms.iter().map(|t| t.0).fold(Complex::zero(), |a, b| a + b);
    terms.iter().fold(Complex::<T>::zero(), |acc, (w, e)| acc + *w * *e) / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec<T> {
    pub cutoff: i64,
    pub epsilon: T,
}

impl<T: Real> FilterSpec<T> {
    pub fn from_config(cfg: &ProblemConfig<T>) -> Result<Self> {
        let cutoff = cfg.filter_cutoff();
        if cutoff < 1 {
            return Err(Error::InvalidConfig(format!("filter cutoff {cutoff} < 1")));
        }
        Ok(FilterSpec { cutoff, epsilon: cfg.epsilon })
    }

    /// Largest `|q|` whose aliased orders `|q + sN|` (`s != 0`) all exceed the
    /// cutoff, i.e. where aliasing of the filtered operator vanishes.
    pub fn suppressed_band(&self, n: usize) -> i64 {
        n as i64 - self.cutoff - 1
    }
}

/// Zeroes the hypersingular eigenvalues beyond the cutoff.
pub fn apply_filter<T: Real>(view: &SpectrumView<T>, filter: &FilterSpec<T>) -> SpectrumView<T> {
    debug_assert_eq!(view.kind.op, Operator::Hypersingular);
    let values = view
        .iter()
        .map(|(q, v)| if q.abs() <= filter.cutoff { v } else { Complex::zero() })
        .collect();
    SpectrumView {
        config: view.config,
        kind: OperatorKind { op: Operator::FilteredHypersingular, wavenumber: view.kind.wavenumber, filtered: true },
        values,
    }
}

/// Hypersingular kind at the given wavenumber.
pub fn hypersingular(w: Wavenumber) -> OperatorKind {
    OperatorKind::new(Operator::Hypersingular, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Wavenumber;

    fn cfg(ka: f64, s: usize) -> ProblemConfig<f64> {
        ProblemConfig::from_ka(ka, 4.0).unwrap().with_harmonics(s)
    }

    #[test]
    fn pyramid_coefficients() {
        assert_eq!(pyramid_fourier_coeff::<f64>(0, 15), 1.0);
        assert_eq!(pyramid_fourier_coeff::<f64>(15, 15), 0.0);
        let x = std::f64::consts::PI / 7.0;
        let e = (x.sin() / x).powi(2);
        assert!((pyramid_fourier_coeff::<f64>(1, 7) - e).abs() < 1e-16);
        assert_eq!(pyramid_fourier_coeff::<f64>(-3, 7), pyramid_fourier_coeff::<f64>(3, 7));
    }

    #[test]
    fn zero_harmonics_gives_projection_only() {
        let c = cfg(6.0, 0);
        let ctx = ModalContext::new(c);
        for op in [Operator::SingleLayer, Operator::DoubleLayer, Operator::Hypersingular] {
            let k = OperatorKind::physical(op);
            for q in [0i64, 4, 11] {
                let f = pyramid_fourier_coeff::<f64>(q, c.n);
                let lam = ctx.continuous(k, q).unwrap();
                assert_eq!(discrete_eigenvalue_in(&ctx, k, q).unwrap(), lam * (f * f));
                let e = spectral_error_in(&ctx, k, q).unwrap();
                assert_eq!(e.aliasing, Complex::new(0.0, 0.0));
                assert_eq!(e.total, Complex::new(f * f - 1.0, 0.0));
            }
        }
    }

    #[test]
    fn identity_sums_squares() {
        let c = cfg(5.0, 1);
        let ctx = ModalContext::new(c);
        let n = c.n as i64;
        for q in [0i64, 3, 9] {
            let f = |m| pyramid_fourier_coeff::<f64>(m, c.n).powi(2);
            let e = f(q) + f(q - n) + f(q + n);
            let d = discrete_eigenvalue_in(&ctx, OperatorKind::physical(Operator::Identity), q).unwrap();
            assert!((d.re - e).abs() < 1e-15 && d.im == 0.0);
        }
    }

    #[test]
    fn identity_converges_to_gram_eigenvalue() {
        let c = cfg(3.0, 400);
        let ctx = ModalContext::new(c);
        for q in 0..=c.max_mode() {
            let d = discrete_eigenvalue_in(&ctx, OperatorKind::physical(Operator::Identity), q).unwrap().re;
            let g = 2.0 / 3.0 + (2.0 * std::f64::consts::PI * q as f64 / c.n as f64).cos() / 3.0;
            assert!((d - g).abs() < 1e-7, "q = {q}: {d} vs {g}");
        }
    }

    #[test]
    fn product_composition_algebra() {
        let z = Complex::new(0.0, 0.0);
        assert_eq!(compose_product(z, z), z);
        let e = Complex::new(1e-3, -2e-3);
        assert_eq!(compose_product(e, e), e * 2.0 + e * e);
        let c = Complex::new(0.3, 0.1);
        let s = compose_sum(&[(Complex::new(2.0, 1.0), c), (Complex::new(-0.5, 3.0), c)]);
        assert!((s - c).norm() < 1e-15);
    }

    #[test]
    fn composite_error_matches_direct_ratio() {
        let c = cfg(11.7, 2);
        let ctx = ModalContext::new(c);
        for op in [
            Operator::TmMfio,
            Operator::TeMfio,
            Operator::TmCefio,
            Operator::TmCmfio,
            Operator::TeCefio,
            Operator::TeCmfio,
            Operator::TmCcfio,
            Operator::TeCcfio,
        ] {
            for w in [Wavenumber::Physical, Wavenumber::Complex] {
                let k = OperatorKind::new(op, w);
                for q in [0i64, 5, 11, 20, c.max_mode()] {
                    let e = spectral_error_in(&ctx, k, q).unwrap();
                    let direct = discrete_eigenvalue_in(&ctx, k, q).unwrap() / ctx.continuous(k, q).unwrap() - 1.0;
                    assert!((e.total - direct).norm() < 1e-10 * (1.0 + direct.norm()), "{} q={q}", k.label());
                    assert!((e.total - (e.aliasing + e.projection)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn filter_zeroes_outside_cutoff() {
        let c = ProblemConfig::from_ka(10.0, 1.6).unwrap();
        let ctx = ModalContext::new(c);
        let spec = FilterSpec::from_config(&c).unwrap();
        let view = ctx.spectrum(hypersingular(Wavenumber::Physical)).unwrap();
        let fv = apply_filter(&view, &spec);
        assert_eq!(fv.get(0), view.get(0));
        assert_eq!(fv.get(spec.cutoff), view.get(spec.cutoff));
        assert_eq!(fv.get(spec.cutoff + 1), Complex::new(0.0, 0.0));
        assert_eq!(fv.kind.op, Operator::FilteredHypersingular);
    }

    #[test]
    fn filtered_aliasing_vanishes_on_suppressed_band() {
        let c = cfg(25.3, 2);
        let ctx = ModalContext::new(c);
        let spec = FilterSpec::from_config(&c).unwrap();
        let band = spec.suppressed_band(c.n);
        assert!(band as f64 >= 25.3);
        let k = OperatorKind::physical(Operator::FilteredHypersingular);
        for q in -band..=band {
            assert_eq!(spectral_error_in(&ctx, k, q).unwrap().aliasing, Complex::new(0.0, 0.0));
        }
        let beyond = spectral_error_in(&ctx, k, band + 1).unwrap();
        assert!(beyond.aliasing.norm() > 0.0);
    }
}
