use super::*;
use crate::discretization::spectral_error_in;

fn cfg(ka: f64) -> ProblemConfig<f64> {
    ProblemConfig::from_ka(ka, 4.0).unwrap()
}

fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

#[test]
fn zero_mode_without_aliasing_is_exact() {
    let an = Analysis::new(cfg(7.3).with_harmonics(0));
    for f in Formulation::STANDARD {
        assert!(an.upsilon(f, 0).unwrap().norm() < 1e-14, "{f}");
    }
}

#[test]
fn calderon_average_of_equal_terms() {
    // Without aliasing both direct terms reduce to (1 - F)/F.
    let an = Analysis::new(cfg(6.0).with_harmonics(0));
    let n = an.config().n;
    for q in [1, 4, 9] {
        let fq = pyramid_fourier_coeff::<f64>(q, n);
        let want = Complex::new((1.0 - fq) / fq, 0.0);
        for f in [Formulation::TmCcfie, Formulation::TeCcfie] {
            assert!(close(an.upsilon(f, q).unwrap(), want, 1e-12), "{f} q={q}");
        }
    }
}

#[test]
fn two_term_form_matches_weighted_average() {
    let an = Analysis::new(cfg(10.0));
    for f in [Formulation::TmCcfie, Formulation::TeCcfie] {
        for q in [0, 5, 10] {
            let a = an.upsilon(f, q).unwrap();
            let b = an.upsilon_two_term(f, q).unwrap();
            assert!(close(a, b, 1e-12), "{f} q={q}: {a} vs {b}");
        }
    }
    assert!(an.upsilon_two_term(Formulation::TmEfie, 0).is_err());
}

#[test]
fn direct_upsilon_equals_eigenvalue_ratio() {
    let an = Analysis::new(cfg(12.0));
    let ctx = an.context();
    for f in [Formulation::TmEfie, Formulation::TeEfie, Formulation::TmMfie, Formulation::TeMfie] {
        for q in [0, 3, 11, 12, 20] {
            let kind = f.system_kind();
            let fq = pyramid_fourier_coeff::<f64>(q, ctx.config().n);
            let ratio = ctx.continuous(kind, q).unwrap() * fq / discrete_eigenvalue_in(ctx, kind, q).unwrap() - 1.0;
            assert!(close(an.upsilon(f, q).unwrap(), ratio, 1e-11), "{f} q={q}");
        }
    }
}

#[test]
fn rho_reduces_for_efie() {
    let an = Analysis::new(cfg(20.0));
    let q = 15;
    for f in [Formulation::TmEfie, Formulation::TeEfie] {
        let e = spectral_error_in(an.context(), f.system_kind(), q).unwrap();
        let want = -e.aliasing / (e.total + 1.0);
        assert!(close(an.rho(f, q).unwrap(), want, 1e-12), "{f}");
    }
}

#[test]
fn rho_vanishes_without_aliasing_or_projection() {
    let mut c = cfg(5.0).with_harmonics(0);
    c.n = 4001;
    let an = Analysis::new(c);
    assert!(an.rho(Formulation::TmEfie, 0).unwrap().norm() < 1e-15);
    assert!(an.rho(Formulation::TeMfie, 2).unwrap().norm() < 1e-5);
}

#[test]
fn filtered_efie_rho_vanishes_on_alias_free_band() {
    for ka in [20.0, 60.0] {
        let an = Analysis::new(cfg(ka));
        let c = an.config();
        let band = c.filter_cutoff().min(c.n as i64 - c.filter_cutoff() - 1);
        assert!(band > 0);
        for q in 0..=band {
            assert!(an.rho(Formulation::TeEfieF, q).unwrap().norm() < 1e-12, "ka={ka} q={q}");
        }
        // Beyond that band aliases of kept orders come back in.
        assert!(an.rho(Formulation::TeEfieF, c.max_mode()).unwrap().norm() > 1e-6);
    }
}

fn synthetic(upsilon: Complex<f64>) -> Coefficients<f64> {
    let an = Analysis::new(cfg(8.0));
    let mut c = an.coefficients(Formulation::TeEfie, Engine::Predicted).unwrap();
    c.upsilon = vec![upsilon; c.u.len()];
    c.du = c.u.iter().map(|u| *u * upsilon).collect();
    c.rho = vec![upsilon; c.u.len()];
    c.dr = c.r.iter().map(|r| *r * upsilon).collect();
    c
}

#[test]
fn measures_of_trivial_deviations() {
    let zero = synthetic(Complex::new(0.0, 0.0));
    let cst = synthetic(Complex::new(0.3, -0.4));
    for m in Measure::ALL {
        assert_eq!(zero.current_error(m).unwrap(), 0.0, "{m}");
        assert!((cst.current_error(m).unwrap() - 0.5).abs() < 1e-12, "{m}");
    }
}

#[test]
fn empty_spectrum_is_an_error() {
    let mut c = synthetic(Complex::new(0.1, 0.0));
    c.u.iter_mut().for_each(|u| *u = Complex::new(0.0, 0.0));
    assert_eq!(c.current_error(Measure::L2), Err(Error::EmptySpectrum));
}

#[test]
fn scattering_forms_agree() {
    let an = Analysis::new(cfg(25.0));
    for f in Formulation::STANDARD {
        let c = an.coefficients(f, Engine::Predicted).unwrap();
        let a = c.scattering_error().unwrap();
        let b = c.scattering_error_via_current().unwrap();
        assert!((a - b).abs() <= 1e-12 * a, "{f}: {a} vs {b}");
    }
}

#[test]
fn predicted_matches_numerical_tm_efie() {
    let an = Analysis::new(cfg(10.0));
    let p = an.current_error(Formulation::TmEfie, Engine::Predicted, Measure::L2).unwrap();
    let n = an.current_error(Formulation::TmEfie, Engine::Numerical, Measure::L2).unwrap();
    assert!(((p - n) / n).abs() < 0.1, "predicted {p}, numerical {n}");
}

#[test]
fn numerical_modes_track_predicted_modes() {
    let an = Analysis::new(cfg(6.0).with_harmonics(8));
    for f in Formulation::ALL {
        let p = an.coefficients(f, Engine::Predicted).unwrap();
        let n = an.coefficients(f, Engine::Numerical).unwrap();
        for (i, q) in an.config().modes().enumerate() {
            if q.abs() > 6 {
                continue;
            }
            // Right-hand-side aliasing is the only modelling gap.
            let gap = (p.upsilon[i] - n.upsilon[i]).norm();
            assert!(gap < 2e-2, "{f} q={q}: {} vs {}", p.upsilon[i], n.upsilon[i]);
        }
    }
}

#[test]
fn condition_numbers_agree_between_engines() {
    let an = Analysis::new(cfg(8.0).with_harmonics(8));
    for f in Formulation::ALL {
        let p = an.condition_number(f, Engine::Predicted).unwrap();
        let n = an.condition_number(f, Engine::Numerical).unwrap();
        assert!(((p - n) / n).abs() < 1e-3, "{f}: {p} vs {n}");
    }
}

#[test]
fn report_carries_every_measure() {
    let an = Analysis::new(cfg(9.5));
    let r = an.report(Formulation::TmCcfie, Engine::Predicted, &Measure::ALL).unwrap();
    assert_eq!(r.measures.len(), 5);
    assert!(r.measures.values().all(|v| *v >= 0.0 && v.is_finite()));
    assert_eq!(r.masked, an.is_masked().unwrap());
}

#[test]
fn free_functions_match_analysis() {
    let c = cfg(11.0);
    let an = Analysis::new(c);
    let f = Formulation::TeMfie;
    assert_eq!(upsilon(f, 4, &c).unwrap(), an.upsilon(f, 4).unwrap());
    assert_eq!(rho(f, 4, &c).unwrap(), an.rho(f, 4).unwrap());
    assert_eq!(current_error(f, &c, Measure::Hsk).unwrap(), an.current_error(f, Engine::Predicted, Measure::Hsk).unwrap());
    assert_eq!(scattering_error(f, &c).unwrap(), an.scattering_error(f, Engine::Predicted).unwrap());
}

#[test]
fn slope_of_exact_power_law() {
    let s: Vec<_> = (0..20).map(|i| {
        let x = 30.0 * 1.1f64.powi(i);
        (x, 2.5 * x.cbrt())
    }).collect();
    let (m, e) = fit_slope(&s, &vec![false; s.len()]).unwrap();
    assert!((m - 1.0 / 3.0).abs() < 1e-12);
    assert!(e < 1e-12);
    let flat: Vec<_> = s.iter().map(|p| (p.0, 4.0)).collect();
    assert!(fit_slope(&flat, &vec![false; 20]).unwrap().0.abs() < 1e-14);
}

#[test]
fn slope_of_rippled_power_law() {
    let s: Vec<_> = (0..50).map(|i| {
        let x = 30.0 + 7.4 * i as f64;
        (x, 0.7 * x.cbrt() * (1.0 + 0.1 * x.sin()))
    }).collect();
    let (m, _) = fit_slope(&s, &vec![false; 50]).unwrap();
    assert!((m - 1.0 / 3.0).abs() < 0.05, "{m}");
}

#[test]
fn slope_needs_enough_unmasked_points() {
    let s: Vec<_> = (1..=15).map(|i| (i as f64, i as f64)).collect();
    let mut mask = vec![false; 15];
    mask[..4].iter_mut().for_each(|m| *m = true);
    assert_eq!(fit_slope(&s, &mask), Err(Error::InsufficientPoints { found: 11, needed: 12 }));
    assert!(fit_slope(&s, &vec![false; 14]).is_err());
    let mut bad = s.clone();
    bad[3].1 = 0.0;
    assert!(matches!(fit_slope(&bad, &vec![false; 15]), Err(Error::Domain(_))));
    // A masked non-positive sample is simply skipped.
    let mut m = vec![false; 15];
    m[3] = true;
    assert!(fit_slope(&bad, &m).is_ok());
}

#[test]
fn tags_parse() {
    assert_eq!("Numerical".parse::<Engine>().unwrap(), Engine::Numerical);
    assert_eq!("s_l2".parse::<Measure>().unwrap(), Measure::ScatteringL2);
    assert_eq!("hsk".parse::<Measure>().unwrap(), Measure::Hsk);
    assert!("H1".parse::<Measure>().is_err());
    assert!("both".parse::<Engine>().is_err());
}

#[test]
fn single_precision_predicted_error() {
    let c64 = cfg(10.0);
    let c32 = ProblemConfig::<f32>::from_ka(10.0, 4.0).unwrap();
    let a = current_error(Formulation::TmMfie, &c64, Measure::L2).unwrap();
    let b = current_error(Formulation::TmMfie, &c32, Measure::L2).unwrap();
    assert!(((b as f64 - a) / a).abs() < 1e-3, "{a} vs {b}");
}

#[test]
fn grid_avoids_integers_and_stays_in_range() {
    let g: Vec<f64> = ka_grid(30.0, 400.0, 60, Spacing::Log).unwrap();
    assert_eq!(g.len(), 60);
    assert!(g.iter().all(|x| (x - x.round()).abs() >= 0.05 - 1e-12 && *x >= 30.0 && *x <= 400.0));
    assert!(g.windows(2).all(|w| w[0] < w[1]));
    let l = ka_grid(1.5f64, 2.5, 3, Spacing::Linear).unwrap();
    assert_eq!(l, vec![1.5, 2.1, 2.5]);
    assert!(ka_grid(0.0, 1.0, 5, Spacing::Log).is_err());
    assert!(ka_grid(1.0, 2.0, 1, Spacing::Linear).is_err());
    assert_eq!("LOG".parse::<Spacing>().unwrap(), Spacing::Log);
    let fine: Vec<f64> = ka_grid(1.0, 10.0, 200, Spacing::Linear).unwrap();
    assert!(fine.windows(2).all(|w| w[0] <= w[1]));
}
