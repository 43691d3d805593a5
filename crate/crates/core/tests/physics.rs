//! Frequency-sweep invariants of the modal solution and the predicted errors.

use cylscat::analysis::{fit_slope, ka_grid, Spacing};
use cylscat::excitation::mie_current_coeff;
use cylscat::specfun::bessel_jy;
use cylscat::{Analysis64, Complex, Engine, Formulation, Measure, Polarization, ProblemConfig64};

fn cfg(ka: f64) -> ProblemConfig64 {
    ProblemConfig64::from_ka(ka, 4.0).unwrap()
}

fn grid(points: usize) -> (Vec<f64>, Vec<bool>) {
    let kas: Vec<f64> = ka_grid(30.0, 400.0, points, Spacing::Log).unwrap();
    let mask = kas.iter().map(|&k| Analysis64::new(cfg(k)).is_masked().unwrap()).collect();
    (kas, mask)
}

fn current_slope(pol: Polarization, order: impl Fn(f64) -> i64) -> f64 {
    let (kas, mask) = grid(120);
    let s: Vec<(f64, f64)> =
        kas.iter().map(|&ka| (ka, mie_current_coeff(pol, order(ka), &cfg(ka)).unwrap().norm_sqr())).collect();
    fit_slope(&s, &mask).unwrap().0
}

#[test]
fn tm_current_power_falls_as_inverse_ka_in_hyperbolic_region() {
    let m = current_slope(Polarization::TM, |_| 3);
    assert!((m + 1.0).abs() < 0.1, "{m}");
}

#[test]
fn tm_current_power_falls_faster_at_transition() {
    let m = current_slope(Polarization::TM, |ka| ka.floor() as i64);
    assert!((m + 4.0 / 3.0).abs() < 0.1, "{m}");
}

#[test]
fn te_current_power_at_transition() {
    let m = current_slope(Polarization::TE, |ka| ka.floor() as i64);
    assert!((m + 2.0 / 3.0).abs() < 0.1, "{m}");
}

#[test]
fn tm_ccfie_error_has_no_resonance_spikes() {
    let (kas, mask) = grid(200);
    let v: Vec<f64> = kas
        .iter()
        .zip(&mask)
        .filter(|p| !*p.1)
        .map(|(&ka, _)| Analysis64::new(cfg(ka)).current_error(Formulation::TmCcfie, Engine::Predicted, Measure::L2).unwrap())
        .collect();
    let mut sorted = v.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let worst = sorted[sorted.len() - 1];
    assert!(worst <= 3.0 * median, "max {worst} vs median {median}");
}

/// Root of `x -> g(x)` in `[lo, hi]` given a sign change.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn scattering(f: Formulation, ka: f64) -> (f64, bool) {
    let an = Analysis64::new(cfg(ka));
    (an.scattering_error(f, Engine::Predicted).unwrap(), an.is_masked().unwrap())
}

/// TM-MFIE resonates where `J'_q(ka) = 0`, TE-MFIE where `J_q(ka) = 0`.
fn mfie_peak(f: Formulation, order: i64, from: f64) {
    let g = |x: f64| {
        let b = bessel_jy(order, Complex::new(x, 0.0)).unwrap();
        let v = if f == Formulation::TmMfie { b.jp } else { b.j };
        v.to_complex().re
    };
    let mut lo = from;
    while g(lo) * g(lo + 0.05) > 0.0 {
        lo += 0.05;
    }
    let root = bisect(g, lo, lo + 0.05);
    // The discrete resonance sits a little off the continuous one.
    let (peak, masked) = (-20..=20)
        .map(|i| scattering(f, root + 1e-3 * i as f64))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    assert!(masked, "{f}: peak near {root} not masked");
    for dir in [-1.0, 1.0] {
        // Nearest unmasked sample at least 0.2 away.
        let (v, at) = (0..40)
            .map(|i| root + dir * (0.2 + 0.05 * i as f64))
            .map(|x| (scattering(f, x), x))
            .find(|((_, m), _)| !m)
            .map(|((v, _), x)| (v, x))
            .unwrap();
        assert!(peak > 5.0 * v, "{f} at {root}: {peak} vs neighbour {v} at {at}");
    }
}

#[test]
fn mfie_scattering_peaks_at_resonances() {
    mfie_peak(Formulation::TeMfie, 1, 40.0);
    mfie_peak(Formulation::TmMfie, 5, 40.0);
    mfie_peak(Formulation::TeMfie, 3, 25.0);
    mfie_peak(Formulation::TmMfie, 2, 60.0);
}
