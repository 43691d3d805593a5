use num_complex::Complex;

use super::BesselTable;
use crate::error::Result;
use crate::real::Real;

const ASYMPTOTIC_FROM: f64 = 25.0;

/// `(H_0^{(2)}(z), H_1^{(2)}(z))` for kernel evaluation.
///
/// Large `|z|` uses the Hankel expansion, whose smallest term is about
/// `e^{-2|z|}`; below that the recurrence table.
pub fn hankel2_01<T: Real>(z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    if z.norm() < T::lit(ASYMPTOTIC_FROM) {
        let t = BesselTable::new(z, 1)?;
        let h0 = t.eval(0)?.h().to_complex();
        let h1 = t.eval(1)?.h().to_complex();
        return Ok((h0, h1));
    }
    Ok((asymptotic(0, z), asymptotic(1, z)))
}

fn asymptotic<T: Real>(nu: i64, z: Complex<T>) -> Complex<T> {
    let j = Complex::new(T::zero(), T::one());
    let mu = T::of_int(4 * nu * nu);
    let omega = z - T::of_int(nu) * T::FRAC_PI_2() - T::FRAC_PI_4();
    let pref = (Complex::new(T::lit(2.0), T::zero()) / (z * T::PI())).sqrt() * (-j * omega).exp();
    let mut sum = Complex::new(T::one(), T::zero());
    let mut term = Complex::new(T::one(), T::zero());
    let mut prev_mag = T::infinity();
    for k in 1..80i64 {
        let odd = T::of_int(2 * k - 1);
        term = term * (-j) * (mu - odd * odd) / (z * T::of_int(8 * k));
        let mag = term.norm();
        if mag > prev_mag {
            break;
        }
        sum = sum + term;
        prev_mag = mag;
        if mag < T::epsilon() * T::lit(0.1) {
            break;
        }
    }
    pref * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_branch_matches_table() {
        for &(re, im) in &[(25.5, 0.0), (40.0, -3.0), (80.0, 0.0), (300.0, -2.0)] {
            let z = Complex::new(re, im);
            let t = BesselTable::new(z, 1).unwrap();
            let (h0, h1) = hankel2_01(z).unwrap();
            let r0 = t.eval(0).unwrap().h().to_complex();
            let r1 = t.eval(1).unwrap().h().to_complex();
            assert!((h0 - r0).norm() < 1e-12 * r0.norm(), "{z}");
            assert!((h1 - r1).norm() < 1e-12 * r1.norm(), "{z}");
        }
    }

    #[test]
    fn small_argument_branch() {
        let (h0, _) = hankel2_01(Complex::new(1.0f64, 0.0)).unwrap();
        assert!((h0.re - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((h0.im + 0.088_256_964_215_676_96).abs() < 1e-14);
    }
}
