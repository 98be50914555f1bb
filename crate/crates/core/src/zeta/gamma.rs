//! Complex log-gamma, digamma and overflow-free log sin / log cos.

use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

use crate::error::{LabError, Result};

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;
pub(crate) const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Even-index Bernoulli numbers B_2, B_4, ..., B_30.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const STIRLING_TERMS: usize = 10;
const SHIFT_MODULUS: f64 = 14.0;

/// log Γ(z) on the principal branch for Re z > 0 (continuous in z, matching
/// the branch obtained by upward recurrence); reflection for Re z < 0.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        // Γ(z)Γ(1-z) = π / sin(πz); branch of the result is irrelevant here.
        return Complex64::new(LN_PI, 0.0) - ln_sin(z * PI) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_MODULUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling_ln_gamma(w) - shift
}

fn stirling_ln_gamma(z: Complex64) -> Complex64 {
    let mut acc = (z - 0.5) * z.ln() - z + 0.5 * LN_2PI;
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for k in 1..=STIRLING_TERMS {
        let b = BERNOULLI_EVEN[k - 1];
        let kk = (2 * k) as f64;
        acc += p * (b / (kk * (kk - 1.0)));
        p *= inv2;
    }
    acc
}

/// Digamma ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-14 {
        return Err(LabError::PoleAtNonpositiveInteger(z.re));
    }
    if z.re < 0.0 {
        // ψ(z) = ψ(1 - z) - π cot(πz)
        let pz = z * PI;
        let cot = pz.cos() / pz.sin();
        return Ok(digamma(Complex64::new(1.0, 0.0) - z)? - cot * PI);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 10.0 {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = w.ln() - inv * 0.5;
    let mut p = inv2;
    for k in 1..=STIRLING_TERMS {
        let kk = (2 * k) as f64;
        acc -= p * (BERNOULLI_EVEN[k - 1] / kk);
        p *= inv2;
    }
    Ok(acc - shift)
}

/// log sin(z) evaluated without forming sin(z) when |Im z| is large.
pub fn ln_sin(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im > 1.0 {
        // sin z = (i/2) e^{-iz} (1 - e^{2iz})
        let e = (2.0 * i * z).exp();
        Complex64::new(-LN_2, PI / 2.0) - i * z + (Complex64::new(1.0, 0.0) - e).ln()
    } else if z.im < -1.0 {
        // sin z = (1/(2i)) e^{iz} (1 - e^{-2iz})
        let e = (-2.0 * i * z).exp();
        Complex64::new(-LN_2, -PI / 2.0) + i * z + (Complex64::new(1.0, 0.0) - e).ln()
    } else {
        z.sin().ln()
    }
}

/// log cos(z) evaluated without forming cos(z) when |Im z| is large.
pub fn ln_cos(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im > 1.0 {
        let e = (2.0 * i * z).exp();
        Complex64::new(-LN_2, 0.0) - i * z + (Complex64::new(1.0, 0.0) + e).ln()
    } else if z.im < -1.0 {
        let e = (-2.0 * i * z).exp();
        Complex64::new(-LN_2, 0.0) + i * z + (Complex64::new(1.0, 0.0) + e).ln()
    } else {
        z.cos().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ln_gamma_real_values() {
        assert!((ln_gamma(c(1.0, 0.0))).norm() < 1e-14);
        assert!((ln_gamma(c(5.0, 0.0)).re - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(c(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_recurrence_and_reflection() {
        for &z in &[c(0.3, 2.0), c(2.5, -7.0), c(-3.7, 1.2), c(0.25, 40.0)] {
            let lhs = (ln_gamma(z + 1.0) - ln_gamma(z) - z.ln()).exp();
            assert!((lhs - 1.0).norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn ln_gamma_modulus_on_vertical_line() {
        // |Γ(1/2 + it)|^2 = π / cosh(πt)
        for &t in &[0.5, 3.0, 20.0, 150.0] {
            let lg = ln_gamma(c(0.5, t)).re;
            let expect = 0.5 * (PI.ln() - (PI * t).cosh().ln());
            assert!((lg - expect).abs() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(c(1.0, 0.0)).unwrap().re + euler).abs() < 1e-14);
        // ψ(5) = -γ + 1 + 1/2 + 1/3 + 1/4
        let h4 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
        assert!((digamma(c(5.0, 0.0)).unwrap().re - (h4 - euler)).abs() < 1e-14);
        assert!((digamma(c(5.0, 0.0)).unwrap().re - 1.506_117_668_431_800_5).abs() < 1e-14);
        assert!(matches!(digamma(c(-2.0, 0.0)), Err(LabError::PoleAtNonpositiveInteger(_))));
        assert!(matches!(digamma(c(0.0, 0.0)), Err(LabError::PoleAtNonpositiveInteger(_))));
    }

    #[test]
    fn digamma_matches_ln_gamma_derivative() {
        let h = 1e-5;
        for &z in &[c(0.7, 3.0), c(-2.3, 0.4), c(4.0, -30.0)] {
            let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
            let psi = digamma(z).unwrap();
            assert!((fd - psi).norm() < 1e-8, "z = {z}");
        }
    }

    #[test]
    fn log_trig_agree_with_direct() {
        for &z in &[c(0.3, 5.0), c(1.2, -4.0), c(-0.4, 0.2)] {
            assert!((ln_sin(z).exp() - z.sin()).norm() < 1e-12 * z.sin().norm());
            assert!((ln_cos(z).exp() - z.cos()).norm() < 1e-12 * z.cos().norm());
        }
    }
}
