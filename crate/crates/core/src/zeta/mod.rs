//! Riemann zeta, its derivative and logarithmic derivative, the
//! functional-equation factor 𝒳(s), Hardy's Z and θ, Hurwitz zeta and
//! Dirichlet L-functions, all in binary64 for |Im s| ≤ 5·10⁴.

mod euler_maclaurin;
pub mod gamma;
mod lfunc;
mod riemann_siegel;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::error::{LabError, Result};
use euler_maclaurin::hurwitz_parts;

pub use gamma::{digamma, ln_cos, ln_gamma, ln_sin};
pub use lfunc::{hurwitz_zeta, l_function, l_function_with_deriv, CharacterRef};

/// Supported height window.
pub const MAX_HEIGHT: f64 = 5.0e4;
/// Guard radius around s = 1.
pub const POLE_GUARD: f64 = 1e-12;
/// Riemann–Siegel is used for Z(t) at and above this height.
pub const RS_THRESHOLD: f64 = 200.0;
pub(crate) const DEFAULT_MIN_TERMS: usize = 30;
const DOUBLINGS: usize = 3;

/// A computed value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub est_abs_error: f64,
    pub terms_used: usize,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_pole(s: Complex64) -> Result<()> {
    if (s - 1.0).norm() < POLE_GUARD {
        return Err(LabError::PoleAtOne { re: s.re, im: s.im });
    }
    Ok(())
}

fn em_terms(s: Complex64) -> usize {
    DEFAULT_MIN_TERMS.max((2.0 * s.im.abs()).ceil() as usize)
}

/// ζ and ζ' by Euler–Maclaurin, doubling the cutoff until the estimate meets
/// the target. An infinite target accepts the first pass.
fn em_zeta(s: Complex64, target: f64, with_deriv: bool) -> Result<(EvalResult, EvalResult)> {
    let mut n = em_terms(s);
    let mut last_err = f64::INFINITY;
    for _ in 0..=DOUBLINGS {
        // ζ(s) = Σ_{k=0}^{n-2} (k+1)^{-s} + tail at v = n
        let p = hurwitz_parts(s, 1.0, n - 1, with_deriv);
        let v = EvalResult { value: p.value(s), est_abs_error: p.err, terms_used: n };
        let d = EvalResult {
            value: p.deriv(s),
            est_abs_error: p.err * (1.0 + (n as f64).ln()),
            terms_used: n,
        };
        if v.est_abs_error <= target {
            return Ok((v, d));
        }
        if v.est_abs_error >= last_err {
            break;
        }
        last_err = v.est_abs_error;
        n *= 2;
    }
    Err(LabError::PrecisionUnreachable { target, estimate: last_err })
}

/// ζ(s) with estimated absolute error at most `target_abs_err`.
pub fn zeta(s: Complex64, target_abs_err: f64) -> Result<EvalResult> {
    Ok(zeta_with_deriv(s, target_abs_err)?.0)
}

/// ζ(s) and ζ'(s). The error target applies to ζ(s).
pub fn zeta_with_deriv(s: Complex64, target_abs_err: f64) -> Result<(EvalResult, EvalResult)> {
    check_pole(s)?;
    if s.re >= -2.0 {
        return em_zeta(s, target_abs_err, true);
    }
    // ζ(s) = 𝒳(s) ζ(1−s), ζ'(s) = 𝒳'(s) ζ(1−s) − 𝒳(s) ζ'(1−s)
    let chi = chi_factor_unchecked(s);
    let chi_abs = chi.norm().max(f64::MIN_POSITIVE);
    let inner_target = if target_abs_err.is_finite() { target_abs_err / chi_abs } else { f64::INFINITY };
    let (z, dz) = em_zeta(c(1.0, 0.0) - s, inner_target, true)?;
    let dchi = chi * chi_log_deriv(s)?;
    let value = chi * z.value;
    let err = chi_abs * z.est_abs_error + 8.0 * f64::EPSILON * (1.0 + s.norm()) * value.norm();
    let deriv = dchi * z.value - chi * dz.value;
    Ok((
        EvalResult { value, est_abs_error: err, terms_used: z.terms_used },
        EvalResult {
            value: deriv,
            est_abs_error: chi_abs * dz.est_abs_error + dchi.norm() * z.est_abs_error,
            terms_used: z.terms_used,
        },
    ))
}

/// Fast ζ(s) with the default cutoff and no precision loop.
pub fn zeta_value(s: Complex64) -> Result<Complex64> {
    Ok(zeta_with_deriv(s, f64::INFINITY)?.0.value)
}

/// Fast (ζ(s), ζ'(s)) with the default cutoff.
pub fn zeta_and_deriv(s: Complex64) -> Result<(Complex64, Complex64)> {
    let (z, d) = zeta_with_deriv(s, f64::INFINITY)?;
    Ok((z.value, d.value))
}

/// ζ'(s)/ζ(s). Fails near s = 1 and where |ζ'/ζ| exceeds 10⁶, which places
/// s within about 10⁻⁶ of a simple zero.
pub fn zeta_log_deriv(s: Complex64, target_abs_err: f64) -> Result<EvalResult> {
    if (s - 1.0).norm() < 1e-6 {
        return Err(LabError::NearSingularity { re: s.re, im: s.im });
    }
    let (z, d) = zeta_with_deriv(s, f64::INFINITY)?;
    let zn = z.value.norm();
    if zn == 0.0 || d.value.norm() > 1e6 * zn {
        return Err(LabError::NearSingularity { re: s.re, im: s.im });
    }
    let ratio = d.value / z.value;
    let err = (d.est_abs_error + ratio.norm() * z.est_abs_error) / zn;
    if err > target_abs_err {
        // retry with a tighter ζ evaluation
        let (z2, d2) = zeta_with_deriv(s, target_abs_err * zn * 0.25)?;
        let r2 = d2.value / z2.value;
        let e2 = (d2.est_abs_error + r2.norm() * z2.est_abs_error) / z2.value.norm();
        if e2 > target_abs_err {
            return Err(LabError::PrecisionUnreachable { target: target_abs_err, estimate: e2 });
        }
        return Ok(EvalResult { value: r2, est_abs_error: e2, terms_used: z2.terms_used });
    }
    Ok(EvalResult { value: ratio, est_abs_error: err, terms_used: z.terms_used })
}

/// Fast ζ'/ζ(s) without the proximity check.
pub fn zeta_log_deriv_value(s: Complex64) -> Result<Complex64> {
    let (z, d) = zeta_and_deriv(s)?;
    Ok(d / z)
}

/// log 𝒳(s), or None where 𝒳 vanishes (s a non-positive even integer).
fn ln_chi(s: Complex64) -> Option<Complex64> {
    let ln_pi = gamma::LN_PI;
    if s.re >= 0.5 {
        // 𝒳(s) = 2^{s−1} π^s / (Γ(s) cos(πs/2))
        Some((s - 1.0) * LN_2 + s * ln_pi - ln_gamma(s) - ln_cos(s * (PI / 2.0)))
    } else {
        let half = s * (PI / 2.0);
        if s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0 && (s.re as i64) % 2 == 0 {
            return None;
        }
        let one_minus = c(1.0, 0.0) - s;
        Some(s * LN_2 + (s - 1.0) * ln_pi + ln_gamma(one_minus) + ln_sin(half))
    }
}

fn chi_factor_unchecked(s: Complex64) -> Complex64 {
    match ln_chi(s) {
        Some(l) => l.exp(),
        None => c(0.0, 0.0),
    }
}

/// The functional-equation factor 𝒳(s) with ζ(s) = 𝒳(s) ζ(1−s).
pub fn chi_factor(s: Complex64) -> Result<EvalResult> {
    if s.im.abs() > MAX_HEIGHT {
        return Err(LabError::OverflowRisk(s.im.abs()));
    }
    if s.im == 0.0 && s.re > 0.0 && s.re.fract() == 0.0 && (s.re as i64) % 2 == 1 {
        return Err(LabError::NearSingularity { re: s.re, im: s.im });
    }
    let value = chi_factor_unchecked(s);
    let err = 16.0 * f64::EPSILON * (1.0 + s.norm()) * value.norm();
    Ok(EvalResult { value, est_abs_error: err, terms_used: 1 })
}

/// 𝒳'(s)/𝒳(s) = log 2π − ψ(1−s) + (π/2) cot(πs/2).
pub fn chi_log_deriv(s: Complex64) -> Result<Complex64> {
    let half = s * (PI / 2.0);
    let cot = if half.im.abs() > 20.0 {
        c(0.0, -half.im.signum())
    } else {
        half.cos() / half.sin()
    };
    Ok(c(LN_2 + gamma::LN_PI, 0.0) - digamma(c(1.0, 0.0) - s)? + cot * (PI / 2.0))
}

/// Riemann–Siegel θ(t). Stirling series for t ≥ 10, log-gamma below.
pub fn theta(t: f64) -> f64 {
    if t >= 10.0 {
        let inv = 1.0 / t;
        let inv2 = inv * inv;
        0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
            + inv * (1.0 / 48.0 + inv2 * (7.0 / 5760.0 + inv2 * (31.0 / 80640.0 + inv2 * (127.0 / 430080.0))))
    } else {
        ln_gamma(c(0.25, 0.5 * t)).im - 0.5 * t * gamma::LN_PI
    }
}

/// Hardy Z(t) with its error estimate.
pub fn hardy_z_with_error(t: f64) -> Result<(f64, f64)> {
    if !(t >= 2.0) || t > MAX_HEIGHT {
        return Err(LabError::UnsupportedRange(t));
    }
    let th = theta(t);
    if t >= RS_THRESHOLD {
        let (z, e, _) = riemann_siegel::hardy_z_rs(t, th);
        return Ok((z, e));
    }
    let (zv, _) = em_zeta(c(0.5, t), f64::INFINITY, false)?;
    let z = (Complex64::from_polar(1.0, th) * zv.value).re;
    Ok((z, zv.est_abs_error + 4.0 * f64::EPSILON * t * zv.value.norm()))
}

/// (Z(t), θ(t)) with Z(t) = e^{iθ(t)} ζ(1/2 + it).
pub fn hardy_z_theta(t: f64) -> Result<(f64, f64)> {
    let (z, _) = hardy_z_with_error(t)?;
    Ok((z, theta(t)))
}

/// Hardy Z(t).
pub fn hardy_z(t: f64) -> Result<f64> {
    Ok(hardy_z_with_error(t)?.0)
}

/// ζ(1/2 + it) = Z(t) e^{−iθ(t)} for t ≥ 2.
pub fn zeta_critical(t: f64) -> Result<Complex64> {
    let (z, th) = hardy_z_theta(t)?;
    Ok(Complex64::from_polar(z, -th))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        let z2 = zeta(c(2.0, 0.0), 1e-12).unwrap();
        assert!((z2.value.re - PI * PI / 6.0).abs() < 1e-14);
        let z0 = zeta(c(0.0, 0.0), 1e-12).unwrap();
        assert!((z0.value.re + 0.5).abs() < 1e-14);
        let zm1 = zeta(c(-1.0, 0.0), 1e-11).unwrap();
        assert!((zm1.value.re + 1.0 / 12.0).abs() < 1e-12);
        // trivial zero through the functional-equation branch
        let zm4 = zeta(c(-4.0, 0.0), 1e-12).unwrap();
        assert!(zm4.value.norm() < 1e-15);
        let zm3 = zeta(c(-3.0, 0.0), 1e-12).unwrap();
        assert!((zm3.value.re - 1.0 / 120.0).abs() < 1e-14);
    }

    #[test]
    fn pole_guard() {
        assert!(matches!(zeta(c(1.0, 0.0), 1e-8), Err(LabError::PoleAtOne { .. })));
        let s = c(1.0 + 1e-4, 0.0);
        let v = zeta(s, 1e-8).unwrap().value;
        assert!(((s - 1.0) * v - 1.0).norm() < 1e-3);
    }

    #[test]
    fn log_derivative_at_two() {
        let v = zeta_log_deriv(c(2.0, 0.0), 1e-12).unwrap().value;
        assert!((v.re + 0.569_960_993_094_532_8).abs() < 1e-13);
    }

    #[test]
    fn chi_at_half_is_one() {
        let v = chi_factor(c(0.5, 0.0)).unwrap().value;
        assert!((v - 1.0).norm() < 1e-14);
        assert!(matches!(chi_factor(c(0.5, 6e4)), Err(LabError::OverflowRisk(_))));
    }

    #[test]
    fn functional_equation_both_branches() {
        for &s in &[c(0.3, 20.0), c(1.7, 300.0), c(-0.8, 45.0), c(-3.5, 12.0)] {
            let lhs = zeta_value(s).unwrap();
            let rhs = chi_factor(s).unwrap().value * zeta_value(c(1.0, 0.0) - s).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()), "s = {s}");
        }
    }

    #[test]
    fn chi_log_derivative_matches_difference() {
        let s = c(0.2, 33.0);
        let h = 1e-6;
        let fd = (chi_factor(s + h).unwrap().value - chi_factor(s - h).unwrap().value)
            / (2.0 * h)
            / chi_factor(s).unwrap().value;
        assert!((chi_log_deriv(s).unwrap() - fd).norm() < 1e-6);
    }

    #[test]
    fn theta_branches_agree_at_ten() {
        let a = ln_gamma(c(0.25, 5.0)).im - 5.0 * gamma::LN_PI;
        let inv = 0.1f64;
        let b = 5.0 * (10.0 / (2.0 * PI)).ln() - 5.0 - PI / 8.0
            + inv * (1.0 / 48.0 + inv * inv * (7.0 / 5760.0 + inv * inv * (31.0 / 80640.0 + inv * inv * 127.0 / 430080.0)));
        assert!((a - b).abs() < 1e-9);
        assert!((theta(10.0) - a).abs() < 1e-9);
    }

    #[test]
    fn riemann_siegel_agrees_with_euler_maclaurin() {
        for &t in &[200.0, 250.3, 731.9, 1500.25, 5000.7] {
            let (rs, _, _) = riemann_siegel::hardy_z_rs(t, theta(t));
            let em = (Complex64::from_polar(1.0, theta(t)) * zeta_value(c(0.5, t)).unwrap()).re;
            assert!((rs - em).abs() < 2e-7, "t = {t}: rs {rs} em {em}");
        }
    }

    #[test]
    fn each_riemann_siegel_correction_reduces_error() {
        for &t in &[210.0, 333.3, 517.0] {
            let em = (Complex64::from_polar(1.0, theta(t)) * zeta_value(c(0.5, t)).unwrap()).re;
            let errs: Vec<f64> = (1..=riemann_siegel::RS_CORRECTIONS)
                .map(|k| (riemann_siegel::hardy_z_rs_truncated(t, theta(t), k).0 - em).abs())
                .collect();
            for w in errs.windows(2) {
                assert!(w[1] < w[0], "t = {t}: {errs:?}");
            }
            assert!(errs[4] < 1e-8, "t = {t}: {errs:?}");
        }
    }

    #[test]
    fn first_zero_sign_change() {
        assert!(hardy_z(14.13).unwrap() * hardy_z(14.14).unwrap() < 0.0);
        assert!(matches!(hardy_z(1.0), Err(LabError::UnsupportedRange(_))));
    }
}
