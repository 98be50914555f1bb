//! Hurwitz zeta and Dirichlet L-functions modulo a prime.

use num_complex::Complex64;

use super::euler_maclaurin::hurwitz_parts;
use super::{zeta_with_deriv, EvalResult, DEFAULT_MIN_TERMS};
use crate::error::{LabError, Result};
use crate::summation::ComplexSum;

/// Borrowed view of a Dirichlet character: `values[a]` is χ(a) for a in 0..modulus.
#[derive(Debug, Clone, Copy)]
pub struct CharacterRef<'a> {
    pub modulus: u64,
    pub values: &'a [Complex64],
}

impl CharacterRef<'_> {
    pub fn is_principal(&self) -> bool {
        self.values
            .iter()
            .skip(1)
            .all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-12)
    }

    pub fn at(&self, n: i64) -> Complex64 {
        let m = self.modulus as i64;
        self.values[n.rem_euclid(m) as usize]
    }
}

fn terms_for(s: Complex64) -> usize {
    DEFAULT_MIN_TERMS.max((s.im.abs()).ceil() as usize)
}

/// Hurwitz zeta ζ(s, a) for 0 < a ≤ 1.
pub fn hurwitz_zeta(s: Complex64, a: f64, target_abs_err: f64) -> Result<EvalResult> {
    if (s - 1.0).norm() < 1e-12 {
        return Err(LabError::PoleAtOne { re: s.re, im: s.im });
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(LabError::PreconditionViolated(format!("Hurwitz parameter a = {a} not in (0, 1]")));
    }
    let mut n = terms_for(s);
    let mut best = None;
    for _ in 0..4 {
        let p = hurwitz_parts(s, a, n, false);
        let r = EvalResult { value: p.value(s), est_abs_error: p.err, terms_used: p.terms };
        if r.est_abs_error <= target_abs_err {
            return Ok(r);
        }
        best = Some(r);
        n *= 2;
    }
    let r = best.expect("loop ran");
    Err(LabError::PrecisionUnreachable { target: target_abs_err, estimate: r.est_abs_error })
}

/// (e^z − 1)/z and its derivative, stable near z = 0.
fn exprel_pair(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let mut val = Complex64::new(0.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..24 {
            fact *= (k + 1) as f64;
            val += zp / fact;
            if k + 1 < 24 {
                der += zp * ((k + 1) as f64) / (fact * (k + 2) as f64);
            }
            zp *= z;
        }
        (val, der)
    } else {
        let e = z.exp();
        ((e - 1.0) / z, (z * e - e + 1.0) / (z * z))
    }
}

/// L(s, χ) and L'(s, χ) for a character modulo a prime.
pub fn l_function_with_deriv(s: Complex64, chi: CharacterRef<'_>) -> Result<(EvalResult, EvalResult)> {
    let x = chi.modulus;
    if chi.is_principal() {
        let (z, dz) = zeta_with_deriv(s, f64::INFINITY)?;
        let lnx = (x as f64).ln();
        let xs = (-s * lnx).exp();
        let factor = Complex64::new(1.0, 0.0) - xs;
        let value = z.value * factor;
        let deriv = dz.value * factor + z.value * xs * lnx;
        let err = z.est_abs_error * factor.norm();
        return Ok((
            EvalResult { value, est_abs_error: err, terms_used: z.terms_used },
            EvalResult { value: deriv, est_abs_error: dz.est_abs_error * factor.norm(), terms_used: z.terms_used },
        ));
    }
    let xf = x as f64;
    let lnx = xf.ln();
    let n = terms_for(s);
    let w = Complex64::new(1.0, 0.0) - s;
    let mut reg = ComplexSum::new();
    let mut dreg = ComplexSum::new();
    let mut err = 0.0;
    for a in 1..x {
        let c = chi.values[a as usize];
        if c.norm() == 0.0 {
            continue;
        }
        let p = hurwitz_parts(s, a as f64 / xf, n, true);
        // Σ χ(a) = 0 removes the pole: v^{1−s}/(s−1) → (v^{1−s} − 1)/(s−1)
        let (e, de) = exprel_pair(w * p.ln_v);
        let pole = -p.ln_v * e;
        let dpole = p.ln_v * p.ln_v * de;
        reg.add(c * (p.regular + pole));
        dreg.add(c * (p.regular_deriv + dpole));
        err += c.norm() * p.err;
    }
    let xs = (-s * lnx).exp();
    let f = reg.value();
    let value = xs * f;
    let deriv = xs * (dreg.value() - f * lnx);
    let e = err * xs.norm();
    Ok((
        EvalResult { value, est_abs_error: e, terms_used: n },
        EvalResult { value: deriv, est_abs_error: e * (1.0 + lnx + (n as f64).ln()), terms_used: n },
    ))
}

/// L(s, χ) for a character modulo an odd prime.
pub fn l_function(s: Complex64, chi: CharacterRef<'_>) -> Result<EvalResult> {
    Ok(l_function_with_deriv(s, chi)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mod3() -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
    }

    #[test]
    fn quadratic_mod_three_at_one() {
        let v = mod3();
        let chi = CharacterRef { modulus: 3, values: &v };
        let l = l_function(Complex64::new(1.0, 0.0), chi).unwrap();
        assert!((l.value.re - PI / (3.0f64).sqrt() / 3.0).abs() < 1e-12);
        assert!(l.value.im.abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_difference_near_one() {
        let v = mod3();
        let chi = CharacterRef { modulus: 3, values: &v };
        let s = Complex64::new(1.0 + 1e-9, 0.3);
        let h = 1e-5;
        let (_, d) = l_function_with_deriv(s, chi).unwrap();
        let fd = (l_function(s + h, chi).unwrap().value - l_function(s - h, chi).unwrap().value) / (2.0 * h);
        assert!((d.value - fd).norm() < 1e-8);
    }

    #[test]
    fn principal_has_pole() {
        let v = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let chi = CharacterRef { modulus: 3, values: &v };
        assert!(matches!(l_function(Complex64::new(1.0, 0.0), chi), Err(LabError::PoleAtOne { .. })));
    }

    #[test]
    fn hurwitz_at_one_is_zeta() {
        let s = Complex64::new(0.5, 30.0);
        let h = hurwitz_zeta(s, 1.0, 1e-10).unwrap();
        let z = super::super::zeta(s, 1e-10).unwrap();
        assert!((h.value - z.value).norm() < 1e-11);
    }
}
