//! Euler–Maclaurin summation for the Hurwitz zeta function and its
//! s-derivative. The Riemann zeta function is the case a = 1.

use num_complex::Complex64;

use super::gamma::BERNOULLI_EVEN;
use crate::summation::ComplexSum;

/// Number of Bernoulli correction terms.
pub(crate) const EM_CORRECTIONS: usize = 12;

/// The pieces of an Euler–Maclaurin evaluation of sum_{n>=0} (n + a)^{-s}.
///
/// `pole_base` is v^{1-s} with v = n_terms + a, so the full value is
/// `regular + pole_base / (s - 1)`. Keeping the pole term separate lets
/// character sums cancel it analytically.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EmParts {
    pub regular: Complex64,
    pub regular_deriv: Complex64,
    pub pole_base: Complex64,
    pub ln_v: f64,
    pub err: f64,
    pub terms: usize,
}

impl EmParts {
    pub fn value(&self, s: Complex64) -> Complex64 {
        self.regular + self.pole_base / (s - 1.0)
    }

    pub fn deriv(&self, s: Complex64) -> Complex64 {
        let sm1 = s - 1.0;
        self.regular_deriv - self.pole_base * self.ln_v / sm1 - self.pole_base / (sm1 * sm1)
    }
}

fn coefficients() -> [f64; EM_CORRECTIONS + 1] {
    // B_{2k} / (2k)!
    let mut out = [0.0; EM_CORRECTIONS + 1];
    let mut fact = 1.0f64;
    for k in 1..=EM_CORRECTIONS + 1 {
        fact *= ((2 * k - 1) * (2 * k)) as f64;
        out[k - 1] = BERNOULLI_EVEN[k - 1] / fact;
    }
    out
}

/// Euler–Maclaurin evaluation with `n_terms` explicit terms n = 0..n_terms-1.
pub(crate) fn hurwitz_parts(s: Complex64, a: f64, n_terms: usize, with_deriv: bool) -> EmParts {
    let coef = coefficients();
    let mut head = ComplexSum::new();
    let mut dhead = ComplexSum::new();
    let mut abs_sum = 0.0;
    for n in 0..n_terms {
        let base = n as f64 + a;
        let ln_b = base.ln();
        let term = (-s * ln_b).exp();
        abs_sum += term.norm();
        head.add(term);
        if with_deriv {
            dhead.add(-term * ln_b);
        }
    }
    let v = n_terms as f64 + a;
    let ln_v = v.ln();
    let v_ms = (-s * ln_v).exp();
    let pole_base = v_ms * v;
    let mut regular = head.value() + v_ms * 0.5;
    let mut regular_deriv = dhead.value() - v_ms * (0.5 * ln_v);

    // term_k = c_k * P_k(s) * v^{-s-2k+1}, P_k(s) = s (s+1) ... (s+2k-2)
    let mut poly = s;
    let mut dpoly = Complex64::new(1.0, 0.0);
    let mut vpow = v_ms / v;
    let inv_v2 = 1.0 / (v * v);
    let mut err = 0.0;
    for (k, &c) in coef.iter().enumerate() {
        let term = poly * vpow * c;
        if k == EM_CORRECTIONS {
            err = term.norm();
            break;
        }
        regular += term;
        if with_deriv {
            regular_deriv += (dpoly * vpow - poly * vpow * ln_v) * c;
        }
        let j = (2 * k + 1) as f64;
        let f1 = s + j;
        let f2 = s + (j + 1.0);
        let prod = f1 * f2;
        dpoly = dpoly * prod + poly * (f1 + f2);
        poly *= prod;
        vpow *= inv_v2;
    }
    let roundoff = 4.0 * f64::EPSILON * (abs_sum + regular.norm() + pole_base.norm());
    EmParts {
        regular,
        regular_deriv,
        pole_base,
        ln_v,
        err: err + roundoff,
        terms: n_terms.max(1),
    }
}
