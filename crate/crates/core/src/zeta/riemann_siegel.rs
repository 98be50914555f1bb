//! Riemann–Siegel formula for Hardy's Z(t) with correction terms C0..C4.
//!
//! The correction coefficients are polynomials in derivatives of
//! Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp). Derivatives come from a Cauchy
//! integral on a circle, and each C_k is then tabulated once as a Chebyshev
//! series on p ∈ [0, 1].

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::summation::Neumaier;

const CAUCHY_NODES: usize = 64;
const CAUCHY_RADIUS: f64 = 0.5;
const MAX_DERIV: usize = 12;
const CHEB_DEGREE: usize = 48;
/// Number of correction terms C0..C4.
pub const RS_CORRECTIONS: usize = 5;

fn psi(z: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    let num = (two_pi * (z * z - z - 1.0 / 16.0)).cos();
    let den = (two_pi * z).cos();
    num / den
}

/// Ψ^{(k)}(p) for k = 0..=12.
pub(crate) fn psi_derivatives(p: f64) -> [f64; MAX_DERIV + 1] {
    let mut samples = [Complex64::new(0.0, 0.0); CAUCHY_NODES];
    let mut angles = [0.0; CAUCHY_NODES];
    for j in 0..CAUCHY_NODES {
        // half-step offset keeps nodes off the real axis
        let phi = 2.0 * PI * (j as f64 + 0.5) / CAUCHY_NODES as f64;
        angles[j] = phi;
        samples[j] = psi(Complex64::new(p, 0.0) + Complex64::from_polar(CAUCHY_RADIUS, phi));
    }
    let mut out = [0.0; MAX_DERIV + 1];
    let mut fact = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let mut acc = Neumaier::new();
        for j in 0..CAUCHY_NODES {
            let w = Complex64::from_polar(1.0, -(k as f64) * angles[j]);
            acc.add((samples[j] * w).re);
        }
        *slot = acc.value() / CAUCHY_NODES as f64 * fact / CAUCHY_RADIUS.powi(k as i32);
    }
    out
}

/// C0..C4 evaluated directly from the Cauchy derivatives.
pub(crate) fn rs_coefficients_direct(p: f64) -> [f64; RS_CORRECTIONS] {
    let d = psi_derivatives(p);
    let p2 = PI * PI;
    let p4 = p2 * p2;
    let p6 = p4 * p2;
    let p8 = p4 * p4;
    [
        d[0],
        -d[3] / (96.0 * p2),
        d[2] / (64.0 * p2) + d[6] / (18432.0 * p4),
        -d[1] / (64.0 * p2) - d[5] / (3840.0 * p4) - d[9] / (5_308_416.0 * p6),
        d[0] / (128.0 * p2)
            + 19.0 * d[4] / (24576.0 * p4)
            + 11.0 * d[8] / (5_898_240.0 * p6)
            + d[12] / (2_038_431_744.0 * p8),
    ]
}

struct ChebTables {
    coef: [[f64; CHEB_DEGREE + 1]; RS_CORRECTIONS],
}

fn tables() -> &'static ChebTables {
    static TABLES: OnceLock<ChebTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let n = CHEB_DEGREE + 1;
        let mut vals = vec![[0.0; RS_CORRECTIONS]; n];
        for (j, v) in vals.iter_mut().enumerate() {
            let x = (PI * (j as f64 + 0.5) / n as f64).cos();
            *v = rs_coefficients_direct(0.5 * (x + 1.0));
        }
        let mut coef = [[0.0; CHEB_DEGREE + 1]; RS_CORRECTIONS];
        for (k, row) in coef.iter_mut().enumerate() {
            for (m, c) in row.iter_mut().enumerate() {
                let mut acc = Neumaier::new();
                for (j, v) in vals.iter().enumerate() {
                    let ang = PI * m as f64 * (j as f64 + 0.5) / n as f64;
                    acc.add(v[k] * ang.cos());
                }
                *c = 2.0 * acc.value() / n as f64;
            }
            row[0] *= 0.5;
        }
        ChebTables { coef }
    })
}

/// C0..C4 at p ∈ [0, 1] from the Chebyshev tables.
pub(crate) fn rs_coefficients(p: f64) -> [f64; RS_CORRECTIONS] {
    let t = tables();
    let x = 2.0 * p - 1.0;
    let mut out = [0.0; RS_CORRECTIONS];
    for (k, o) in out.iter_mut().enumerate() {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for m in (1..=CHEB_DEGREE).rev() {
            let b0 = 2.0 * x * b1 - b2 + t.coef[k][m];
            b2 = b1;
            b1 = b0;
        }
        *o = x * b1 - b2 + t.coef[k][0];
    }
    out
}

/// Z(t) by the Riemann–Siegel formula given θ(t). Returns (Z, error estimate, terms).
pub(crate) fn hardy_z_rs(t: f64, theta: f64) -> (f64, f64, usize) {
    hardy_z_rs_truncated(t, theta, RS_CORRECTIONS)
}

/// Riemann–Siegel with only the first `corrections` coefficients.
pub(crate) fn hardy_z_rs_truncated(t: f64, theta: f64, corrections: usize) -> (f64, f64, usize) {
    let tau = (t / (2.0 * PI)).sqrt();
    let n = tau.floor() as usize;
    let p = tau - n as f64;
    let mut main = Neumaier::new();
    let mut abs_sum = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        let term = (theta - t * kf.ln()).cos() / kf.sqrt();
        abs_sum += term.abs();
        main.add(term);
    }
    let coeffs = rs_coefficients(p);
    let inv_tau = 1.0 / tau;
    let mut corr = 0.0;
    let mut pw = 1.0;
    let mut last = 0.0;
    for c in coeffs.iter().take(corrections) {
        last = c * pw;
        corr += last;
        pw *= inv_tau;
    }
    let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = tau.powf(-0.5);
    let z = 2.0 * main.value() + sign * scale * corr;
    // size of the next omitted term, bounded via the last kept one
    let trunc = scale * last.abs().max(1e-3 * pw) * inv_tau;
    let phase_err = 2.0 * f64::EPSILON * theta.abs().max(t * (n as f64).ln()) * abs_sum;
    (z, trunc + phase_err, n)
}
