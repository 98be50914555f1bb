//! Globally adaptive Gauss–Kronrod (7, 15) quadrature for complex-valued
//! integrands on real intervals, straight segments and circles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::summation::{ComplexSum, Neumaier};

/// Value of an integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub est_error: f64,
    pub evaluations: usize,
}

/// Default evaluation budget per integral.
pub const DEFAULT_MAX_EVALS: usize = 4_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    abs: f64,
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let value = resk * h;
    let habs = h.abs();
    resasc *= habs;
    resabs *= habs;
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if floor > err {
        err = floor;
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(LabError::PreconditionViolated(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Panel { a, b, value, err, abs: resabs })
}

/// ∫_a^b f(u) du with `initial_panels` equal panels refined until the summed
/// error estimate is at most `tol`. A `tol` below the roundoff floor
/// 100ε∫|f| is raised to that floor.
pub fn integrate_real<F>(f: F, a: f64, b: f64, initial_panels: usize, tol: f64, max_evals: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .into_par_iter()
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n0 { b } else { a + width * (i + 1) as f64 };
            gk15(&f, lo, hi)
        })
        .collect::<Result<_>>()?;
    let mut evals = 15 * n0;
    let min_width = (b - a).abs() * 1e-13;
    loop {
        let total_err = panels.iter().map(|p| p.err).collect::<Neumaier>().value();
        let floor = 100.0 * f64::EPSILON * panels.iter().map(|p| p.abs).collect::<Neumaier>().value();
        if total_err <= tol.max(floor) {
            break;
        }
        if evals >= max_evals {
            return Err(LabError::MaxEvalExceeded(max_evals));
        }
        let mut order: Vec<usize> = (0..panels.len()).collect();
        order.sort_by(|&i, &j| panels[j].err.total_cmp(&panels[i].err).then(i.cmp(&j)));
        let take = (panels.len() / 8).clamp(1, 64);
        let chosen: Vec<usize> = order.into_iter().take(take).filter(|&i| (panels[i].b - panels[i].a).abs() > min_width).collect();
        if chosen.is_empty() {
            return Err(LabError::MaxEvalExceeded(evals));
        }
        let halves: Vec<(Panel, Panel)> = chosen
            .par_iter()
            .map(|&i| {
                let p = panels[i];
                let m = 0.5 * (p.a + p.b);
                Ok((gk15(&f, p.a, m)?, gk15(&f, m, p.b)?))
            })
            .collect::<Result<_>>()?;
        evals += 30 * halves.len();
        for (&i, (l, r)) in chosen.iter().zip(halves) {
            panels[i] = l;
            panels.push(r);
        }
    }
    // fixed summation order by abscissa
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).collect::<ComplexSum>().value();
    let est_error = panels.iter().map(|p| p.err).collect::<Neumaier>().value();
    Ok(QuadratureResult { value, est_error, evaluations: evals })
}

/// ∫ f(s) ds along the straight segment from `from` to `to`.
pub fn integrate_segment<F>(f: F, from: Complex64, to: Complex64, initial_panels: usize, tol: f64, max_evals: usize) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let d = to - from;
    integrate_real(|u| Ok(f(from + d * u)? * d), 0.0, 1.0, initial_panels, tol, max_evals)
}

/// ∮ f(s) ds counter-clockwise on |s − center| = radius.
pub fn integrate_circle<F>(f: F, center: Complex64, radius: f64, tol: f64, max_evals: usize) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    integrate_real(
        |phi| {
            let e = Complex64::from_polar(radius, phi);
            Ok(f(center + e)? * Complex64::new(0.0, 1.0) * e)
        },
        0.0,
        2.0 * PI,
        8,
        tol,
        max_evals,
    )
}

/// Euclidean distance from p to the segment [a, b].
pub fn distance_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = ((p - a) * d.conj()).re / len2;
    (p - (a + d * u.clamp(0.0, 1.0))).norm()
}
