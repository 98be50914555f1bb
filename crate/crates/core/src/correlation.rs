//! The two-shift zero sum Σ x^ρ ζ(ρ + iy₁) conj ζ(ρ + iy₂), its predicted main
//! term, prime-pair selection and residual diagnostics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::arith::{is_prime, next_prime, prev_prime, primes_in};
use crate::error::{LabError, Result};
use crate::summation::{ComplexSum, Neumaier};
use crate::zeros::{counting_formula, find_zeros, ZeroCatalog};
use crate::zeta::{hardy_z_with_error, theta, zeta_value, MAX_HEIGHT};

pub use crate::characters::{k1_assemble, k_sum_brute, KSum};

/// Zeros per parallel chunk; chunk sums are reduced in index order.
pub const CHUNK: usize = 64;
/// Smallest window population accepted by the main-term comparison.
pub const MIN_WINDOW_ZEROS: usize = 25;
/// Largest T accepted by the full pipeline.
pub const MAX_REPORT_T: f64 = 2.0e4;
/// Catalog count deviation from the counting formula treated as a gap.
pub const GAP_THRESHOLD: f64 = 3.0;
/// t = log T below which the asymptotic prime windows are not used.
pub const WINDOW_MIN_T: f64 = 20.0;
/// Largest bound for exhaustive prime-pair search.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
/// Pass threshold on the fitted constant of the trend criterion.
pub const TREND_K_MAX: f64 = 5.0;

fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Shifts y₁, y₂ and the constant C of ε = exp(−C√log T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftParams {
    y1: f64,
    y2: f64,
    big_c: f64,
}

impl ShiftParams {
    pub fn new(y1: f64, y2: f64, big_c: f64) -> Result<Self> {
        if y1 == 0.0 || y2 == 0.0 || y1 == y2 || !y1.is_finite() || !y2.is_finite() {
            return Err(LabError::DegenerateShifts { y1, y2 });
        }
        if !(big_c > 0.0) {
            return Err(LabError::PreconditionViolated(format!("C = {big_c} must be positive")));
        }
        Ok(Self { y1, y2, big_c })
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn big_c(&self) -> f64 {
        self.big_c
    }

    /// y₂ − y₁.
    pub fn delta(&self) -> f64 {
        self.y2 - self.y1
    }
}

/// Window and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub t1: f64,
    pub t2: f64,
    /// T₂ − T₁.
    pub delta: f64,
    /// (T₁ + T₂)/2.
    pub t: f64,
    /// exp(log T / log log T).
    pub l: f64,
    /// exp(−C√log T).
    pub eps: f64,
    pub x: u64,
    /// 1 + 1/log x.
    pub c: f64,
    /// ½ − 1/log log T.
    pub b: f64,
}

impl AnalysisParams {
    pub fn new(t1: f64, t2: f64, x: u64, big_c: f64) -> Result<Self> {
        if !(t1 > 0.0 && t1 < t2 && t2 < 2.0 * t1) {
            return Err(LabError::PreconditionViolated(format!("need 2T1 > T2 > T1, got T1 = {t1}, T2 = {t2}")));
        }
        if !is_prime(x) {
            return Err(LabError::NotPrime(x));
        }
        let t = 0.5 * (t1 + t2);
        let lt = t.ln();
        let llt = lt.ln();
        if !(llt > 0.0) {
            return Err(LabError::PreconditionViolated(format!("T = {t} must exceed e")));
        }
        let eps = (-big_c * lt.sqrt()).exp();
        if !(eps > 0.0 && eps < 1.0) {
            return Err(LabError::PreconditionViolated(format!("eps = {eps} outside (0, 1)")));
        }
        Ok(Self {
            t1,
            t2,
            delta: t2 - t1,
            t,
            l: (lt / llt).exp(),
            eps,
            x,
            c: 1.0 + 1.0 / (x as f64).ln(),
            b: 0.5 - 1.0 / llt,
        })
    }

    /// T₁ = T, T₂ = (1 + ε)T with ε = exp(−C√log T).
    pub fn standard(big_t: f64, x: u64, big_c: f64) -> Result<Self> {
        let eps = (-big_c * big_t.ln().sqrt()).exp();
        Self::new(big_t, (1.0 + eps) * big_t, x, big_c)
    }
}

/// ζ(½ + it) for any real t, from Z and θ where supported.
fn zeta_half(t: f64) -> Result<(Complex64, f64)> {
    let a = t.abs();
    if (2.0..=MAX_HEIGHT).contains(&a) {
        let (z, e) = hardy_z_with_error(a)?;
        let v = Complex64::from_polar(z, -theta(a));
        return Ok((if t < 0.0 { v.conj() } else { v }, e));
    }
    let v = zeta_value(ci(0.5, t))?;
    Ok((v, 1e-12 * v.norm().max(1.0)))
}

/// Zero sum with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSum {
    pub value: Complex64,
    pub est_error: f64,
    pub zeros_used: usize,
    pub mean_term: f64,
}

/// Σ_{T₁<γ<T₂} x^ρ ζ(ρ + iy₁) conj ζ(ρ + iy₂) over catalogued zeros, with
/// multiplicity. Chunks of 64 zeros are summed in parallel and reduced in
/// order, so the result does not depend on the thread count.
pub fn zero_sum(catalog: &ZeroCatalog, shifts: &ShiftParams, x: u64, t1: f64, t2: f64) -> Result<ZeroSum> {
    if !(t1 < t2) {
        return Err(LabError::InvalidWindow(t1, t2));
    }
    if !catalog.covers(t1, t2) {
        return Err(LabError::CatalogGap { found: catalog.window(t1, t2).len(), expected: counting_formula(t2) - counting_formula(t1) });
    }
    let zeros = catalog.window(t1, t2);
    let found: usize = zeros.iter().map(|z| z.multiplicity as usize).sum();
    let expected = counting_formula(t2) - counting_formula(t1);
    if (found as f64 - expected).abs() >= GAP_THRESHOLD {
        return Err(LabError::CatalogGap { found, expected });
    }
    let lx = (x as f64).ln();
    let sqrt_x = (x as f64).sqrt();
    let (y1, y2) = (shifts.y1, shifts.y2);
    let chunks: Vec<(Complex64, f64, f64)> = zeros
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = ComplexSum::new();
            let mut err = Neumaier::new();
            let mut mag = Neumaier::new();
            for z in chunk {
                let g = z.ordinate;
                let (a, ea) = zeta_half(g + y1)?;
                let (b, eb) = zeta_half(g + y2)?;
                let m = z.multiplicity as f64;
                let term = Complex64::from_polar(sqrt_x * m, g * lx) * a * b.conj();
                let rate = lx + (g.abs() / (2.0 * PI)).ln().max(1.0) + 1.0;
                err.add(sqrt_x * m * (ea * b.norm() + a.norm() * eb + ea * eb));
                err.add(sqrt_x * m * (a.norm() + 1.0) * (b.norm() + 1.0) * rate * z.abs_err);
                mag.add(term.norm());
                acc.add(term);
            }
            Ok((acc.value(), err.value(), mag.value()))
        })
        .collect::<Result<_>>()?;
    let value = chunks.iter().map(|c| c.0).collect::<ComplexSum>().value();
    let est_error = chunks.iter().map(|c| c.1).collect::<Neumaier>().value();
    let total_mag = chunks.iter().map(|c| c.2).collect::<Neumaier>().value();
    let mean_term = if zeros.is_empty() { 0.0 } else { total_mag / zeros.len() as f64 };
    Ok(ZeroSum { value, est_error, zeros_used: found, mean_term })
}

/// expm1 for complex arguments without cancellation near 0.
fn expm1_c(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let em = z.re.exp_m1();
    let half = (0.5 * z.im).sin();
    ci(em * c - 2.0 * half * half, (em + 1.0) * s)
}

/// (T₂+y₁)/(T₂−T₁)·((T₂+y₁)/(T₁+y₁))^{iδ} − (T₁+y₁)/(T₂−T₁), δ = y₂ − y₁.
pub fn parenthesized_factor(t1: f64, t2: f64, y1: f64, y2: f64) -> Complex64 {
    let delta = y2 - y1;
    let u = (t2 - t1) / (t1 + y1);
    // ((1+u)^{1+iδ} − 1)/u
    expm1_c(ci(1.0, delta) * u.ln_1p()) / u
}

/// The bracket M′(x, y₁, y₂) of the predicted main term.
pub fn m_prime(x: u64, params: &AnalysisParams, shifts: &ShiftParams) -> Result<Complex64> {
    let d = shifts.delta();
    if d == 0.0 {
        return Err(LabError::DegenerateShifts { y1: shifts.y1, y2: shifts.y2 });
    }
    let ratio = zeta_value(ci(1.0, d))? / zeta_value(ci(1.0, -d))?;
    let base = (params.t1 + shifts.y1) / (2.0 * PI * x as f64);
    let pw = Complex64::from_polar(1.0, d * base.ln());
    let p = parenthesized_factor(params.t1, params.t2, shifts.y1, shifts.y2);
    Ok(ratio * pw / ci(1.0, d) * p + 1.0)
}

/// |x₂^{−iδ} − x₁^{−iδ}|.
pub fn separation(x1: u64, x2: u64, delta: f64) -> f64 {
    let a = Complex64::from_polar(1.0, -delta * (x1 as f64).ln());
    let b = Complex64::from_polar(1.0, -delta * (x2 as f64).ln());
    (b - a).norm()
}

/// How the prime pair was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// x₁ ∈ (t, αt), x₂ ∈ (α³t, α⁴t).
    Window,
    /// All pairs of primes up to max(101, α⁴t).
    Exhaustive,
    /// x₂ searched near x₁·e^{π/|δ|} when the exhaustive range is too large.
    Targeted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimePair {
    pub x1: u64,
    pub x2: u64,
    pub separation: f64,
    pub mode: SelectionMode,
    pub alpha: f64,
    pub t: f64,
    /// The member of the pair with the larger |M′|.
    pub chosen_x: u64,
    pub m_prime_x1: f64,
    pub m_prime_x2: f64,
}

fn better(cand: (u64, u64, f64), best: &mut Option<(u64, u64, f64)>) {
    let replace = match best {
        None => true,
        Some(b) => cand.2 > b.2 + 1e-15 || ((cand.2 - b.2).abs() <= 1e-15 && (cand.0, cand.1) < (b.0, b.1)),
    };
    if replace {
        *best = Some(cand);
    }
}

/// Best separated pair among all primes in [3, limit], via sorted phases.
fn exhaustive_pair(limit: u64, delta: f64) -> Option<(u64, u64, f64)> {
    let primes = primes_in(3, limit);
    if primes.len() < 2 {
        return None;
    }
    let two_pi = 2.0 * PI;
    let mut ph: Vec<(f64, u64)> = primes.iter().map(|&p| ((delta * (p as f64).ln()).rem_euclid(two_pi), p)).collect();
    ph.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n = ph.len();
    let mut best = None;
    for &(phi, p) in &ph {
        let target = (phi + PI).rem_euclid(two_pi);
        let i = ph.partition_point(|e| e.0 < target);
        for j in [i % n, (i + n - 1) % n] {
            let q = ph[j].1;
            if q != p {
                let (a, b) = (p.min(q), p.max(q));
                better((a, b, separation(a, b, delta)), &mut best);
            }
        }
    }
    best
}

/// x₂ near x₁·e^{π/|δ|} (phase difference π) for small primes x₁.
fn targeted_pair(limit: u64, delta: f64) -> Option<(u64, u64, f64)> {
    let ratio = (PI / delta.abs()).exp();
    let mut best = None;
    for x1 in primes_in(3, 101) {
        let target = x1 as f64 * ratio;
        if !(target < limit as f64) || target > u64::MAX as f64 / 4.0 {
            continue;
        }
        let t = target.round() as u64;
        let mut cands = vec![next_prime(t)];
        if let Some(p) = prev_prime(t) {
            cands.push(p);
        }
        for x2 in cands {
            if x2 > x1 && x2 <= limit {
                better((x1, x2, separation(x1, x2, delta)), &mut best);
            }
        }
    }
    best
}

/// Window-mode search: x₁ among the first primes above t, x₂ near the phase
/// target inside (α³t, α⁴t).
fn window_pair(t: f64, alpha: f64, delta: f64) -> Option<(u64, u64, f64)> {
    let lo1 = t;
    let hi1 = alpha * t;
    let lo2 = alpha.powi(3) * t;
    let hi2 = alpha.powi(4) * t;
    if hi2 > 1e18 {
        return None;
    }
    let mut x1s = Vec::new();
    let mut p = next_prime(lo1.floor() as u64 + 1);
    while (p as f64) < hi1 && x1s.len() < 64 {
        x1s.push(p);
        p = next_prime(p + 1);
    }
    let in2 = |q: u64| (q as f64) > lo2 && (q as f64) < hi2;
    let ratio = (PI / delta.abs()).exp();
    let mut best = None;
    for &x1 in &x1s {
        let target = (x1 as f64 * ratio).clamp(lo2, hi2);
        let tr = target.round() as u64;
        let mut cands = vec![next_prime(tr), next_prime(lo2.floor() as u64 + 1)];
        if let Some(q) = prev_prime(tr) {
            cands.push(q);
        }
        if let Some(q) = prev_prime(hi2.ceil() as u64 - 1) {
            cands.push(q);
        }
        for x2 in cands.into_iter().filter(|&q| in2(q)) {
            better((x1, x2, separation(x1, x2, delta)), &mut best);
        }
    }
    best
}

/// Primes x₁, x₂ with |x₂^{−iδ} − x₁^{−iδ}| > √2, t = log T, α = e^{π/(4|δ|)}.
pub fn select_prime_pair(big_t: f64, shifts: &ShiftParams) -> Result<PrimePair> {
    if !(big_t > 3.0) {
        return Err(LabError::PreconditionViolated(format!("T = {big_t} too small")));
    }
    let delta = shifts.delta();
    let t = big_t.ln();
    let alpha = (PI / (4.0 * delta.abs())).exp();
    let mut found = None;
    let mut mode = SelectionMode::Window;
    if t >= WINDOW_MIN_T {
        if let Some(p) = window_pair(t, alpha, delta) {
            if p.2 > SQRT_2 {
                found = Some(p);
            }
        }
    }
    if found.is_none() {
        let limit_f = (alpha.powi(4) * t).max(101.0);
        if limit_f <= EXHAUSTIVE_LIMIT as f64 {
            mode = SelectionMode::Exhaustive;
            found = exhaustive_pair(limit_f as u64, delta);
        } else {
            mode = SelectionMode::Targeted;
            let limit = if limit_f >= 1.8e19 { u64::MAX } else { limit_f as u64 };
            found = targeted_pair(limit, delta);
        }
    }
    let (x1, x2, sep) = found.ok_or_else(|| LabError::NoPairFound(format!("no primes available for delta = {delta}")))?;
    if !(sep > SQRT_2) {
        return Err(LabError::NoPairFound(format!("best pair ({x1}, {x2}) has separation {sep:.6} <= sqrt 2")));
    }
    let params1 = AnalysisParams::standard(big_t, x1, shifts.big_c)?;
    let m1 = m_prime(x1, &params1, shifts)?.norm();
    let m2 = m_prime(x2, &params1, shifts)?.norm();
    Ok(PrimePair {
        x1,
        x2,
        separation: sep,
        mode,
        alpha,
        t,
        chosen_x: if m2 > m1 { x2 } else { x1 },
        m_prime_x1: m1,
        m_prime_x2: m2,
    })
}

/// One comparison of the zero sum with its predicted main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumReport {
    pub big_t: f64,
    pub t1: f64,
    pub t2: f64,
    pub delta: f64,
    pub x: u64,
    pub y1: f64,
    pub y2: f64,
    pub big_c: f64,
    pub zeros_used: usize,
    pub zero_sum: Complex64,
    pub zero_sum_error: f64,
    pub main_term: Complex64,
    pub m_prime: Complex64,
    pub residual: Complex64,
    pub rel_residual: f64,
    /// Δ √log T.
    pub error_budget: f64,
    /// Δ itself, the o(T e^{−C√log T}) scale.
    pub error_budget_delta: f64,
    pub padded: bool,
    pub selection: PrimePair,
}

impl SumReport {
    pub const CSV_HEADER: &'static str =
        "T,Delta,x,y1,y2,zeros_used,zero_sum_re,zero_sum_im,main_term_re,main_term_im,rel_residual,error_budget";

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields serialize")
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.big_t,
            self.delta,
            self.x,
            self.y1,
            self.y2,
            self.zeros_used,
            self.zero_sum.re,
            self.zero_sum.im,
            self.main_term.re,
            self.main_term.im,
            self.rel_residual,
            self.error_budget
        )
    }
}

/// (Δ log T / 2π) x^{−iy₁} ζ(1 − iδ) M′.
pub fn main_term(params: &AnalysisParams, shifts: &ShiftParams) -> Result<(Complex64, Complex64)> {
    let mp = m_prime(params.x, params, shifts)?;
    let pre = params.delta * params.t.ln() / (2.0 * PI);
    let xp = Complex64::from_polar(1.0, -shifts.y1 * (params.x as f64).ln());
    Ok((pre * xp * zeta_value(ci(1.0, -shifts.delta()))? * mp, mp))
}

/// Options of the full pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Extend T₂ until the window holds at least 25 zeros instead of refusing.
    pub pad: bool,
}

fn report_from(catalog: &ZeroCatalog, shifts: &ShiftParams, big_t: f64, opts: ReportOptions) -> Result<SumReport> {
    let selection = select_prime_pair(big_t, shifts)?;
    let x = selection.chosen_x;
    let mut params = AnalysisParams::standard(big_t, x, shifts.big_c)?;
    let mut padded = false;
    let count = catalog.window(params.t1, params.t2).len();
    if count < MIN_WINDOW_ZEROS {
        if !opts.pad {
            return Err(LabError::WindowTooSmall { found: count, needed: MIN_WINDOW_ZEROS, suggested_t: suggest_t(shifts.big_c) });
        }
        let above = catalog.window(params.t1, f64::INFINITY);
        if above.len() <= MIN_WINDOW_ZEROS {
            return Err(LabError::CatalogGap { found: above.len(), expected: MIN_WINDOW_ZEROS as f64 });
        }
        // midway between the 25th and 26th zeros above T
        let t2 = 0.5 * (above[MIN_WINDOW_ZEROS - 1].ordinate + above[MIN_WINDOW_ZEROS].ordinate);
        params = AnalysisParams::new(params.t1, t2, x, shifts.big_c)?;
        padded = true;
    }
    let zs = zero_sum(catalog, shifts, x, params.t1, params.t2)?;
    let (mt, mp) = main_term(&params, shifts)?;
    let residual = zs.value - mt;
    Ok(SumReport {
        big_t,
        t1: params.t1,
        t2: params.t2,
        delta: params.delta,
        x,
        y1: shifts.y1,
        y2: shifts.y2,
        big_c: shifts.big_c,
        zeros_used: zs.zeros_used,
        zero_sum: zs.value,
        zero_sum_error: zs.est_error,
        main_term: mt,
        m_prime: mp,
        residual,
        rel_residual: residual.norm() / mt.norm().max(1e-30),
        error_budget: params.delta * params.t.ln().sqrt(),
        error_budget_delta: params.delta,
        padded,
        selection,
    })
}

/// Smallest T (to 1%) whose standard window is expected to hold 25 zeros.
pub fn suggest_t(big_c: f64) -> f64 {
    let mut t: f64 = 20.0;
    loop {
        let eps = (-big_c * t.ln().sqrt()).exp();
        if counting_formula((1.0 + eps) * t) - counting_formula(t) >= MIN_WINDOW_ZEROS as f64 || t > 1e12 {
            return t;
        }
        t *= 1.01;
    }
}

/// Full pipeline at height T: window [T, (1+ε)T], selected x, zero sum and
/// main term. Zeros are computed for the window.
pub fn theorem21_report(shifts: &ShiftParams, big_t: f64, opts: ReportOptions) -> Result<SumReport> {
    if !(big_t > 20.0 && big_t <= MAX_REPORT_T) {
        return Err(LabError::PreconditionViolated(format!("T = {big_t} outside (20, {MAX_REPORT_T}]")));
    }
    let eps = (-shifts.big_c * big_t.ln().sqrt()).exp();
    let lo = (big_t - 1.0).max(10.0);
    // room for padding
    let hi = ((1.0 + eps) * big_t + 200.0).min(MAX_HEIGHT);
    let catalog = find_zeros(lo, hi)?;
    report_from(&catalog, shifts, big_t, opts)
}

/// Same as [`theorem21_report`] with a caller-supplied catalog.
pub fn theorem21_report_with_catalog(catalog: &ZeroCatalog, shifts: &ShiftParams, big_t: f64, opts: ReportOptions) -> Result<SumReport> {
    if !(big_t > 20.0 && big_t <= MAX_REPORT_T) {
        return Err(LabError::PreconditionViolated(format!("T = {big_t} outside (20, {MAX_REPORT_T}]")));
    }
    report_from(catalog, shifts, big_t, opts)
}

/// Trend of rel_residual over several heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub reports: Vec<SumReport>,
    /// max over T of rel_residual · √log T.
    pub fitted_k: f64,
    pub non_increasing: bool,
    pub passed: bool,
}

pub fn theorem21_trend(shifts: &ShiftParams, heights: &[f64], opts: ReportOptions) -> Result<TrendReport> {
    let reports: Vec<SumReport> = heights.iter().map(|&t| theorem21_report(shifts, t, opts)).collect::<Result<_>>()?;
    let fitted_k = reports.iter().map(|r| r.rel_residual * r.big_t.ln().sqrt()).fold(0.0, f64::max);
    let non_increasing = reports.windows(2).all(|w| w[1].rel_residual <= w[0].rel_residual);
    Ok(TrendReport { passed: non_increasing && fitted_k <= TREND_K_MAX, reports, fitted_k, non_increasing })
}

/// K₁ by enumeration with its size relative to T log^{1/2}T e^{−C√log T}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K1Report {
    pub x: u64,
    pub t1: f64,
    pub t2: f64,
    pub k1: Complex64,
    pub bound_shape: f64,
    pub ratio: f64,
    pub divisible_fraction: f64,
}

pub fn k1_report(x: u64, t1: f64, t2: f64, shifts: &ShiftParams) -> Result<K1Report> {
    let k1 = k1_assemble(x, t1, t2, shifts.y1, shifts.y2)?;
    let ks = k_sum_brute(x, t2, shifts.y1, shifts.y2)?;
    let t = 0.5 * (t1 + t2);
    let lt = t.ln();
    let bound_shape = t * lt.sqrt() * (-shifts.big_c * lt.sqrt()).exp();
    Ok(K1Report {
        x,
        t1,
        t2,
        k1,
        bound_shape,
        ratio: k1.norm() / bound_shape,
        divisible_fraction: if ks.triples == 0 { 0.0 } else { ks.divisible_triples as f64 / ks.triples as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_validation() {
        assert!(ShiftParams::new(1.0, 2.0, 1.0).is_ok());
        assert!(matches!(ShiftParams::new(0.0, 2.0, 1.0), Err(LabError::DegenerateShifts { .. })));
        assert!(matches!(ShiftParams::new(1.0, 1.0, 1.0), Err(LabError::DegenerateShifts { .. })));
        assert!(ShiftParams::new(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn params_invariants() {
        let p = AnalysisParams::standard(5000.0, 7, 1.0).unwrap();
        assert!(p.t2 < 2.0 * p.t1 && p.eps > 0.0 && p.eps < 1.0);
        assert!(AnalysisParams::new(100.0, 250.0, 7, 1.0).is_err());
        assert!(matches!(AnalysisParams::new(100.0, 150.0, 8, 1.0), Err(LabError::NotPrime(8))));
    }

    #[test]
    fn factor_matches_direct_form() {
        let (t1, t2, y1, y2): (f64, f64, f64, f64) = (1e4, 1.05e4, 1.0, 2.0);
        let d = y2 - y1;
        let direct = (t2 + y1) / (t2 - t1) * Complex64::from_polar(1.0, d * ((t2 + y1) / (t1 + y1)).ln()) - (t1 + y1) / (t2 - t1);
        assert!((parenthesized_factor(t1, t2, y1, y2) - direct).norm() < 1e-11);
    }

    #[test]
    fn reflection_ratio_unimodular() {
        for k in 1..=20 {
            let a = 0.37 * k as f64;
            let r = zeta_value(ci(1.0, a)).unwrap() / zeta_value(ci(1.0, -a)).unwrap();
            assert!((r.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn alpha_windows() {
        let alpha = (PI / 4.0f64).exp();
        assert!((alpha - 2.193_280_050_738_015).abs() < 1e-12);
    }

    #[test]
    fn fallback_pair_at_1e8() {
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        let p = select_prime_pair(1e8, &s).unwrap();
        assert_eq!(p.mode, SelectionMode::Exhaustive);
        assert!(separation(p.x1, p.x2, 1.0) > SQRT_2);
    }

    #[test]
    fn empty_window_sum() {
        let cat = find_zeros(15.0, 20.0).unwrap();
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        let z = zero_sum(&cat, &s, 2, 15.0, 20.0).unwrap();
        assert_eq!(z.value, ci(0.0, 0.0));
        assert_eq!(z.zeros_used, 0);
    }

    #[test]
    fn window_additivity() {
        let cat = find_zeros(100.0, 400.0).unwrap();
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        let (t1, t3) = (100.5, 399.5);
        let (t2, _) = cat.nudge(250.0, 0.05);
        let whole = zero_sum(&cat, &s, 3, t1, t3).unwrap().value;
        let parts = zero_sum(&cat, &s, 3, t1, t2).unwrap().value + zero_sum(&cat, &s, 3, t2, t3).unwrap().value;
        assert!((whole - parts).norm() <= 1e-9 * whole.norm());
    }

    #[test]
    fn single_zero_term() {
        let cat = find_zeros(10.0, 20.0).unwrap();
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        let z = zero_sum(&cat, &s, 2, 13.0, 15.0).unwrap();
        assert_eq!(z.zeros_used, 1);
        let g = cat.window(13.0, 15.0)[0].ordinate;
        let rho = ci(0.5, g);
        let direct = (rho * 2f64.ln()).exp() * zeta_value(rho + ci(0.0, 1.0)).unwrap() * zeta_value(rho + ci(0.0, 2.0)).unwrap().conj();
        assert!((z.value - direct).norm() < 1e-8 * direct.norm());
        assert!(z.est_error <= 1e-5 * z.mean_term);
    }

    #[test]
    fn factor_converges_monotonically() {
        let (y1, y2) = (1.0, 2.0);
        let target = ci(1.0, y2 - y1);
        let errs: Vec<f64> = [1e4, 1e6, 1e8, 1e12]
            .iter()
            .map(|&t1: &f64| {
                let eps = (-t1.ln().sqrt()).exp();
                (parenthesized_factor(t1, (1.0 + eps) * t1, y1, y2) - target).norm()
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn separation_matches_m_prime_difference() {
        let s = ShiftParams::new(0.5, 1.5, 1.0).unwrap();
        let p = AnalysisParams::standard(1e12, 7, 1.0).unwrap();
        let d = (m_prime(7, &p, &s).unwrap() - m_prime(3, &p, &s).unwrap()).norm();
        let sep = separation(3, 7, 1.0);
        assert!((d / sep - 1.0).abs() < 0.1);
    }

    #[test]
    fn chosen_x_has_large_bracket() {
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        let pair = select_prime_pair(5000.0, &s).unwrap();
        assert!(pair.separation > SQRT_2);
        assert!(pair.m_prime_x1.max(pair.m_prime_x2) > 1.0 / SQRT_2 * 0.9);
    }

    #[test]
    fn small_window_refused_or_padded() {
        let s = ShiftParams::new(1.0, 2.0, 3.0).unwrap();
        let cat = find_zeros(99.0, 400.0).unwrap();
        let r = theorem21_report_with_catalog(&cat, &s, 100.0, ReportOptions { pad: false });
        assert!(matches!(r, Err(LabError::WindowTooSmall { .. })));
        let r = theorem21_report_with_catalog(&cat, &s, 100.0, ReportOptions { pad: true }).unwrap();
        assert!(r.padded && r.zeros_used >= MIN_WINDOW_ZEROS);
    }

    #[test]
    fn k1_small_instance() {
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        // x(T + y₂)/2π < 2 leaves no triple
        assert_eq!(k_sum_brute(13, -1.5, 1.0, 2.0).unwrap().total, ci(0.0, 0.0));
        let r = k1_report(13, 500.0, 1000.0, &s).unwrap();
        assert!(r.k1.norm() > 0.0);
        // each of the three factors can carry x, so the share lies in [1/x, 3/x)
        assert!(r.divisible_fraction * 13.0 >= 1.0 && r.divisible_fraction * 13.0 < 3.0, "{}", r.divisible_fraction * 13.0);
    }

    #[test]
    fn report_csv_shape() {
        let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
        let r = theorem21_report(&s, 2000.0, ReportOptions { pad: true }).unwrap();
        assert_eq!(r.csv_row().split(',').count(), SumReport::CSV_HEADER.split(',').count());
        let back: SumReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!((r.rel_residual - r.residual.norm() / r.main_term.norm()).abs() < 1e-12);
    }
}
