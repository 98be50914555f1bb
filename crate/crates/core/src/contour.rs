//! Contour integrals of zeta and L-function products: the rectangle identity
//! for the shifted zero sum, closed-form residue packs, the stationary-phase
//! integral and the truncated Perron formula.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{coefficient_table, is_prime, CoefficientFamily, FamilyKind};
use crate::characters::{build_characters, CharacterTable};
use crate::error::{LabError, Result};
use crate::quadrature::{distance_to_segment, integrate_circle, integrate_real, integrate_segment, QuadratureResult, DEFAULT_MAX_EVALS};
use crate::summation::{ComplexSum, Neumaier};
use crate::zeros::{counting_formula, ZeroCatalog};
use crate::zeta::{l_function_with_deriv, zeta_and_deriv, zeta_value};

/// Minimum distance between an integration path and any singularity.
pub const EXCLUSION_RADIUS: f64 = 1e-3;
/// Step used to move a horizontal edge off a zero ordinate.
pub const EDGE_NUDGE: f64 = 0.01;
/// Largest window population accepted by the rectangle check.
pub const MAX_RECTANGLE_ZEROS: usize = 50;
/// Rectangle residual target, relative.
pub const RECTANGLE_REL_TARGET: f64 = 1e-6;

fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A Dirichlet character modulo a prime, by index in [`build_characters`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twist {
    pub modulus: u64,
    pub character: usize,
}

/// Integrand selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IntegrandSpec {
    /// ζ(s)
    Zeta,
    /// ζ'/ζ(s)
    ZetaLogDeriv,
    /// ζ'/ζ(s) ζ(s + iy₁) ζ(1 − s − iy₂) xˢ
    RectangleG { y1: f64, y2: f64, x: f64 },
    /// L'/L(s − iy₂, χ) L(s − i(y₂ − y₁), χ) L(s, χ) Xˢ/s
    KX { y1: f64, y2: f64, big_x: f64, twist: Twist },
    /// ζ'/ζ(s + iy₁) ζ(s − i(y₂ − y₁)) ζ(s) Xˢ/s
    GX { y1: f64, y2: f64, big_x: f64 },
    /// ζ(s − i(y₂ − y₁)) ζ(s) Xˢ/s
    HX { y1: f64, y2: f64, big_x: f64 },
    /// α(s) Xˢ/s for the Dirichlet series α of a coefficient family.
    Perron { family: CoefficientFamily, big_x: f64, twist: Option<Twist> },
}

/// An integrand ready for evaluation.
#[derive(Debug, Clone)]
pub struct Integrand {
    pub spec: IntegrandSpec,
    table: Option<CharacterTable>,
}

impl Integrand {
    pub fn new(spec: IntegrandSpec) -> Result<Self> {
        let twist = match spec {
            IntegrandSpec::KX { twist, .. } => Some(twist),
            IntegrandSpec::Perron { twist, .. } => twist,
            _ => None,
        };
        let table = match twist {
            Some(tw) => {
                let t = build_characters(tw.modulus)?;
                if tw.character >= t.count() {
                    return Err(LabError::PreconditionViolated(format!(
                        "character index {} out of range for modulus {}",
                        tw.character, tw.modulus
                    )));
                }
                Some(t)
            }
            None => None,
        };
        Ok(Self { spec, table })
    }

    fn character(&self) -> Option<(&CharacterTable, usize)> {
        let k = match self.spec {
            IntegrandSpec::KX { twist, .. } => twist.character,
            IntegrandSpec::Perron { twist: Some(tw), .. } => tw.character,
            _ => return None,
        };
        self.table.as_ref().map(|t| (t, k))
    }

    /// ζ(s), or L(s, χ) when twisted.
    fn base(&self, s: Complex64) -> Result<Complex64> {
        match self.character() {
            Some((t, k)) => Ok(l_function_with_deriv(s, t.character_ref(k))?.0.value),
            None => zeta_value(s),
        }
    }

    fn base_log_deriv(&self, s: Complex64) -> Result<Complex64> {
        match self.character() {
            Some((t, k)) => {
                let (l, d) = l_function_with_deriv(s, t.character_ref(k))?;
                Ok(d.value / l.value)
            }
            None => {
                let (z, d) = zeta_and_deriv(s)?;
                Ok(d / z)
            }
        }
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let xs = |x: f64| (s * x.ln()).exp();
        match self.spec {
            IntegrandSpec::Zeta => zeta_value(s),
            IntegrandSpec::ZetaLogDeriv => self.base_log_deriv(s),
            IntegrandSpec::RectangleG { y1, y2, x } => {
                let g = self.base_log_deriv(s)? * zeta_value(s + I * y1)? * zeta_value(1.0 - s - I * y2)?;
                Ok(g * xs(x))
            }
            IntegrandSpec::KX { y1, y2, big_x, .. } => {
                let v = self.base_log_deriv(s - I * y2)? * self.base(s - I * (y2 - y1))? * self.base(s)?;
                Ok(v * xs(big_x) / s)
            }
            IntegrandSpec::GX { y1, y2, big_x } => {
                let v = self.base_log_deriv(s + I * y1)? * zeta_value(s - I * (y2 - y1))? * zeta_value(s)?;
                Ok(v * xs(big_x) / s)
            }
            IntegrandSpec::HX { y1, y2, big_x } => Ok(zeta_value(s - I * (y2 - y1))? * zeta_value(s)? * xs(big_x) / s),
            IntegrandSpec::Perron { family, big_x, .. } => Ok(self.series(&family, s)? * xs(big_x) / s),
        }
    }

    /// The Dirichlet series Σ bₙ χ(n) n^{−s} in closed form.
    fn series(&self, family: &CoefficientFamily, s: Complex64) -> Result<Complex64> {
        match family.kind {
            FamilyKind::Unit => self.base(s),
            FamilyKind::PairUnit => Ok(self.base(s)? * self.base(s - I * family.alpha)?),
            FamilyKind::TripleLambda => Ok(-self.base_log_deriv(s)?
                * self.base(s - I * family.alpha)?
                * self.base(s - I * family.beta)?),
        }
    }

    /// Poles at fixed locations, independent of zeros.
    pub fn fixed_poles(&self) -> Vec<Complex64> {
        let one = ci(1.0, 0.0);
        let zero = ci(0.0, 0.0);
        match self.spec {
            IntegrandSpec::Zeta | IntegrandSpec::ZetaLogDeriv => vec![one],
            IntegrandSpec::RectangleG { y1, y2, .. } => vec![one, ci(1.0, -y1), ci(0.0, -y2)],
            IntegrandSpec::KX { y1, y2, .. } => {
                let principal = self.character().map(|(t, k)| t.character_ref(k).is_principal()).unwrap_or(true);
                if principal {
                    vec![zero, ci(1.0, y2), ci(1.0, y2 - y1), one]
                } else {
                    vec![zero]
                }
            }
            IntegrandSpec::GX { y1, y2, .. } => vec![zero, ci(1.0, -y1), ci(1.0, y2 - y1), one],
            IntegrandSpec::HX { y1, y2, .. } => vec![zero, ci(1.0, y2 - y1), one],
            IntegrandSpec::Perron { family, .. } => {
                let principal = self.character().map(|(t, k)| t.character_ref(k).is_principal()).unwrap_or(true);
                if !principal {
                    return vec![zero];
                }
                match family.kind {
                    FamilyKind::Unit => vec![zero, one],
                    FamilyKind::PairUnit => vec![zero, one, ci(1.0, family.alpha)],
                    FamilyKind::TripleLambda => vec![zero, one, ci(1.0, family.alpha), ci(1.0, family.beta)],
                }
            }
        }
    }

    /// Some(δ) when every zero ½ + iγ of ζ produces a pole at ½ + i(γ + δ).
    pub fn zero_shift(&self) -> Option<f64> {
        let untwisted = self.character().map(|(t, k)| t.character_ref(k).is_principal()).unwrap_or(true);
        match self.spec {
            IntegrandSpec::ZetaLogDeriv | IntegrandSpec::RectangleG { .. } if untwisted => Some(0.0),
            IntegrandSpec::GX { y1, .. } => Some(-y1),
            IntegrandSpec::KX { y2, .. } if untwisted => Some(y2),
            IntegrandSpec::Perron { family, .. } if untwisted && family.kind == FamilyKind::TripleLambda => Some(0.0),
            _ => None,
        }
    }

    /// Local phase rate (radians per unit height) used to size initial panels.
    pub fn phase_rate(&self, t: f64) -> f64 {
        let lt = (t.abs().max(2.0 * PI) / (2.0 * PI)).ln() + 1.0;
        match self.spec {
            IntegrandSpec::Zeta | IntegrandSpec::ZetaLogDeriv => lt,
            IntegrandSpec::RectangleG { x, .. } => x.ln() + 2.0 * lt,
            IntegrandSpec::KX { big_x, .. } | IntegrandSpec::GX { big_x, .. } | IntegrandSpec::HX { big_x, .. } => {
                big_x.ln() + 2.0 * lt
            }
            IntegrandSpec::Perron { big_x, .. } => big_x.ln() + lt,
        }
    }

    /// Every known singularity within `margin` of the height range [lo, hi].
    pub fn singularities(&self, lo: f64, hi: f64, margin: f64, catalog: Option<&ZeroCatalog>) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.fixed_poles();
        if let (Some(delta), Some(cat)) = (self.zero_shift(), catalog) {
            for z in cat.window(lo - delta - margin, hi - delta + margin) {
                out.push(ci(0.5, z.ordinate + delta));
            }
        }
        out
    }
}

fn check_path(points: &[Complex64], dist: impl Fn(Complex64) -> f64) -> Result<()> {
    for &p in points {
        let d = dist(p);
        if d < EXCLUSION_RADIUS {
            return Err(LabError::SingularityTooClose { re: p.re, im: p.im, distance: d });
        }
    }
    Ok(())
}

fn initial_panels(f: &Integrand, from: Complex64, to: Complex64) -> usize {
    let len = (to - from).norm();
    let rate = f.phase_rate(from.im).max(f.phase_rate(to.im));
    ((len * rate * 4.0 / PI).ceil() as usize).max(len.ceil() as usize).max(4)
}

/// ∫ f(s) ds on the segment from `from` to `to`. Singularities from the
/// selector and from catalogued zeros must stay at least 10⁻³ away.
pub fn segment_integral(f: &Integrand, from: Complex64, to: Complex64, tol: f64, catalog: Option<&ZeroCatalog>) -> Result<QuadratureResult> {
    let lo = from.im.min(to.im);
    let hi = from.im.max(to.im);
    check_path(&f.singularities(lo, hi, 1.0, catalog), |p| distance_to_segment(p, from, to))?;
    integrate_segment(|s| f.eval(s), from, to, initial_panels(f, from, to), tol, DEFAULT_MAX_EVALS)
}

/// ∮ f(s) ds counter-clockwise around a circle.
pub fn circle_integral(f: &Integrand, center: Complex64, radius: f64, tol: f64, catalog: Option<&ZeroCatalog>) -> Result<QuadratureResult> {
    let sing = f.singularities(center.im - radius, center.im + radius, 1.0, catalog);
    check_path(&sing, |p| ((p - center).norm() - radius).abs())?;
    integrate_circle(|s| f.eval(s), center, radius, tol, DEFAULT_MAX_EVALS)
}

/// Axis-parallel rectangle [left, right] × [bottom, top].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

impl Rectangle {
    /// Edges counter-clockwise: right, top, left, bottom.
    pub fn edges(&self) -> [(Complex64, Complex64); 4] {
        let (b, c, t1, t2) = (self.left, self.right, self.bottom, self.top);
        [
            (ci(c, t1), ci(c, t2)),
            (ci(c, t2), ci(b, t2)),
            (ci(b, t2), ci(b, t1)),
            (ci(b, t1), ci(c, t1)),
        ]
    }

    pub fn contains(&self, p: Complex64) -> bool {
        self.left < p.re && p.re < self.right && self.bottom < p.im && p.im < self.top
    }

    pub fn boundary_distance(&self, p: Complex64) -> f64 {
        self.edges().iter().map(|&(a, b)| distance_to_segment(p, a, b)).fold(f64::INFINITY, f64::min)
    }
}

/// The four edge integrals of a rectangle and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourIntegral {
    /// Right, top, left, bottom.
    pub edges: [QuadratureResult; 4],
    pub total: Complex64,
    pub est_error: f64,
}

/// ∮ f ds over the rectangle; edges run concurrently and combine in fixed order.
pub fn rectangle_integral(f: &Integrand, rect: &Rectangle, tol: f64, catalog: Option<&ZeroCatalog>) -> Result<ContourIntegral> {
    if !(rect.left < rect.right && rect.bottom < rect.top) {
        return Err(LabError::InvalidWindow(rect.bottom, rect.top));
    }
    let edges = rect.edges();
    let parts: Vec<QuadratureResult> = edges
        .par_iter()
        .map(|&(a, b)| segment_integral(f, a, b, tol / 4.0, catalog))
        .collect::<Result<_>>()?;
    let total = parts.iter().map(|q| q.value).collect::<ComplexSum>().value();
    let est_error = parts.iter().map(|q| q.est_error).collect::<Neumaier>().value();
    Ok(ContourIntegral { edges: [parts[0], parts[1], parts[2], parts[3]], total, est_error })
}

/// Argument-principle count (1/2πi)∮ ζ'/ζ against the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgumentPrinciple {
    pub numeric: Complex64,
    pub est_error: f64,
    /// Zeros minus poles inside the rectangle, from the catalog.
    pub expected: f64,
}

pub fn argument_principle(rect: &Rectangle, catalog: &ZeroCatalog, tol: f64) -> Result<ArgumentPrinciple> {
    if !catalog.covers(rect.bottom, rect.top) {
        return Err(LabError::CatalogGap { found: catalog.len(), expected: counting_formula(rect.top) - counting_formula(rect.bottom) });
    }
    let f = Integrand::new(IntegrandSpec::ZetaLogDeriv)?;
    let c = rectangle_integral(&f, rect, tol, Some(catalog))?;
    let mut expected = 0.0;
    if rect.left < 0.5 && 0.5 < rect.right {
        expected += catalog.window(rect.bottom, rect.top).iter().map(|z| z.multiplicity as f64).sum::<f64>();
    }
    if rect.contains(ci(1.0, 0.0)) {
        expected -= 1.0;
    }
    let scale = 2.0 * PI;
    Ok(ArgumentPrinciple { numeric: c.total / (I * scale), est_error: c.est_error / scale, expected })
}

/// Inputs of the rectangle identity. `b` and `c` default to ½ − 1/log log T
/// and 1 + 1/log x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleConfig {
    pub y1: f64,
    pub y2: f64,
    pub x: u64,
    pub t1: f64,
    pub t2: f64,
    pub b: Option<f64>,
    pub c: Option<f64>,
}

/// One residue contribution at a fixed pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueTerm {
    pub at: Complex64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangleReport {
    pub config: RectangleConfig,
    pub rectangle: Rectangle,
    pub nudges: Vec<String>,
    pub zeros_used: usize,
    pub lhs: Complex64,
    pub contour: ContourIntegral,
    pub residues: Vec<ResidueTerm>,
    pub rhs: Complex64,
    pub residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn nudge_edge(t: f64, catalog: &ZeroCatalog, min_dist: f64, label: &str, log: &mut Vec<String>) -> Result<f64> {
    let mut u = t;
    for _ in 0..10_000 {
        if catalog.distance_to_nearest(u) >= min_dist {
            if u != t {
                log.push(format!("{label}: {t} -> {u:.2}"));
            }
            return Ok(u);
        }
        u += EDGE_NUDGE;
    }
    Err(LabError::PreconditionViolated(format!("cannot move {label} = {t} off the zeros")))
}

/// Σ_{T₁<γ<T₂} m_ρ x^ρ ζ(ρ + iy₁) ζ(1 − ρ − iy₂) against the four edge
/// integrals of g minus the residues at 1, 1 − iy₁ and −iy₂ that lie inside.
pub fn rectangle_identity_check(cfg: &RectangleConfig, catalog: &ZeroCatalog) -> Result<RectangleReport> {
    if cfg.y1 == 0.0 {
        return Err(LabError::InvalidShift("y1 = 0 places 1 - i*y1 on the pole at s = 1".into()));
    }
    if cfg.y2 == 0.0 {
        return Err(LabError::InvalidShift("y2 = 0 places -i*y2 on the real axis pole".into()));
    }
    if !is_prime(cfg.x) {
        return Err(LabError::NotPrime(cfg.x));
    }
    if !(cfg.t1 < cfg.t2) {
        return Err(LabError::InvalidWindow(cfg.t1, cfg.t2));
    }
    let mut nudges = Vec::new();
    let mid = 0.5 * (cfg.t1 + cfg.t2);
    let gap = 2.0 * PI / (mid / (2.0 * PI)).ln().max(0.5);
    let min_dist = EXCLUSION_RADIUS.max(1e-2 * gap);
    let t1 = nudge_edge(cfg.t1, catalog, min_dist, "T1", &mut nudges)?;
    let t2 = nudge_edge(cfg.t2, catalog, min_dist, "T2", &mut nudges)?;
    if !catalog.covers(t1, t2) {
        return Err(LabError::CatalogGap { found: catalog.len(), expected: counting_formula(t2) - counting_formula(t1) });
    }
    let zeros = catalog.window(t1, t2);
    if zeros.len() > MAX_RECTANGLE_ZEROS {
        return Err(LabError::PreconditionViolated(format!("{} zeros in the window (at most {MAX_RECTANGLE_ZEROS})", zeros.len())));
    }
    let big_t = 0.5 * (t1 + t2);
    let b = match cfg.b {
        Some(b) => b,
        None => {
            let ll = big_t.ln().ln();
            if !(ll > 0.0) {
                return Err(LabError::PreconditionViolated("T must exceed e for the default left abscissa".into()));
            }
            0.5 - 1.0 / ll
        }
    };
    let xf = cfg.x as f64;
    let c = cfg.c.unwrap_or(1.0 + 1.0 / xf.ln());
    if !(b < 0.5 && 1.0 < c) {
        return Err(LabError::PreconditionViolated(format!("need b < 1/2 < 1 < c, got b = {b}, c = {c}")));
    }
    let rect = Rectangle { left: b, right: c, bottom: t1, top: t2 };
    let (y1, y2) = (cfg.y1, cfg.y2);

    // residues inside the rectangle
    let mut residues = Vec::new();
    let candidates = [ci(1.0, 0.0), ci(1.0, -y1), ci(0.0, -y2)];
    for (k, &p) in candidates.iter().enumerate() {
        let d = rect.boundary_distance(p);
        if d < EXCLUSION_RADIUS {
            return Err(LabError::SingularityTooClose { re: p.re, im: p.im, distance: d });
        }
        if !rect.contains(p) {
            continue;
        }
        let xp = (p * xf.ln()).exp();
        let value = match k {
            0 => -zeta_value(ci(1.0, y1))? * zeta_value(ci(0.0, -y2))? * xf,
            1 => {
                let (z, dz) = zeta_and_deriv(p)?;
                dz / z * zeta_value(ci(0.0, y1 - y2))? * xp
            }
            _ => {
                let (z, dz) = zeta_and_deriv(p)?;
                -(dz / z) * zeta_value(ci(0.0, y1 - y2))? * xp
            }
        };
        residues.push(ResidueTerm { at: p, value });
    }

    // zero side
    let terms: Vec<(Complex64, f64)> = zeros
        .par_iter()
        .map(|z| {
            let rho = ci(0.5, z.ordinate);
            let v = (rho * xf.ln()).exp() * zeta_value(rho + I * y1)? * zeta_value(1.0 - rho - I * y2)? * z.multiplicity as f64;
            // sensitivity of the term to the ordinate error
            let rate = xf.ln() + 2.0 * ((z.ordinate.abs() + y1.abs() + y2.abs()) / (2.0 * PI)).ln().max(1.0) + 2.0;
            Ok((v, v.norm() * rate * z.abs_err))
        })
        .collect::<Result<_>>()?;
    let lhs = terms.iter().map(|t| t.0).collect::<ComplexSum>().value();
    let lhs_err: f64 = terms.iter().map(|t| t.1).sum();
    let res_total = residues.iter().map(|r| r.value).collect::<ComplexSum>().value();
    let scale = lhs.norm().max(residues.iter().map(|r| r.value.norm()).sum::<f64>()).max(1.0);

    let f = Integrand::new(IntegrandSpec::RectangleG { y1, y2, x: xf })?;
    let contour = rectangle_integral(&f, &rect, 1e-9 * scale * 2.0 * PI, Some(catalog))?;
    let rhs = contour.total / (2.0 * PI * I) - res_total;
    let residual = (lhs - rhs).norm();
    let rel_residual = residual / scale;
    let tolerance = RECTANGLE_REL_TARGET.max((contour.est_error / (2.0 * PI) + lhs_err) / scale);
    Ok(RectangleReport {
        config: *cfg,
        rectangle: rect,
        nudges,
        zeros_used: zeros.len(),
        lhs,
        contour,
        residues,
        rhs,
        residual,
        rel_residual,
        tolerance,
        passed: rel_residual <= tolerance,
    })
}

/// Closed-form residue sums of the four Perron rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResiduePack {
    /// Principal-character residues of k_X.
    S1,
    /// Exceptional-zero residue of k_X for a real character.
    S2,
    /// Residues of g_X.
    S3,
    /// Residues of h_X.
    S4,
}

/// The real zero β ∈ (½, 1) of L(s, χ) for a real non-principal χ, if any.
pub fn exceptional_zero(table: &CharacterTable, k: usize) -> Result<Option<f64>> {
    let chi = table.character_ref(k);
    if chi.is_principal() || chi.values.iter().any(|v| v.im.abs() > 1e-12) {
        return Ok(None);
    }
    let l = |sigma: f64| -> Result<f64> { Ok(l_function_with_deriv(ci(sigma, 0.0), chi)?.0.value.re) };
    let mut prev_s = 0.5;
    let mut prev = l(prev_s)?;
    for i in 1..=50 {
        let s = 0.5 + 0.5 * i as f64 / 50.0;
        let v = l(s)?;
        if prev == 0.0 {
            return Ok(Some(prev_s));
        }
        if prev.signum() != v.signum() {
            let (mut lo, mut hi, mut flo) = (prev_s, s, prev);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                let fm = l(m)?;
                if fm.signum() == flo.signum() {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_s = s;
        prev = v;
    }
    Ok(None)
}

/// Closed-form residue pack. `chi` is required for S₁ and S₂.
pub fn residue_pack(which: ResiduePack, big_x: f64, y1: f64, y2: f64, chi: Option<(&CharacterTable, usize)>) -> Result<Complex64> {
    if y1 == 0.0 || y2 == 0.0 || y1 == y2 {
        return Err(LabError::DegenerateShifts { y1, y2 });
    }
    let d = y2 - y1;
    let lx = big_x.ln();
    let xp = |s: Complex64| (s * lx).exp();
    let z = zeta_value;
    let zl = |s: Complex64| -> Result<Complex64> {
        let (v, dv) = zeta_and_deriv(s)?;
        Ok(dv / v)
    };
    match which {
        ResiduePack::S4 => Ok(z(ci(1.0, d))? * xp(ci(1.0, d)) / ci(1.0, d) + z(ci(1.0, -d))? * big_x),
        ResiduePack::S3 => Ok(-z(ci(1.0, -y2))? * z(ci(1.0, -y1))? * xp(ci(1.0, -y1)) / ci(1.0, -y1)
            + zl(ci(1.0, y2))? * z(ci(1.0, d))? * xp(ci(1.0, d)) / ci(1.0, d)
            + zl(ci(1.0, y1))? * z(ci(1.0, -d))? * big_x),
        ResiduePack::S1 | ResiduePack::S2 => {
            let (table, k) = chi.ok_or_else(|| LabError::PreconditionViolated("a character is required for S1 and S2".into()))?;
            let cr = table.character_ref(k);
            let lval = |s: Complex64| -> Result<Complex64> { Ok(l_function_with_deriv(s, cr)?.0.value) };
            let llog = |s: Complex64| -> Result<Complex64> {
                let (v, dv) = l_function_with_deriv(s, cr)?;
                Ok(dv.value / v.value)
            };
            if which == ResiduePack::S1 {
                if !cr.is_principal() {
                    return Ok(ci(0.0, 0.0));
                }
                let ratio = table.phi() as f64 / table.modulus as f64;
                Ok(-lval(ci(1.0, y1))? * lval(ci(1.0, y2))? * xp(ci(1.0, y2)) / ci(1.0, y2)
                    + ratio * llog(ci(1.0, -y1))? * lval(ci(1.0, d))? * xp(ci(1.0, d)) / ci(1.0, d)
                    + ratio * llog(ci(1.0, -y2))? * lval(ci(1.0, -d))? * big_x)
            } else {
                match exceptional_zero(table, k)? {
                    None => Ok(ci(0.0, 0.0)),
                    Some(beta) => {
                        let s = ci(beta, y2);
                        Ok(lval(ci(beta, y1))? * lval(s)? * xp(s) / s)
                    }
                }
            }
        }
    }
}

/// Largest span of the stationary-phase integral.
pub const GONEK_MAX_ENDPOINT: f64 = 2000.0;
/// Pass threshold on the fitted constant.
pub const GONEK_K_MAX: f64 = 10.0;
const GONEK_PANEL_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GonekReport {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub u: f64,
    pub m: u32,
    pub numeric: Complex64,
    pub main_term: Complex64,
    pub quad_error: f64,
    /// E (log a)^m.
    pub err_bound: f64,
    pub k: f64,
    pub panels: usize,
    pub passed: bool,
}

/// ∫_a^b exp(it log(t/(ue))) (t/2π)^{σ−½} (log(t/2π))^m dt against the
/// stationary-phase term (2π)^{1−σ} u^σ e^{−i(u−π/4)} (log(u/2π))^m 𝟏(a < u ≤ b).
pub fn gonek_check(a: f64, b: f64, sigma: f64, u: f64, m: u32) -> Result<GonekReport> {
    if !(10.0 <= a && a < b && b <= 10.0 * a) {
        return Err(LabError::PreconditionViolated(format!("need 10a >= b > a >= 10, got a = {a}, b = {b}")));
    }
    if b > GONEK_MAX_ENDPOINT {
        return Err(LabError::PreconditionViolated(format!("b = {b} exceeds {GONEK_MAX_ENDPOINT}")));
    }
    if !(0.1..=10.0).contains(&sigma) || m > 1 || !(u > 0.0) {
        return Err(LabError::PreconditionViolated(format!("sigma = {sigma}, m = {m}, u = {u} out of range")));
    }
    let rate = (a / u).ln().abs().max((b / u).ln().abs());
    let h = (PI / (4.0 * rate.max(1e-9))).min(1.0);
    let panels = ((b - a) / h).ceil() as usize;
    if panels > GONEK_PANEL_BUDGET {
        return Err(LabError::OscillationTooFast(panels));
    }
    let two_pi = 2.0 * PI;
    let f = |t: f64| -> Result<Complex64> {
        let phase = t * (t / u).ln() - t;
        let amp = (t / two_pi).powf(sigma - 0.5) * if m == 1 { (t / two_pi).ln() } else { 1.0 };
        Ok(Complex64::from_polar(amp, phase))
    };
    let scale = (b - a) * b.powf((sigma - 0.5).max(0.0)) * a.powf((sigma - 0.5).min(0.0)) * b.ln().powi(m as i32);
    let q = integrate_real(f, a, b, panels, 1e-11 * scale, DEFAULT_MAX_EVALS)?;
    let main_term = if a < u && u <= b {
        let amp = two_pi.powf(1.0 - sigma) * u.powf(sigma) * if m == 1 { (u / two_pi).ln() } else { 1.0 };
        Complex64::from_polar(amp, -(u - PI / 4.0))
    } else {
        ci(0.0, 0.0)
    };
    let e = a.powf(sigma - 0.5)
        + a.powf(sigma + 0.5) / ((a - u).abs() + a.sqrt())
        + b.powf(sigma + 0.5) / ((b - u).abs() + b.sqrt());
    let err_bound = e * a.ln().powi(m as i32);
    let k = (q.value - main_term).norm() / err_bound;
    Ok(GonekReport {
        a,
        b,
        sigma,
        u,
        m,
        numeric: q.value,
        main_term,
        quad_error: q.est_error,
        err_bound,
        k,
        panels,
        passed: k <= GONEK_K_MAX,
    })
}

/// Largest X accepted by the Perron check.
pub const PERRON_MAX_X: f64 = 1.0e5;
/// Pass threshold on r1_observed / r1_bound.
pub const PERRON_K_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronReport {
    pub family: CoefficientFamily,
    pub twist: Option<Twist>,
    pub x_requested: f64,
    pub x_used: f64,
    pub w: f64,
    pub sigma0: f64,
    pub exact_sum: Complex64,
    pub integral: Complex64,
    pub quad_error: f64,
    pub r1_observed: f64,
    pub r1_bound: f64,
    pub k: f64,
    pub passed: bool,
}

/// Exact side and W-independent parts of the R₁ bound.
struct PerronSetup {
    integrand: Integrand,
    x_used: f64,
    sigma0: f64,
    coeffs: Vec<Complex64>,
    exact_sum: Complex64,
    series_bound: f64,
}

impl PerronSetup {
    fn new(family: CoefficientFamily, x: f64, twist: Option<Twist>) -> Result<Self> {
        if !(3.0..=PERRON_MAX_X).contains(&x) {
            return Err(LabError::PreconditionViolated(format!("X = {x} outside [3, {PERRON_MAX_X}]")));
        }
        let x_used = if x.fract() == 0.0 { x + 0.5 } else { x };
        let sigma0 = 1.0 + 1.0 / x_used.ln();
        let integrand = Integrand::new(IntegrandSpec::Perron { family, big_x: x_used, twist })?;
        let top = (2.0 * x_used).ceil() as usize;
        let mut coeffs = coefficient_table(&family, top);
        if let Some((t, k)) = integrand.character() {
            for (n, c) in coeffs.iter_mut().enumerate() {
                *c *= t.value(k, n as i64);
            }
        }
        let exact_sum = coeffs[1..=x_used.floor() as usize].iter().copied().collect::<ComplexSum>().value();
        // Σ |bₙ| n^{−σ₀}: exact head, majorant tail
        let majorant_family = match family.kind {
            FamilyKind::Unit => CoefficientFamily::unit(),
            FamilyKind::PairUnit => CoefficientFamily::pair_unit(0.0),
            FamilyKind::TripleLambda => CoefficientFamily::triple_lambda(0.0, 0.0),
        };
        let maj = coefficient_table(&majorant_family, top);
        let (z, dz) = zeta_and_deriv(ci(sigma0, 0.0))?;
        let majorant_total = match family.kind {
            FamilyKind::Unit => z.re,
            FamilyKind::PairUnit => (z * z).re,
            FamilyKind::TripleLambda => (-dz * z).re,
        };
        let mut head = Neumaier::new();
        let mut head_maj = Neumaier::new();
        for n in 1..=top {
            let p = (n as f64).powf(-sigma0);
            head.add(coeffs[n].norm() * p);
            head_maj.add(maj[n].re * p);
        }
        let series_bound = head.value() + (majorant_total - head_maj.value()).max(0.0);
        Ok(Self { integrand, x_used, sigma0, coeffs, exact_sum, series_bound })
    }

    fn r1_bound(&self, w: f64) -> f64 {
        let x = self.x_used;
        let mut near = Neumaier::new();
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            let nf = n as f64;
            if nf > x / 2.0 && nf < 2.0 * x {
                near.add(c.norm() * (x / (w * (x - nf).abs())).min(1.0));
            }
        }
        near.value() + (4.0 * x).powf(self.sigma0) / w * self.series_bound + 1.0
    }

    fn tol(&self) -> f64 {
        1e-9 * self.exact_sum.norm().max(1.0) * 2.0 * PI
    }

    /// ∫ over σ₀ + i[lo, hi] and σ₀ − i[lo, hi] combined (lo > 0), or the
    /// full segment σ₀ + i[−hi, hi] when lo = 0.
    fn piece(&self, lo: f64, hi: f64) -> Result<QuadratureResult> {
        let s0 = self.sigma0;
        if lo == 0.0 {
            return segment_integral(&self.integrand, ci(s0, -hi), ci(s0, hi), self.tol(), None);
        }
        let up = segment_integral(&self.integrand, ci(s0, lo), ci(s0, hi), self.tol() / 2.0, None)?;
        let down = segment_integral(&self.integrand, ci(s0, -hi), ci(s0, -lo), self.tol() / 2.0, None)?;
        Ok(QuadratureResult {
            value: up.value + down.value,
            est_error: up.est_error + down.est_error,
            evaluations: up.evaluations + down.evaluations,
        })
    }

    fn report(&self, family: CoefficientFamily, twist: Option<Twist>, x: f64, w: f64, raw: Complex64, raw_err: f64) -> PerronReport {
        let integral = raw / (2.0 * PI * I);
        let r1_observed = (self.exact_sum - integral).norm();
        let r1_bound = self.r1_bound(w);
        let k = r1_observed / r1_bound;
        PerronReport {
            family,
            twist,
            x_requested: x,
            x_used: self.x_used,
            w,
            sigma0: self.sigma0,
            exact_sum: self.exact_sum,
            integral,
            quad_error: raw_err / (2.0 * PI),
            r1_observed,
            r1_bound,
            k,
            passed: k <= PERRON_K_MAX,
        }
    }
}

/// Σ_{n≤X} bₙ by enumeration against (1/2πi)∫_{σ₀−iW}^{σ₀+iW} α(s) Xˢ/s ds with
/// σ₀ = 1 + 1/log X. An integer X is moved to X + ½.
pub fn perron_check(family: CoefficientFamily, x: f64, w: f64, twist: Option<Twist>) -> Result<PerronReport> {
    if !(w > 0.0) {
        return Err(LabError::PreconditionViolated(format!("W = {w} must be positive")));
    }
    let setup = PerronSetup::new(family, x, twist)?;
    let q = setup.piece(0.0, w)?;
    Ok(setup.report(family, twist, x, w, q.value, q.est_error))
}

/// Samples per octave used for the gap envelope.
pub const PERRON_OCTAVE_SAMPLES: usize = 8;

/// Perron reports on the ladder W₀, 2W₀, 4W₀, … The gap |exact − integral|
/// oscillates in W, so the trend is judged on its envelope: the largest gap
/// over log-spaced W in each octave [W_j, 2W_j].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronLadder {
    /// One report per ladder rung W₀·2^j, j = 0..=octaves.
    pub reports: Vec<PerronReport>,
    /// Envelope of the gap on each octave.
    pub envelope: Vec<f64>,
    pub pointwise_non_increasing: bool,
    pub non_increasing: bool,
    pub passed: bool,
}

pub fn perron_ladder(family: CoefficientFamily, x: f64, w0: f64, octaves: usize, twist: Option<Twist>) -> Result<PerronLadder> {
    if !(w0 > 0.0) || octaves == 0 {
        return Err(LabError::PreconditionViolated(format!("need W0 > 0 and at least one octave, got {w0}, {octaves}")));
    }
    let setup = PerronSetup::new(family, x, twist)?;
    let m = PERRON_OCTAVE_SAMPLES;
    let heights: Vec<f64> = (0..=octaves * m).map(|k| w0 * 2f64.powf(k as f64 / m as f64)).collect();
    let mut pieces = vec![setup.piece(0.0, heights[0])?];
    let rest: Vec<QuadratureResult> = heights.windows(2).map(|h| setup.piece(h[0], h[1])).collect::<Result<_>>()?;
    pieces.extend(rest);
    let mut acc = ComplexSum::new();
    let mut err = 0.0;
    let mut gaps = Vec::with_capacity(heights.len());
    let mut reports = Vec::new();
    for (k, (q, &w)) in pieces.iter().zip(&heights).enumerate() {
        acc.add(q.value);
        err += q.est_error;
        let r = setup.report(family, twist, x, w, acc.value(), err);
        gaps.push(r.r1_observed);
        if k % m == 0 {
            reports.push(r);
        }
    }
    let envelope: Vec<f64> = (0..octaves).map(|j| gaps[j * m..=(j + 1) * m].iter().copied().fold(0.0, f64::max)).collect();
    let pointwise_non_increasing = reports.windows(2).all(|p| p[1].r1_observed <= p[0].r1_observed);
    let non_increasing = envelope.windows(2).all(|e| e[1] <= e[0]);
    let passed = non_increasing && reports.iter().all(|r| r.passed);
    Ok(PerronLadder { reports, envelope, pointwise_non_increasing, non_increasing, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_pole_residue() {
        let f = Integrand::new(IntegrandSpec::Zeta).unwrap();
        let r = circle_integral(&f, ci(1.0, 0.0), 0.25, 1e-11, None).unwrap();
        assert!((r.value - ci(0.0, 2.0 * PI)).norm() < 1e-9);
    }

    #[test]
    fn rejects_path_through_pole() {
        let f = Integrand::new(IntegrandSpec::Zeta).unwrap();
        let r = segment_integral(&f, ci(1.0, -1.0), ci(1.0, 1.0), 1e-8, None);
        assert!(matches!(r, Err(LabError::SingularityTooClose { .. })));
    }

    #[test]
    fn s4_matches_closed_rectangle() {
        let (y1, y2, big_x) = (1.0, 2.0, 1000.0);
        let f = Integrand::new(IntegrandSpec::HX { y1, y2, big_x }).unwrap();
        let rect = Rectangle { left: 0.75, right: 1.0 + 1.0 / big_x.ln(), bottom: -5.0, top: 5.0 };
        let c = rectangle_integral(&f, &rect, 1e-7, None).unwrap();
        let s4 = residue_pack(ResiduePack::S4, big_x, y1, y2, None).unwrap();
        assert!((c.total / (2.0 * PI * I) - s4).norm() < 1e-6 * s4.norm());
    }

    #[test]
    fn s3_matches_closed_rectangle() {
        let (y1, y2, big_x) = (1.5, -0.5, 500.0);
        let f = Integrand::new(IntegrandSpec::GX { y1, y2, big_x }).unwrap();
        let rect = Rectangle { left: 0.8, right: 1.0 + 1.0 / big_x.ln(), bottom: -4.0, top: 4.0 };
        let c = rectangle_integral(&f, &rect, 1e-7, None).unwrap();
        let s3 = residue_pack(ResiduePack::S3, big_x, y1, y2, None).unwrap();
        assert!((c.total / (2.0 * PI * I) - s3).norm() < 1e-6 * s3.norm());
    }

    #[test]
    fn s1_matches_closed_rectangle() {
        let (y1, y2, big_x) = (1.0, 2.5, 300.0);
        let twist = Twist { modulus: 5, character: 0 };
        let f = Integrand::new(IntegrandSpec::KX { y1, y2, big_x, twist }).unwrap();
        let rect = Rectangle { left: 0.8, right: 1.0 + 1.0 / big_x.ln(), bottom: -4.0, top: 4.0 };
        let c = rectangle_integral(&f, &rect, 1e-7, None).unwrap();
        let table = build_characters(5).unwrap();
        let s1 = residue_pack(ResiduePack::S1, big_x, y1, y2, Some((&table, 0))).unwrap();
        assert!((c.total / (2.0 * PI * I) - s1).norm() < 1e-6 * s1.norm());
        assert_eq!(residue_pack(ResiduePack::S1, big_x, y1, y2, Some((&table, 1))).unwrap(), ci(0.0, 0.0));
    }

    #[test]
    fn degenerate_shifts_rejected() {
        assert!(matches!(
            residue_pack(ResiduePack::S4, 1000.0, 1.0, 1.0, None),
            Err(LabError::DegenerateShifts { .. })
        ));
    }

    #[test]
    fn no_exceptional_zero_small_moduli() {
        for x in [3u64, 5, 7, 11, 13] {
            let t = build_characters(x).unwrap();
            let quad = (x as usize - 1) / 2;
            assert_eq!(exceptional_zero(&t, quad).unwrap(), None);
        }
    }

    #[test]
    fn gonek_stationary_point() {
        let r = gonek_check(100.0, 400.0, 0.5, 250.0, 0).unwrap();
        assert!(r.passed, "{r:?}");
        let r = gonek_check(100.0, 400.0, 0.5, 700.0, 1).unwrap();
        assert_eq!(r.main_term, ci(0.0, 0.0));
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn perron_pair_unit_count() {
        let r = perron_check(CoefficientFamily::pair_unit(0.0), 100.5, 200.0, None).unwrap();
        assert!((r.exact_sum.re - 482.0).abs() < 1e-9);
        assert!(r.passed, "{r:?}");
        let r = perron_check(CoefficientFamily::unit(), 50.0, 100.0, None).unwrap();
        assert_eq!(r.x_used, 50.5);
        assert!((r.exact_sum.re - 50.0).abs() < 1e-12);
    }
}
