//! Critical-line zero ordinates: sign-change scan of Hardy Z, Odlyzko-style
//! text import, and a binary cache.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use crate::error::{LabError, Result};
use crate::zeta::{hardy_z, hardy_z_with_error, MAX_HEIGHT};

/// Scan step is SCAN_FACTOR / log t.
pub const SCAN_FACTOR: f64 = 0.25;
/// Default accuracy attached to imported ordinates.
pub const IMPORT_DEFAULT_ERR: f64 = 1e-9;
/// Accuracy attached to ordinates read back from the binary cache.
pub const CACHE_ENTRY_ERR: f64 = 1e-8;
const BISECT_WIDTH: f64 = 1e-10;
const MAGIC: &[u8; 4] = b"ZCAT";
const VERSION: u8 = 0x01;
const HEADER_LEN: usize = 4 + 1 + 8 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSource {
    Computed,
    Imported,
}

/// One zero ordinate. Multiplicity is fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub ordinate: f64,
    pub abs_err: f64,
    pub source: ZeroSource,
    pub multiplicity: u32,
}

/// Ordered zero ordinates in [t_min, t_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCatalog {
    entries: Vec<ZeroEntry>,
    pub t_min: f64,
    pub t_max: f64,
}

/// Smooth zero count N(T) = (T/2π) log(T/2πe) + 7/8.
pub fn counting_formula(t: f64) -> f64 {
    let x = t / (2.0 * PI);
    x * (x.ln() - 1.0) + 0.875
}

impl ZeroCatalog {
    /// Builds a catalog, checking order and window membership.
    pub fn new(entries: Vec<ZeroEntry>, t_min: f64, t_max: f64) -> Result<Self> {
        if !(t_min <= t_max) {
            return Err(LabError::InvalidWindow(t_min, t_max));
        }
        for (i, w) in entries.windows(2).enumerate() {
            if !(w[1].ordinate - w[0].ordinate > 1e-9) {
                return Err(LabError::NonMonotonic { line: i + 2 });
            }
        }
        if entries.iter().any(|e| e.ordinate < t_min || e.ordinate > t_max) {
            return Err(LabError::InvalidWindow(t_min, t_max));
        }
        Ok(Self { entries, t_min, t_max })
    }

    pub fn entries(&self) -> &[ZeroEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.ordinate).collect()
    }

    /// Entries with lo < γ < hi.
    pub fn window(&self, lo: f64, hi: f64) -> &[ZeroEntry] {
        let a = self.entries.partition_point(|e| e.ordinate <= lo);
        let b = self.entries.partition_point(|e| e.ordinate < hi);
        &self.entries[a..b.max(a)]
    }

    /// True if the catalog covers [lo, hi].
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.t_min <= lo && hi <= self.t_max
    }

    /// Difference between the entry count and the smooth count on the window.
    pub fn count_deviation(&self) -> f64 {
        self.len() as f64 - (counting_formula(self.t_max) - counting_formula(self.t_min))
    }

    /// Equality of the cached payload: window bounds and ordinates, bit for bit.
    pub fn payload_eq(&self, other: &Self) -> bool {
        self.t_min.to_bits() == other.t_min.to_bits()
            && self.t_max.to_bits() == other.t_max.to_bits()
            && self.len() == other.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.ordinate.to_bits() == b.ordinate.to_bits())
    }

    /// Distance from t to the nearest ordinate.
    pub fn distance_to_nearest(&self, t: f64) -> f64 {
        let i = self.entries.partition_point(|e| e.ordinate < t);
        let mut d = f64::INFINITY;
        if i < self.len() {
            d = d.min((self.entries[i].ordinate - t).abs());
        }
        if i > 0 {
            d = d.min((t - self.entries[i - 1].ordinate).abs());
        }
        d
    }

    /// Moves t upward in steps of `fraction` of the local mean gap until it is at
    /// least that far from every ordinate. Returns the new t and whether it moved.
    pub fn nudge(&self, t: f64, fraction: f64) -> (f64, bool) {
        let gap = 2.0 * PI / (t / (2.0 * PI)).ln().max(1.0);
        let min_dist = fraction * gap;
        let mut u = t;
        while self.distance_to_nearest(u) < min_dist {
            u += min_dist;
        }
        (u, u != t)
    }

    /// Sub-catalog on [lo, hi].
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(LabError::InvalidWindow(lo, hi));
        }
        let a = self.entries.partition_point(|e| e.ordinate < lo);
        let b = self.entries.partition_point(|e| e.ordinate <= hi);
        Ok(Self { entries: self.entries[a..b.max(a)].to_vec(), t_min: lo, t_max: hi })
    }
}

fn scan_grid(t_min: f64, t_max: f64, factor: f64) -> Vec<f64> {
    let mut grid = vec![t_min];
    let mut t = t_min;
    while t < t_max {
        t = (t + factor / t.ln()).min(t_max);
        grid.push(t);
    }
    grid
}

fn refine(a: f64, b: f64, za: f64, zb: f64) -> Result<ZeroEntry> {
    let (mut lo, mut hi, mut zlo, mut zhi) = (a, b, za, zb);
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let zm = hardy_z(mid)?;
        if zm == 0.0 {
            lo = mid;
            hi = mid;
            zlo = 0.0;
            zhi = 0.0;
            break;
        }
        if zm.signum() == zlo.signum() {
            lo = mid;
            zlo = zm;
        } else {
            hi = mid;
            zhi = zm;
        }
    }
    let gamma = if zhi == zlo {
        lo
    } else {
        (lo - zlo * (hi - lo) / (zhi - zlo)).clamp(lo, hi)
    };
    let (_, z_err) = hardy_z_with_error(gamma)?;
    let slope = if hi > lo { ((zhi - zlo) / (hi - lo)).abs() } else { 1.0 };
    let abs_err = (hi - lo) + z_err / slope.max(1e-12);
    Ok(ZeroEntry { ordinate: gamma, abs_err, source: ZeroSource::Computed, multiplicity: 1 })
}

fn scan(t_min: f64, t_max: f64, factor: f64) -> Result<Vec<ZeroEntry>> {
    let grid = scan_grid(t_min, t_max, factor);
    let values: Vec<f64> = grid.par_iter().map(|&t| hardy_z(t)).collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for i in 0..grid.len() - 1 {
        let (za, zb) = (values[i], values[i + 1]);
        if za == 0.0 && i > 0 {
            continue;
        }
        if za * zb < 0.0 || (zb == 0.0 && i + 1 < grid.len() - 1) {
            brackets.push((grid[i], grid[i + 1], za, zb));
        }
    }
    brackets.par_iter().map(|&(a, b, za, zb)| refine(a, b, za, zb)).collect()
}

/// All sign changes of Z(t) in [t_min, t_max].
pub fn find_zeros(t_min: f64, t_max: f64) -> Result<ZeroCatalog> {
    if !(t_min >= 10.0 && t_min < t_max && t_max <= MAX_HEIGHT) {
        return Err(LabError::InvalidWindow(t_min, t_max));
    }
    let expected = counting_formula(t_max) - counting_formula(t_min);
    let mut entries = scan(t_min, t_max, SCAN_FACTOR)?;
    if (entries.len() as f64 - expected).abs() >= 2.0 {
        entries = scan(t_min, t_max, 0.5 * SCAN_FACTOR)?;
        if (entries.len() as f64 - expected).abs() >= 2.0 {
            return Err(LabError::MissedZeroSuspected { found: entries.len(), expected, t_min, t_max });
        }
    }
    ZeroCatalog::new(entries, t_min, t_max)
}

/// Parses Odlyzko-style text: one ordinate per line, '#' comments.
/// An optional second column gives the absolute error; a comment of the form
/// `# abs_err = 1e-9` sets the default for the lines that follow.
pub fn parse_odlyzko(text: &str) -> Result<ZeroCatalog> {
    let mut entries: Vec<ZeroEntry> = Vec::new();
    let mut default_err = IMPORT_DEFAULT_ERR;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                if k.trim() == "abs_err" {
                    default_err = v.trim().parse().map_err(|_| LabError::ParseError {
                        line: line_no,
                        msg: format!("bad abs_err value {:?}", v.trim()),
                    })?;
                }
            }
            continue;
        }
        let mut cols = line.split_whitespace();
        let first = cols.next().unwrap_or("");
        let ordinate: f64 = first
            .parse()
            .map_err(|_| LabError::ParseError { line: line_no, msg: format!("not a number: {first:?}") })?;
        if !ordinate.is_finite() || ordinate <= 13.0 {
            return Err(LabError::ParseError { line: line_no, msg: format!("ordinate {ordinate} must exceed 13") });
        }
        let abs_err = match cols.next() {
            Some(c) => c
                .parse()
                .map_err(|_| LabError::ParseError { line: line_no, msg: format!("bad error column {c:?}") })?,
            None => default_err,
        };
        if let Some(prev) = entries.last() {
            if !(ordinate - prev.ordinate > 1e-9) {
                return Err(LabError::NonMonotonic { line: line_no });
            }
        }
        entries.push(ZeroEntry { ordinate, abs_err, source: ZeroSource::Imported, multiplicity: 1 });
    }
    let (lo, hi) = match (entries.first(), entries.last()) {
        (Some(a), Some(b)) => (a.ordinate, b.ordinate),
        _ => (0.0, 0.0),
    };
    Ok(ZeroCatalog { entries, t_min: lo, t_max: hi })
}

/// Reads an Odlyzko-style text file.
pub fn import_zeros(path: &Path) -> Result<ZeroCatalog> {
    let text = std::fs::read_to_string(path)?;
    parse_odlyzko(&text)
}

/// Serializes the catalog in the binary cache format.
pub fn to_bytes(catalog: &ZeroCatalog) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * catalog.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&catalog.t_min.to_le_bytes());
    out.extend_from_slice(&catalog.t_max.to_le_bytes());
    out.extend_from_slice(&(catalog.len() as u64).to_le_bytes());
    for e in &catalog.entries {
        out.extend_from_slice(&e.ordinate.to_le_bytes());
    }
    out
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Parses the binary cache format.
pub fn from_bytes(bytes: &[u8]) -> Result<ZeroCatalog> {
    if bytes.len() >= 4 && &bytes[..4] != MAGIC {
        return Err(LabError::BadMagic);
    }
    if bytes.len() >= 5 && bytes[4] != VERSION {
        return Err(LabError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(LabError::TruncatedFile);
    }
    let t_min = read_f64(bytes, 5);
    let t_max = read_f64(bytes, 13);
    let count = u64::from_le_bytes(bytes[21..29].try_into().expect("8 bytes")) as usize;
    let need = count.checked_mul(8).and_then(|v| v.checked_add(HEADER_LEN)).ok_or(LabError::TruncatedFile)?;
    if bytes.len() < need {
        return Err(LabError::TruncatedFile);
    }
    let entries = (0..count)
        .map(|i| ZeroEntry {
            ordinate: read_f64(bytes, HEADER_LEN + 8 * i),
            abs_err: CACHE_ENTRY_ERR,
            source: ZeroSource::Computed,
            multiplicity: 1,
        })
        .collect();
    Ok(ZeroCatalog { entries, t_min, t_max })
}

/// Writes the catalog to `path` in the binary cache format.
pub fn save_cache(catalog: &ZeroCatalog, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&to_bytes(catalog))?;
    Ok(())
}

/// Reads a catalog written by [`save_cache`].
pub fn load_cache(path: &Path) -> Result<ZeroCatalog> {
    from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_window_counts() {
        let c = find_zeros(10.0, 50.0).unwrap();
        assert_eq!(c.len(), 10);
        assert!((c.entries()[0].ordinate - 14.134_725_141_734_693).abs() < 1e-8);
        assert_eq!(find_zeros(10.0, 100.0).unwrap().len(), 29);
    }

    #[test]
    fn degenerate_window_rejected() {
        assert!(matches!(find_zeros(20.0, 20.0), Err(LabError::InvalidWindow(..))));
        assert!(matches!(find_zeros(5.0, 20.0), Err(LabError::InvalidWindow(..))));
    }

    #[test]
    fn parse_rules() {
        let c = parse_odlyzko("# header\n14.134725141\n21.022039639\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.entries()[0].abs_err, IMPORT_DEFAULT_ERR);
        assert!(matches!(parse_odlyzko("21.02\n14.13\n"), Err(LabError::NonMonotonic { line: 2 })));
        assert!(matches!(parse_odlyzko("14.13\nabc\n"), Err(LabError::ParseError { line: 2, .. })));
        let m = parse_odlyzko("# abs_err = 1e-6\n14.13\n21.02 1e-3\n").unwrap();
        assert_eq!(m.entries()[0].abs_err, 1e-6);
        assert_eq!(m.entries()[1].abs_err, 1e-3);
    }

    #[test]
    fn cache_errors() {
        let c = find_zeros(10.0, 40.0).unwrap();
        let mut b = to_bytes(&c);
        assert!(from_bytes(&b).unwrap().payload_eq(&c));
        let short = &b[..b.len() - 3];
        assert_eq!(from_bytes(short).unwrap_err(), LabError::TruncatedFile);
        assert_eq!(from_bytes(&b[..10]).unwrap_err(), LabError::TruncatedFile);
        b[0] = b'X';
        assert_eq!(from_bytes(&b).unwrap_err(), LabError::BadMagic);
    }

    #[test]
    fn window_and_nudge() {
        let c = find_zeros(10.0, 40.0).unwrap();
        assert_eq!(c.window(14.0, 22.0).len(), 2);
        assert_eq!(c.window(15.0, 20.0).len(), 0);
        let g = c.entries()[1].ordinate;
        let (u, moved) = c.nudge(g, 1e-2);
        assert!(moved && c.distance_to_nearest(u) >= 1e-2 * 2.0 * PI / (u / (2.0 * PI)).ln());
        let (v, moved) = c.nudge(18.0, 1e-2);
        assert!(!moved && v == 18.0);
    }
}
