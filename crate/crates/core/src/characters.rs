//! Dirichlet characters modulo an odd prime, Gauss sums, and the finite
//! identities that turn additive twists into character sums.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{is_prime, moebius, vonmangoldt_sieve};
use crate::error::{LabError, Result};
use crate::summation::ComplexSum;
use crate::zeta::CharacterRef;

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 101;
/// Largest triple-sum range for brute-force enumeration.
pub const MAX_TRIPLE_RANGE: f64 = 1.0e6;

/// e(v) = exp(2πiv).
pub fn e(v: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * v)
}

fn e_frac(num: u64, den: u64) -> Complex64 {
    e((num % den) as f64 / den as f64)
}

/// Smallest primitive root modulo the prime p.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(LabError::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            factors.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow(g, phi / f) != 1))
        .ok_or(LabError::NotPrime(p))
}

/// All characters modulo a prime x. Character k has χ_k(g) = e(k/(x−1)) for the
/// smallest primitive root g; k = 0 is principal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTable {
    pub modulus: u64,
    pub generator: u64,
    /// `characters[k][a]` = χ_k(a) for a in 0..x.
    pub characters: Vec<Vec<Complex64>>,
    /// τ(χ_k); the principal entry is exactly μ(x).
    pub gauss_sums: Vec<Complex64>,
    /// `dlog[a]` = j with g^j ≡ a, for 1 ≤ a < x.
    pub dlog: Vec<usize>,
}

/// Builds every character modulo the odd prime x ≤ 101.
pub fn build_characters(x: u64) -> Result<CharacterTable> {
    if x == 2 || !is_prime(x) {
        return Err(LabError::NotPrime(x));
    }
    if x > MAX_MODULUS {
        return Err(LabError::OutOfRange(x));
    }
    let g = primitive_root(x)?;
    let phi = (x - 1) as usize;
    let mut dlog = vec![0usize; x as usize];
    let mut v = 1u64;
    for j in 0..phi {
        dlog[v as usize] = j;
        v = v * g % x;
    }
    let mut characters = Vec::with_capacity(phi);
    for k in 0..phi {
        let mut row = vec![Complex64::new(0.0, 0.0); x as usize];
        for a in 1..x as usize {
            row[a] = e_frac((k * dlog[a]) as u64, phi as u64);
        }
        characters.push(row);
    }
    let mut gauss_sums = Vec::with_capacity(phi);
    let mu = moebius(x)? as f64;
    for (k, row) in characters.iter().enumerate() {
        if k == 0 {
            gauss_sums.push(Complex64::new(mu, 0.0));
        } else {
            gauss_sums.push(gauss_sum_numeric(row, x));
        }
    }
    Ok(CharacterTable { modulus: x, generator: g, characters, gauss_sums, dlog })
}

/// τ(χ) = Σ_a χ(a) e(a/x) by direct summation.
pub fn gauss_sum_numeric(values: &[Complex64], x: u64) -> Complex64 {
    (1..x).map(|a| values[a as usize] * e_frac(a, x)).collect::<ComplexSum>().value()
}

impl CharacterTable {
    pub fn count(&self) -> usize {
        self.characters.len()
    }

    pub fn phi(&self) -> u64 {
        self.modulus - 1
    }

    /// χ_k(n) for any integer n.
    pub fn value(&self, k: usize, n: i64) -> Complex64 {
        self.characters[k][n.rem_euclid(self.modulus as i64) as usize]
    }

    /// Index of the conjugate character.
    pub fn conj_index(&self, k: usize) -> usize {
        (self.count() - k) % self.count()
    }

    pub fn character_ref(&self, k: usize) -> CharacterRef<'_> {
        CharacterRef { modulus: self.modulus, values: &self.characters[k] }
    }

    /// χ_k(−1) = ±1.
    pub fn parity(&self, k: usize) -> f64 {
        self.value(k, -1).re.round()
    }
}

/// |e(n/x) − (1/φ(x)) Σ_χ χ(n) τ(χ̄)|.
pub fn additive_to_multiplicative_check(x: u64, n: i64) -> Result<f64> {
    let table = build_characters(x)?;
    additive_to_multiplicative_residual(&table, n)
}

/// Same as [`additive_to_multiplicative_check`] with a prebuilt table.
pub fn additive_to_multiplicative_residual(table: &CharacterTable, n: i64) -> Result<f64> {
    let x = table.modulus;
    if n.rem_euclid(x as i64) == 0 {
        return Err(LabError::NotCoprime { n, modulus: x });
    }
    let lhs = e(n.rem_euclid(x as i64) as f64 / x as f64);
    let mut acc = ComplexSum::new();
    for k in 0..table.count() {
        acc.add(table.value(k, n) * table.gauss_sums[table.conj_index(k)]);
    }
    let rhs = acc.value() / table.phi() as f64;
    Ok((lhs - rhs).norm())
}

/// Both sides of the character decomposition of the triple sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KDecomposition {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Residual of the variant without the χ(−1) factor.
    pub residual_without_parity: f64,
    /// +1 if the χ(−1) variant is the one that matches, −1 otherwise.
    pub sign_required: i32,
    pub range: f64,
}

fn triple_range(x: u64, t2: f64, y2: f64) -> Result<usize> {
    let range = x as f64 * (t2 + y2) / (2.0 * PI);
    if range > MAX_TRIPLE_RANGE {
        return Err(LabError::TooLarge(range));
    }
    Ok(if range < 1.0 { 0 } else { range.floor() as usize })
}

fn phase(n: usize, a: f64) -> Complex64 {
    Complex64::from_polar(1.0, a * (n as f64).ln())
}

/// Σ_{a₁a₂a₃ ≤ X, x ∤ a₁a₂a₃} Λ(a₁) a₁^{iy₂} a₂^{i(y₂−y₁)} e(−a₁a₂a₃/x) by a literal
/// triple loop, with X = x(T₂ + y₂)/2π.
fn k_coprime_literal(x: u64, n_max: usize, lam: &[f64], y1: f64, y2: f64) -> Complex64 {
    let xs = x as usize;
    let mut acc = ComplexSum::new();
    for a1 in 2..=n_max {
        if lam[a1] == 0.0 || a1 % xs == 0 {
            continue;
        }
        let w1 = lam[a1] * phase(a1, y2);
        for a2 in 1..=n_max / a1 {
            if a2 % xs == 0 {
                continue;
            }
            let w12 = w1 * phase(a2, y2 - y1);
            let m = a1 * a2;
            let mut inner = ComplexSum::new();
            for a3 in 1..=n_max / m {
                if a3 % xs == 0 {
                    continue;
                }
                inner.add(e(-((((m % xs) * (a3 % xs)) % xs) as f64) / x as f64));
            }
            acc.add(w12 * inner.value());
        }
    }
    acc.value()
}

/// S_r = Σ over the same triples with a₁a₂a₃ ≡ r (mod x) of the non-additive weight.
fn residue_buckets(x: u64, n_max: usize, lam: &[f64], y1: f64, y2: f64) -> Vec<Complex64> {
    let xs = x as usize;
    let mut buckets = vec![ComplexSum::new(); xs];
    for a1 in 2..=n_max {
        if lam[a1] == 0.0 || a1 % xs == 0 {
            continue;
        }
        let w1 = lam[a1] * phase(a1, y2);
        for a2 in 1..=n_max / a1 {
            if a2 % xs == 0 {
                continue;
            }
            let w12 = w1 * phase(a2, y2 - y1);
            let m = a1 * a2;
            let top = n_max / m;
            let r12 = m % xs;
            // a₃ ≤ top with a₃ ≡ j: count in closed form
            for j in 1..xs {
                let cnt = if top >= j { (top - j) / xs + 1 } else { 0 };
                if cnt > 0 {
                    buckets[(r12 * j) % xs].add(w12 * cnt as f64);
                }
            }
        }
    }
    buckets.iter().map(|b| b.value()).collect()
}

/// Checks the decomposition of the triple sum into character sums weighted by
/// χ(−1) τ(χ̄)/φ(x).
pub fn k_decomposition_check(x: u64, t2: f64, y1: f64, y2: f64) -> Result<KDecomposition> {
    let table = build_characters(x)?;
    let n_max = triple_range(x, t2, y2)?;
    let range = x as f64 * (t2 + y2) / (2.0 * PI);
    let lam = vonmangoldt_sieve(n_max.max(1));
    let lhs = k_coprime_literal(x, n_max, &lam, y1, y2);
    let buckets = residue_buckets(x, n_max, &lam, y1, y2);
    let mut with_parity = ComplexSum::new();
    let mut without = ComplexSum::new();
    for k in 0..table.count() {
        let inner: Complex64 = (1..x as usize).map(|r| table.characters[k][r] * buckets[r]).collect::<ComplexSum>().value();
        let w = table.gauss_sums[table.conj_index(k)] * inner;
        with_parity.add(table.parity(k) * w);
        without.add(w);
    }
    let phi = table.phi() as f64;
    let rhs = with_parity.value() / phi;
    let alt = without.value() / phi;
    let residual = (lhs - rhs).norm() / (1.0 + lhs.norm());
    let residual_without_parity = (lhs - alt).norm() / (1.0 + lhs.norm());
    Ok(KDecomposition {
        lhs,
        rhs,
        residual,
        residual_without_parity,
        sign_required: if residual <= residual_without_parity { 1 } else { -1 },
        range,
    })
}

/// The full triple sum K(T) and its split by divisibility of a₁a₂a₃ by x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KSum {
    pub total: Complex64,
    pub coprime_part: Complex64,
    pub divisible_part: Complex64,
    /// Number of triples with Λ(a₁) ≠ 0 in range.
    pub triples: u64,
    /// Number of those with x | a₁a₂a₃.
    pub divisible_triples: u64,
}

/// K(T) = Σ_{a₁a₂a₃ ≤ x(T+y₂)/2π} Λ(a₁) a₁^{iy₂} a₂^{i(y₂−y₁)} e(−a₁a₂a₃/x) by enumeration.
pub fn k_sum_brute(x: u64, t: f64, y1: f64, y2: f64) -> Result<KSum> {
    if !is_prime(x) {
        return Err(LabError::NotPrime(x));
    }
    let n_max = triple_range(x, t, y2)?;
    let lam = vonmangoldt_sieve(n_max.max(1));
    let xs = x as usize;
    let mut cop = ComplexSum::new();
    let mut div = ComplexSum::new();
    let mut triples = 0u64;
    let mut divisible = 0u64;
    for a1 in 2..=n_max {
        if lam[a1] == 0.0 {
            continue;
        }
        let w1 = lam[a1] * phase(a1, y2);
        for a2 in 1..=n_max / a1 {
            let w12 = w1 * phase(a2, y2 - y1);
            let m = a1 * a2;
            let mut ic = ComplexSum::new();
            let mut id = ComplexSum::new();
            for a3 in 1..=n_max / m {
                let r = ((m % xs) * (a3 % xs)) % xs;
                let term = e(-(r as f64) / x as f64);
                triples += 1;
                if r == 0 {
                    divisible += 1;
                    id.add(term);
                } else {
                    ic.add(term);
                }
            }
            cop.add(w12 * ic.value());
            div.add(w12 * id.value());
        }
    }
    let (c, d) = (cop.value(), div.value());
    Ok(KSum { total: c + d, coprime_part: c, divisible_part: d, triples, divisible_triples: divisible })
}

/// K₁ = −x^{−iy₂} (K(T₂) − K(T₁)).
pub fn k1_assemble(x: u64, t1: f64, t2: f64, y1: f64, y2: f64) -> Result<Complex64> {
    let k2 = k_sum_brute(x, t2, y1, y2)?.total;
    let k1 = k_sum_brute(x, t1, y1, y2)?.total;
    Ok(-phase(x as usize, -y2) * (k2 - k1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_moduli_structure() {
        let t3 = build_characters(3).unwrap();
        assert_eq!(t3.count(), 2);
        assert!((t3.value(1, 2) + 1.0).norm() < 1e-15);
        let t5 = build_characters(5).unwrap();
        assert_eq!(t5.count(), 4);
        let v = t5.value(1, 2);
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15 || (v + Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let t13 = build_characters(13).unwrap();
        assert_eq!(t13.gauss_sums[0], Complex64::new(-1.0, 0.0));
        assert!((gauss_sum_numeric(&t13.characters[0], 13) + 1.0).norm() < 1e-12);
        assert!(matches!(build_characters(12), Err(LabError::NotPrime(12))));
    }

    #[test]
    fn orthogonality() {
        let t = build_characters(31).unwrap();
        for k in 1..t.count() {
            let s: Complex64 = t.characters[k].iter().sum();
            assert!(s.norm() < 1e-12);
        }
        for n in 1..31i64 {
            let s: Complex64 = (0..t.count()).map(|k| t.value(k, n)).sum();
            let expect = if n == 1 { 30.0 } else { 0.0 };
            assert!((s - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn additive_identity_examples() {
        assert!(additive_to_multiplicative_check(7, 3).unwrap() <= 1e-10);
        assert!(additive_to_multiplicative_check(7, 1).unwrap() <= 1e-10);
        assert!(matches!(additive_to_multiplicative_check(7, 14), Err(LabError::NotCoprime { .. })));
    }

    #[test]
    fn decomposition_small_instance() {
        let d = k_decomposition_check(13, 100.0, 1.0, 2.0).unwrap();
        assert!(d.residual <= 1e-6, "{d:?}");
        assert_eq!(d.sign_required, 1);
        let same = k_decomposition_check(7, 80.0, 1.5, 1.5).unwrap();
        assert!(same.residual <= 1e-6);
    }

    #[test]
    fn k_sum_split_and_empty_range() {
        let k = k_sum_brute(13, 0.1, 1.0, -0.05).unwrap();
        assert_eq!(k.total, Complex64::new(0.0, 0.0));
        let k = k_sum_brute(13, 300.0, 1.0, 2.0).unwrap();
        assert!((k.total - k.coprime_part - k.divisible_part).norm() < 1e-9);
        let d = k_decomposition_check(13, 300.0, 1.0, 2.0).unwrap();
        assert!((k.coprime_part - d.lhs).norm() < 1e-9 * (1.0 + d.lhs.norm()));
    }
}
