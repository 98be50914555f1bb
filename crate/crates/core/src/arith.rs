//! Elementary arithmetic functions, sieves and the convolution coefficient
//! families of the Dirichlet series used by the Perron checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::error::{LabError, Result};

/// Euler–Mascheroni constant, 0.577215664901532860606512090082.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Largest argument accepted by the factorization-based functions.
pub const MAX_ARG: u64 = 1_000_000_000_000;
const SIEVE_LIMIT: usize = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| prime_sieve(SIEVE_LIMIT).into_iter().map(|p| p as u32).collect())
}

/// All primes ≤ limit by the sieve of Eratosthenes.
pub fn prime_sieve(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn check(n: u64) -> Result<()> {
    if n == 0 || n > MAX_ARG {
        return Err(LabError::OutOfRange(n));
    }
    Ok(())
}

/// Prime factorization as (prime, exponent) pairs in ascending order.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    check(n)?;
    let mut m = n;
    let mut out = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

/// Von Mangoldt Λ(n).
pub fn vonmangoldt(n: u64) -> Result<f64> {
    let f = factorize(n)?;
    Ok(if f.len() == 1 { (f[0].0 as f64).ln() } else { 0.0 })
}

/// Number of positive divisors d(n).
pub fn divisor_count(n: u64) -> Result<u64> {
    Ok(factorize(n)?.iter().map(|&(_, e)| e as u64 + 1).product())
}

/// Möbius μ(n).
pub fn moebius(n: u64) -> Result<i64> {
    let f = factorize(n)?;
    if f.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.len() % 2 == 0 { 1 } else { -1 })
}

/// Euler φ(n).
pub fn euler_phi(n: u64) -> Result<u64> {
    let mut out = n;
    for (p, _) in factorize(n)? {
        out = out / p * (p - 1);
    }
    Ok(out)
}

/// Sorted positive divisors of n.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n)? {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes p with lo ≤ p ≤ hi.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    if hi <= SIEVE_LIMIT as u64 {
        return small_primes()
            .iter()
            .map(|&p| p as u64)
            .filter(|&p| p >= lo && p <= hi)
            .collect();
    }
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Smallest prime ≥ n.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n.max(2);
    while !is_prime(m) {
        m += 1;
    }
    m
}

/// Largest prime ≤ n, if any.
pub fn prev_prime(n: u64) -> Option<u64> {
    let mut m = n;
    while m >= 2 {
        if is_prime(m) {
            return Some(m);
        }
        m -= 1;
    }
    None
}

/// Table of d(n) for 0 ≤ n ≤ limit (entry 0 unused). d(n) < 2¹⁶ for n ≤ 10⁹.
pub fn divisor_count_sieve(limit: usize) -> Vec<u16> {
    let mut d = vec![0u16; limit + 1];
    for a in 1..=limit {
        let mut m = a;
        while m <= limit {
            d[m] += 1;
            m += a;
        }
    }
    d
}

/// Table of Λ(n) for 0 ≤ n ≤ limit.
pub fn vonmangoldt_sieve(limit: usize) -> Vec<f64> {
    let mut out = vec![0.0; limit + 1];
    for p in prime_sieve(limit) {
        let lp = (p as f64).ln();
        let mut pk = p as usize;
        loop {
            out[pk] = lp;
            match pk.checked_mul(p as usize) {
                Some(v) if v <= limit => pk = v,
                _ => break,
            }
        }
    }
    out
}

/// Σ_{n ≤ X} d(n) by the hyperbola method, and its deviation from
/// X log X + (2γ − 1) X.
pub fn divisor_summatory(x: f64) -> (u64, f64) {
    if x < 1.0 {
        return (0, 0.0);
    }
    let n = x.floor() as u64;
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    let mut s: u64 = 0;
    for k in 1..=r {
        s += n / k;
    }
    let value = 2 * s - r * r;
    let err = value as f64 - x * x.ln() - (2.0 * EULER_GAMMA - 1.0) * x;
    (value, err)
}

/// Coefficient family kinds of the Dirichlet series in the Perron checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// b_n = 1, series ζ(s).
    Unit,
    /// b_n = Σ_{a₁a₂ = n} a₂^{iα}, series ζ(s) ζ(s − iα).
    PairUnit,
    /// b_n = Σ_{a₁a₂a₃ = n} Λ(a₁) a₂^{iα} a₃^{iβ}, series −ζ'/ζ(s) ζ(s − iα) ζ(s − iβ).
    TripleLambda,
}

/// A coefficient family with its phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFamily {
    pub kind: FamilyKind,
    pub alpha: f64,
    pub beta: f64,
}

impl CoefficientFamily {
    pub fn unit() -> Self {
        Self { kind: FamilyKind::Unit, alpha: 0.0, beta: 0.0 }
    }

    pub fn pair_unit(alpha: f64) -> Self {
        Self { kind: FamilyKind::PairUnit, alpha, beta: 0.0 }
    }

    pub fn triple_lambda(alpha: f64, beta: f64) -> Self {
        Self { kind: FamilyKind::TripleLambda, alpha, beta }
    }
}

fn phase(n: u64, a: f64) -> Complex64 {
    Complex64::from_polar(1.0, a * (n as f64).ln())
}

/// b_n of the family by enumeration of ordered factorizations.
pub fn coefficient(family: &CoefficientFamily, n: u64) -> Result<Complex64> {
    let divs = divisors(n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    match family.kind {
        FamilyKind::Unit => acc = Complex64::new(1.0, 0.0),
        FamilyKind::PairUnit => {
            for &a2 in &divs {
                acc += phase(a2, family.alpha);
            }
        }
        FamilyKind::TripleLambda => {
            for &a1 in &divs {
                let lam = vonmangoldt(a1)?;
                if lam == 0.0 {
                    continue;
                }
                let m = n / a1;
                for &a2 in divs.iter().filter(|&&d| m.is_multiple_of(d)) {
                    let a3 = m / a2;
                    acc += lam * phase(a2, family.alpha) * phase(a3, family.beta);
                }
            }
        }
    }
    Ok(acc)
}

/// b_n for all 1 ≤ n ≤ limit by Dirichlet convolution sieves (entry 0 unused).
pub fn coefficient_table(family: &CoefficientFamily, limit: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let phases = |a: f64| -> Vec<Complex64> {
        (0..=limit).map(|n| if n == 0 { zero } else { phase(n as u64, a) }).collect()
    };
    // (f * g)(n) = Σ_{ab = n} f(a) g(b)
    let convolve = |f: &[Complex64], g: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![zero; limit + 1];
        for a in 1..=limit {
            if f[a] == zero {
                continue;
            }
            let mut b = 1;
            while a * b <= limit {
                out[a * b] += f[a] * g[b];
                b += 1;
            }
        }
        out
    };
    match family.kind {
        FamilyKind::Unit => {
            let mut v = vec![Complex64::new(1.0, 0.0); limit + 1];
            v[0] = zero;
            v
        }
        FamilyKind::PairUnit => {
            let mut ones = vec![Complex64::new(1.0, 0.0); limit + 1];
            ones[0] = zero;
            convolve(&ones, &phases(family.alpha))
        }
        FamilyKind::TripleLambda => {
            let lam: Vec<Complex64> = vonmangoldt_sieve(limit).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            let inner = convolve(&phases(family.alpha), &phases(family.beta));
            convolve(&lam, &inner)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definitional_values() {
        assert!((vonmangoldt(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(vonmangoldt(12).unwrap(), 0.0);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(moebius(13).unwrap(), -1);
        assert_eq!(moebius(12).unwrap(), 0);
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(euler_phi(13).unwrap(), 12);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert!(matches!(vonmangoldt(0), Err(LabError::OutOfRange(0))));
    }

    #[test]
    fn vonmangoldt_sums_to_log() {
        let s: f64 = divisors(360).unwrap().iter().map(|&a| vonmangoldt(a).unwrap()).sum();
        assert!((s - 360f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn primes_in_small_window() {
        assert_eq!(primes_in(29, 50), vec![29, 31, 37, 41, 43, 47]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert_eq!(next_prime(1_000_000), 1_000_003);
        assert_eq!(prev_prime(1_000_002), Some(999_983));
    }

    #[test]
    fn triple_lambda_small_cases() {
        let f = CoefficientFamily::triple_lambda(0.0, 0.0);
        // a₁ = 2 contributes 2 log 2 (a₂a₃ = 2), a₁ = 4 contributes log 2
        assert!((coefficient(&f, 4).unwrap().re - 3.0 * 2f64.ln()).abs() < 1e-14);
        assert_eq!(coefficient(&f, 1).unwrap(), Complex64::new(0.0, 0.0));
        let p = CoefficientFamily::pair_unit(0.0);
        assert!((coefficient(&p, 12).unwrap().re - 6.0).abs() < 1e-14);
    }

    #[test]
    fn table_matches_enumeration() {
        for fam in [
            CoefficientFamily::unit(),
            CoefficientFamily::pair_unit(0.7),
            CoefficientFamily::triple_lambda(1.3, -0.4),
        ] {
            let tab = coefficient_table(&fam, 500);
            for n in 1..=500u64 {
                assert!((tab[n as usize] - coefficient(&fam, n).unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hyperbola_matches_direct() {
        assert_eq!(divisor_summatory(10.0).0, 27);
        assert_eq!(divisor_summatory(1.0).0, 1);
        let d = divisor_count_sieve(2000);
        let mut acc = 0u64;
        for n in 1..=2000 {
            acc += d[n] as u64;
            assert_eq!(divisor_summatory(n as f64).0, acc);
        }
    }

    #[test]
    fn voronoi_error_small_at_million() {
        let (_, err) = divisor_summatory(1e6);
        assert!(err.abs() <= 50.0 * 1e2);
    }
}
