//! Least primes in arithmetic progressions.
//!
//! The central quantity is `P(k) = max_ℓ p(k, ℓ)` over reduced residues `ℓ`
//! mod `k`, where `p(k, ℓ)` is the least prime `≡ ℓ (mod k)`. Rather than
//! computing φ(k) separate progressions, `p_max` walks the primes in order
//! once and marks which reduced classes have been hit; the prime that
//! completes the last class is exactly `P(k)`. Primes dividing `k` fall in no
//! reduced class and are skipped.
//!
//! Alongside the raw value the scan reports two normalizations used when
//! comparing moduli of different sizes (natural logarithms throughout):
//!
//! * `ratio = P(k) / (φ(k) · ln φ(k) · ln k)`
//! * `r = (P(k) − φ(k) · ln φ(k) · ln P(k)) / (φ(k) · ln P(k))`

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::primes::PrimeTable;

/// Everything the class-coverage scan learns about one modulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PkRecord {
    pub k: u64,
    /// `P(k)`: the prime completing the last reduced class.
    pub p_max: u64,
    /// `R(k) = P(k) mod k`.
    pub residue: u64,
    /// Usable coupons drawn: primes `≤ P(k)` that do not divide `k`.
    pub primes_consumed: u64,
    pub phi: u64,
    /// `P(k) / (φ(k) ln φ(k) ln k)`.
    pub ratio: f64,
    /// `(P(k) − φ(k) ln φ(k) ln P(k)) / (φ(k) ln P(k))`.
    pub r_stat: f64,
}

/// `P(k) / (φ(k) · ln φ(k) · ln k)`. Requires `φ(k) ≥ 2`, i.e. `k ≥ 3`.
pub fn ratio(k: u64, phi: u64, p_max: u64) -> Result<f64> {
    if phi < 2 || k < 3 {
        return Err(Error::Domain(format!(
            "ratio needs phi ≥ 2 and k ≥ 3 (got k = {k}, phi = {phi})"
        )));
    }
    let phi_f = phi as f64;
    Ok(p_max as f64 / (phi_f * phi_f.ln() * (k as f64).ln()))
}

/// `(P(k) − φ(k) ln φ(k) ln P(k)) / (φ(k) ln P(k))`. Requires `φ(k) ≥ 2`.
pub fn r_statistic(phi: u64, p_max: u64) -> Result<f64> {
    if phi < 2 {
        return Err(Error::Domain(format!("r statistic needs phi ≥ 2 (got {phi})")));
    }
    let phi_f = phi as f64;
    let ln_p = (p_max as f64).ln();
    Ok((p_max as f64 - phi_f * phi_f.ln() * ln_p) / (phi_f * ln_p))
}

/// Least prime `≡ l (mod k)` using only primes already in the table.
///
/// Walks the progression itself (`l, l + k, l + 2k, …`) testing each member,
/// which beats enumerating all primes when only one class is wanted. Errors
/// with [`Error::ScanExhausted`] if the answer lies beyond the table.
pub fn least_prime_in_ap(table: &PrimeTable, k: u64, l: u64) -> Result<u64> {
    if k < 3 {
        return Err(Error::Domain(format!("modulus must be ≥ 3 (got {k})")));
    }
    if l == 0 || l >= k || num_integer::gcd(k, l) != 1 {
        return Err(Error::Domain(format!(
            "residue {l} is not a reduced class mod {k}"
        )));
    }
    let mut n = l;
    while n < table.limit() {
        if table.is_prime_unchecked(n) {
            return Ok(n);
        }
        n += k;
    }
    Err(Error::ScanExhausted {
        k,
        scanned_to: table.limit(),
    })
}

/// [`least_prime_in_ap`], growing the table until the prime appears.
pub fn least_prime_in_ap_growing(table: &mut PrimeTable, k: u64, l: u64) -> Result<u64> {
    loop {
        match least_prime_in_ap(table, k, l) {
            Err(Error::ScanExhausted { scanned_to, .. }) => {
                table.grow_for(scanned_to.max(k) + 1)?
            }
            other => return other,
        }
    }
}

/// Class-coverage scan for `P(k)` using only primes already in the table.
///
/// Errors with [`Error::ScanExhausted`] when the table runs out before all
/// φ(k) classes are hit; [`p_max`] wraps this in a grow-and-retry loop, and
/// the range scanner drives the same retry under a shared lock.
pub fn p_max_in(table: &PrimeTable, k: u64) -> Result<PkRecord> {
    if k < 3 {
        return Err(Error::Domain(format!("modulus must be ≥ 3 (got {k})")));
    }
    let fac = factorize(table, k)?;
    let phi = fac.phi();

    // Reduced classes mod k: sieve out multiples of k's prime factors.
    let mut coprime = vec![true; k as usize];
    coprime[0] = false;
    for p in fac.primes() {
        let mut m = p;
        while m < k {
            coprime[m as usize] = false;
            m += p;
        }
    }
    debug_assert_eq!(coprime.iter().filter(|&&c| c).count() as u64, phi);

    let mut hit = vec![false; k as usize];
    let mut remaining = phi;
    let mut consumed = 0u64;
    for p in table.primes(2, table.limit())? {
        if k % p == 0 {
            continue;
        }
        consumed += 1;
        let r = (p % k) as usize;
        debug_assert!(coprime[r]);
        if !hit[r] {
            hit[r] = true;
            remaining -= 1;
            if remaining == 0 {
                return Ok(PkRecord {
                    k,
                    p_max: p,
                    residue: r as u64,
                    primes_consumed: consumed,
                    phi,
                    ratio: ratio(k, phi, p)?,
                    r_stat: r_statistic(phi, p)?,
                });
            }
        }
    }
    Err(Error::ScanExhausted {
        k,
        scanned_to: table.limit(),
    })
}

/// Heuristic sieve size for computing `P(k)`: roughly twice the typical value
/// `φ(k) ln φ(k) ln k`, so most moduli finish without growing.
pub fn suggested_limit(k: u64, phi: u64) -> u64 {
    let phi_f = (phi.max(2)) as f64;
    let guess = 2.0 * phi_f * phi_f.ln().max(1.0) * (k.max(3) as f64).ln();
    (guess as u64).max(1 << 16)
}

/// `P(k)` with automatic table growth.
pub fn p_max(table: &mut PrimeTable, k: u64) -> Result<PkRecord> {
    if k < 3 {
        return Err(Error::Domain(format!("modulus must be ≥ 3 (got {k})")));
    }
    let fac = crate::factor::factorize_growing(table, k)?;
    table.grow_for(suggested_limit(k, fac.phi()))?;
    loop {
        match p_max_in(table, k) {
            Err(Error::ScanExhausted { scanned_to, .. }) => table.grow_for(scanned_to + 1)?,
            other => return other,
        }
    }
}
