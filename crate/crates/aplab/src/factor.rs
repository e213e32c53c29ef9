//! Factorization by trial division against the prime table.
//!
//! Every workload in this crate factors numbers whose square root fits well
//! inside the table cap, so trial division by sieved primes is the whole
//! story — no probabilistic primality or rho-style methods, and therefore no
//! way to get a wrong factorization.

use std::fmt;

use crate::error::{Error, Result};
use crate::primes::{isqrt, PrimeTable};

/// Prime factorization `n = ∏ p_i^{e_i}` with ascending `p_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Euler's totient from the factorization.
    pub fn phi(&self) -> u64 {
        let mut phi = 1u64;
        for &(p, e) in &self.factors {
            phi *= p.pow(e - 1) * (p - 1);
        }
        phi
    }

    /// Number of distinct prime factors (0 for n = 1).
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Product of the distinct prime factors (1 for n = 1).
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    /// Largest prime factor, with the convention that it is 1 for n = 1.
    pub fn largest_prime_factor(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

/// Renders as `2^3 281^1 283^1`; `1` for the empty factorization.
impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}

/// Factor `n ≥ 1` by trial division with the table's primes.
///
/// Fails with [`Error::TableTooSmall`] when the table cannot certify the
/// remaining cofactor prime (it holds no prime ≥ √cofactor); the caller grows
/// the table and retries. [`factorize_growing`] does that loop.
pub fn factorize(table: &PrimeTable, n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut rem = n;
    let mut factors = Vec::new();
    let mut certified = rem == 1;
    for p in table.primes(2, table.limit())? {
        if p.checked_mul(p).map_or(true, |sq| sq > rem) {
            certified = true;
            break;
        }
        if rem % p == 0 {
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if !certified && rem > 1 {
        return Err(Error::TableTooSmall {
            needed: isqrt(rem) + 1,
            limit: table.limit(),
        });
    }
    if rem > 1 {
        factors.push((rem, 1));
    }
    Ok(Factorization { n, factors })
}

/// [`factorize`], growing the table as needed. √n never exceeds 2^32, so this
/// always stays far below the default cap.
pub fn factorize_growing(table: &mut PrimeTable, n: u64) -> Result<Factorization> {
    loop {
        match factorize(table, n) {
            Err(Error::TableTooSmall { needed, .. }) => table.grow_for(needed)?,
            other => return other,
        }
    }
}

pub fn euler_phi(table: &PrimeTable, n: u64) -> Result<u64> {
    Ok(factorize(table, n)?.phi())
}

pub fn omega(table: &PrimeTable, n: u64) -> Result<usize> {
    Ok(factorize(table, n)?.omega())
}

pub fn largest_prime_factor(table: &PrimeTable, n: u64) -> Result<u64> {
    Ok(factorize(table, n)?.largest_prime_factor())
}
