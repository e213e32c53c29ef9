//! Jacobsthal's function `g(m)` and lower bounds on `P(k)` derived from it.
//!
//! For squarefree `m`, `g(m)` is the largest difference between consecutive
//! integers coprime to `m` — equivalently, the least `g` such that every run
//! of `g` consecutive integers contains one coprime to `m`. The pattern of
//! coprimality is periodic mod `m`, and both `1` and `m + 1` are coprime to
//! `m`, so one pass over `[1, m + 1]` sees every gap.
//!
//! The reduction lemma implemented by [`pomerance_bound`] turns a gap of the
//! sifting kernel `m = ∏_{p ≤ x, p ∤ k} p` into the least-prime lower bound
//! `P(k) > (g(m) − 1)·k`, valid when `m · (1 + g(k)) ≤ k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factorize_growing;
use crate::primes::PrimeTable;

/// Largest modulus the full-period scan will attempt.
pub const SCAN_CAP: u64 = 1 << 31;

/// `g(m)` together with the location of the first maximal gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JacobsthalResult {
    pub m: u64,
    /// Largest difference between consecutive integers coprime to `m`.
    pub g: u64,
    /// Leftmost `a` with `gcd(a, m) = gcd(a + g, m) = 1` and every integer
    /// strictly between sharing a factor with `m`.
    pub witness_start: u64,
}

/// Exact `g(m)` for squarefree `m ≤ 2³¹` by a full-period sieve scan.
pub fn jacobsthal_g(table: &mut PrimeTable, m: u64) -> Result<JacobsthalResult> {
    if m == 0 {
        return Err(Error::Domain("g(m) requires m ≥ 1".into()));
    }
    if m > SCAN_CAP {
        return Err(Error::CapacityExceeded {
            requested: m,
            cap: SCAN_CAP,
        });
    }
    let fac = factorize_growing(table, m)?;
    if !fac.is_squarefree() {
        return Err(Error::NotSquarefree { m });
    }

    // Bitmap over [0, m + 1]: set ⇔ shares a prime factor with m.
    let slots = (m + 2) as usize;
    let mut blocked = vec![0u64; slots.div_ceil(64)];
    for p in fac.primes() {
        let mut x = p;
        while x <= m + 1 {
            blocked[(x / 64) as usize] |= 1 << (x % 64);
            x += p;
        }
    }
    let is_blocked = |n: u64| blocked[(n / 64) as usize] >> (n % 64) & 1 == 1;

    let mut prev = 1u64; // 1 is coprime to everything
    let mut g = 0u64;
    let mut witness = 1u64;
    for n in 2..=m + 1 {
        if !is_blocked(n) {
            let gap = n - prev;
            if gap > g {
                g = gap;
                witness = prev;
            }
            prev = n;
        }
    }
    Ok(JacobsthalResult {
        m,
        g,
        witness_start: witness,
    })
}

/// Product of the first `n` primes (`n = 0` gives 1).
pub fn primorial(table: &mut PrimeTable, n: u32) -> Result<u64> {
    let mut product: u64 = 1;
    let mut taken = 0;
    let mut limit = 1u64 << 8;
    while taken < n {
        table.grow_for(limit)?;
        taken = 0;
        product = 1;
        for p in table.primes(2, table.limit())? {
            product = product
                .checked_mul(p)
                .ok_or(Error::ProductOverflow { partial: product })?;
            taken += 1;
            if taken == n {
                break;
            }
        }
        limit *= 2;
    }
    Ok(product)
}

/// The reduction from a coprime gap to a least-prime lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PomeranceBound {
    pub k: u64,
    pub x: u64,
    /// `∏_{p ≤ x, p ∤ k} p`, the sifting kernel.
    pub m: u64,
    pub g_m: u64,
    /// `g` of the squarefree kernel of `k`.
    pub g_k: u64,
    /// `(g(m) − 1) · k`; a valid lower bound for `P(k)` only when
    /// `hypotheses_ok`.
    pub bound: u64,
    /// Whether `m · (1 + g(k)) ≤ k`, the condition under which the lemma
    /// applies. (`gcd(m, k) = 1` holds by construction.)
    pub hypotheses_ok: bool,
}

/// Evaluate the gap-based lower bound `P(k) > (g(m) − 1)·k` with
/// `m = ∏_{p ≤ x, p ∤ k} p`.
///
/// The `bound` field is reported unconditionally; it is a theorem about
/// `P(k)` only when `hypotheses_ok` is true.
pub fn pomerance_bound(table: &mut PrimeTable, k: u64, x: u64) -> Result<PomeranceBound> {
    if k < 3 || x < 2 {
        return Err(Error::Domain(format!(
            "reduction needs k ≥ 3 and x ≥ 2 (got k = {k}, x = {x})"
        )));
    }
    table.grow_for(x + 1)?;
    let mut m: u64 = 1;
    for p in table.primes(2, x + 1)? {
        if k % p != 0 {
            m = m
                .checked_mul(p)
                .ok_or(Error::ProductOverflow { partial: m })?;
        }
    }
    let g_m = jacobsthal_g(table, m)?.g;
    let rad = factorize_growing(table, k)?.radical();
    let g_k = jacobsthal_g(table, rad)?.g;
    let bound = (g_m - 1)
        .checked_mul(k)
        .ok_or(Error::ProductOverflow { partial: g_m - 1 })?;
    let hypotheses_ok = m
        .checked_mul(1 + g_k)
        .map(|lhs| lhs <= k)
        .unwrap_or(false);
    Ok(PomeranceBound {
        k,
        x,
        m,
        g_m,
        g_k,
        bound,
        hypotheses_ok,
    })
}

/// One primorial row of the gap-growth diagnostic table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimorialGapRow {
    /// Index: `m` is the product of the first `n` primes.
    pub n: u32,
    pub m: u64,
    pub g: u64,
    pub witness_start: u64,
    /// `g(m) / ln² m` — the quantity known to stay bounded; reported, not
    /// asserted against any constant.
    pub gap_over_log_sq: f64,
}

/// `g` at the first `n_max` primorials with the `g/ln²m` diagnostic column.
pub fn iwaniec_table(table: &mut PrimeTable, n_max: u32) -> Result<Vec<PrimorialGapRow>> {
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let m = primorial(table, n)?;
        let r = jacobsthal_g(table, m)?;
        let ln_m = (m as f64).ln();
        rows.push(PrimorialGapRow {
            n,
            m,
            g: r.g,
            witness_start: r.witness_start,
            gap_over_log_sq: r.g as f64 / (ln_m * ln_m),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::least_prime::p_max;
    use num_integer::gcd;

    /// Independent referee: gcd scan over two full periods.
    fn oracle_g(m: u64) -> (u64, u64) {
        let mut prev = 0u64;
        let mut g = 0;
        let mut witness = 0;
        for n in 1..=2 * m + 1 {
            if gcd(n, m) == 1 {
                if prev != 0 && n - prev > g {
                    g = n - prev;
                    witness = prev;
                }
                prev = n;
            }
        }
        if g == 0 {
            (1, 1) // m = 1: all integers coprime
        } else {
            (g, witness)
        }
    }

    #[test]
    fn period_scan_matches_gcd_referee() {
        let mut t = PrimeTable::new();
        for m in [1u64, 2, 3, 5, 6, 7, 10, 11, 15, 21, 30, 33, 35, 105, 210, 323, 330, 1155] {
            let r = jacobsthal_g(&mut t, m).unwrap();
            let (g, w) = oracle_g(m);
            assert_eq!((r.g, r.witness_start), (g, w), "m = {m}");
        }
    }

    #[test]
    fn witnesses_certify_their_gaps() {
        let mut t = PrimeTable::new();
        for m in [2u64, 6, 30, 210, 2310, 30030] {
            let r = jacobsthal_g(&mut t, m).unwrap();
            let a = r.witness_start;
            assert_eq!(gcd(a, m), 1, "m = {m}");
            assert_eq!(gcd(a + r.g, m), 1, "m = {m}");
            for j in 1..r.g {
                assert!(gcd(a + j, m) > 1, "m = {m}, offset {j}");
            }
        }
    }

    #[test]
    fn primorial_gap_values() {
        let mut t = PrimeTable::new();
        let rows = iwaniec_table(&mut t, 8).unwrap();
        let got: Vec<(u64, u64, u64)> = rows.iter().map(|r| (r.m, r.g, r.witness_start)).collect();
        assert_eq!(
            got,
            vec![
                (2, 2, 1),
                (6, 4, 1),
                (30, 6, 1),
                (210, 10, 1),
                (2310, 14, 113),
                (30030, 22, 9439),
                (510510, 26, 217127),
                (9699690, 34, 60043),
            ]
        );
        // The gaps grow monotonically along primorials in this range.
        assert!(rows.windows(2).all(|w| w[0].g <= w[1].g));
        // g/ln²m at the first primorial: 2 / ln²2.
        assert!((rows[0].gap_over_log_sq - 4.1627).abs() < 1e-3);
    }

    #[test]
    #[ignore = "stress test: full-period scan at m = 223092870 (~10 s)"]
    fn ninth_primorial_gap() {
        let mut t = PrimeTable::new();
        let r = jacobsthal_g(&mut t, 223_092_870).unwrap();
        assert_eq!(r.g, 40);
    }

    #[test]
    fn rejects_non_squarefree_zero_and_oversized() {
        let mut t = PrimeTable::new();
        assert!(matches!(
            jacobsthal_g(&mut t, 12),
            Err(Error::NotSquarefree { m: 12 })
        ));
        assert!(matches!(
            jacobsthal_g(&mut t, 18),
            Err(Error::NotSquarefree { .. })
        ));
        assert!(matches!(jacobsthal_g(&mut t, 0), Err(Error::Domain(_))));
        assert!(matches!(
            jacobsthal_g(&mut t, (1 << 31) + 2),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn primorial_products_and_overflow() {
        let mut t = PrimeTable::new();
        assert_eq!(primorial(&mut t, 0).unwrap(), 1);
        assert_eq!(primorial(&mut t, 4).unwrap(), 210);
        assert_eq!(primorial(&mut t, 9).unwrap(), 223_092_870);
        assert_eq!(primorial(&mut t, 15).unwrap(), 614_889_782_588_491_410);
        assert!(matches!(
            primorial(&mut t, 16),
            Err(Error::ProductOverflow { .. })
        ));
    }

    #[test]
    fn reduction_fields_on_small_cases() {
        let mut t = PrimeTable::new();
        // Kernel excludes the prime factors of k.
        let r = pomerance_bound(&mut t, 6, 5).unwrap();
        assert_eq!((r.m, r.g_m, r.bound), (5, 2, 6));
        assert!(!r.hypotheses_ok); // 5·(1+4) > 6

        // The bound field alone proves nothing: here the reported bound 35
        // exceeds the true value P(7) = 29, and the hypothesis flag says so.
        let r = pomerance_bound(&mut t, 7, 5).unwrap();
        assert_eq!((r.m, r.g_m, r.bound), (30, 6, 35));
        assert!(!r.hypotheses_ok);
        assert_eq!(p_max(&mut t, 7).unwrap().p_max, 29);
    }

    #[test]
    fn reduction_bounds_hold_when_hypotheses_do() {
        let mut t = PrimeTable::new();
        for (k, x, want_m, want_bound) in [
            (210u64, 11u64, 11u64, 210u64),
            (2310, 13, 13, 2310),
            (30030, 19, 323, 60060),
        ] {
            let r = pomerance_bound(&mut t, k, x).unwrap();
            assert_eq!(r.m, want_m, "k = {k}");
            assert_eq!(r.bound, want_bound, "k = {k}");
            assert!(r.hypotheses_ok, "k = {k}");
            let p = p_max(&mut t, k).unwrap().p_max;
            assert!(p > r.bound, "k = {k}: P = {p}, bound = {}", r.bound);
        }
    }
}
