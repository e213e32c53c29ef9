//! Growable segmented sieve of Eratosthenes.
//!
//! The table stores one bit per odd number (bit `i` ⇔ `2i + 1`), sieved in
//! fixed segments of 2^18 odd slots so each segment's working set stays inside
//! L1/L2 cache. `2` is special-cased everywhere. The limit only ever moves up,
//! and extending never rewrites already-sieved words, so any answer the table
//! has given remains valid verbatim after a grow — that stability is what lets
//! long scans interleave queries with growth.
//!
//! Concurrency contract: queries take `&self`, extension takes `&mut self`.
//! Multi-threaded users wrap the table in an `RwLock` (see the range scanner);
//! inside a single extension the fresh segments are sieved in parallel since
//! they are disjoint slices.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Integers covered by one segment (2^18 odd slots).
pub const SEGMENT_SPAN: u64 = 1 << 19;
const SEGMENT_WORDS: usize = (SEGMENT_SPAN / 2 / 64) as usize;
/// Default hard cap on the sieving limit: 2^40.
pub const DEFAULT_CAP: u64 = 1 << 40;

const CACHE_MAGIC: &[u8; 6] = b"LNKSV1";

/// Bit-packed primality for `[0, limit)`, odd numbers only.
pub struct PrimeTable {
    limit: u64,
    words: Vec<u64>,
    /// Primes `<= isqrt(limit - 1)`, ascending; enough to sieve any segment
    /// below `limit` and to trial-divide any `n < limit^2`.
    base_primes: Vec<u64>,
    cap: u64,
}

impl PrimeTable {
    /// Empty table (limit 0) with the default cap.
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_CAP)
    }

    /// Empty table with a custom hard cap. The cap is rounded down to a
    /// segment boundary since limits only exist at segment granularity.
    pub fn with_cap(cap: u64) -> Self {
        PrimeTable {
            limit: 0,
            words: Vec::new(),
            base_primes: Vec::new(),
            cap: cap / SEGMENT_SPAN * SEGMENT_SPAN,
        }
    }

    /// Table sieved at least to `limit`.
    pub fn with_limit(limit: u64) -> Result<Self> {
        let mut t = Self::new();
        t.extend_to(limit)?;
        Ok(t)
    }

    /// Exclusive upper end of the sieved range.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Ensure the table covers `[0, new_limit)`. No-op when already large
    /// enough; otherwise sieves whole new segments (in parallel) up to
    /// `new_limit` rounded to a segment boundary.
    pub fn extend_to(&mut self, new_limit: u64) -> Result<()> {
        if new_limit <= self.limit {
            return Ok(());
        }
        if new_limit > self.cap {
            return Err(Error::CapacityExceeded {
                requested: new_limit,
                cap: self.cap,
            });
        }
        let target = new_limit.div_ceil(SEGMENT_SPAN) * SEGMENT_SPAN;
        debug_assert!(target <= self.cap);

        self.base_primes = simple_sieve(isqrt(target - 1));

        let old_words = self.words.len();
        let total_words = (target / SEGMENT_SPAN) as usize * SEGMENT_WORDS;
        self.words.resize(total_words, !0u64);

        let first_new_segment = old_words / SEGMENT_WORDS;
        let base = &self.base_primes;
        self.words[old_words..]
            .par_chunks_mut(SEGMENT_WORDS)
            .enumerate()
            .for_each(|(i, seg)| {
                let seg_lo = (first_new_segment + i) as u64 * SEGMENT_SPAN;
                sieve_segment(seg, seg_lo, base);
            });

        if first_new_segment == 0 {
            // 1 is not prime.
            self.words[0] &= !1u64;
        }
        self.limit = target;
        Ok(())
    }

    /// Grow so that `needed` fits, doubling at minimum to amortize repeated
    /// growth during open-ended scans. Clamps to the cap when the doubled
    /// target would overshoot it but `needed` itself still fits.
    pub fn grow_for(&mut self, needed: u64) -> Result<()> {
        if needed <= self.limit {
            return Ok(());
        }
        if needed > self.cap {
            return Err(Error::CapacityExceeded {
                requested: needed,
                cap: self.cap,
            });
        }
        let target = (2 * self.limit).clamp(needed, self.cap);
        self.extend_to(target)
    }

    /// Primality of `n`, which must lie below the sieved limit.
    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n >= self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(self.is_prime_unchecked(n))
    }

    /// Hot-loop primality lookup; caller guarantees `n < limit`.
    #[inline]
    pub(crate) fn is_prime_unchecked(&self, n: u64) -> bool {
        debug_assert!(n < self.limit);
        if n < 3 {
            return n == 2;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = (n >> 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Iterator over primes in `[lo, hi)`. `hi` must not exceed the limit.
    pub fn primes(&self, lo: u64, hi: u64) -> Result<Primes<'_>> {
        if hi > self.limit {
            return Err(Error::OutOfRange {
                n: hi,
                limit: self.limit,
            });
        }
        Ok(Primes::new(&self.words, lo, hi))
    }

    /// Primes in `(lo, hi]`, collected. Convenience for the covering stages,
    /// which reason in half-open-from-the-left windows.
    pub fn primes_in_window(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        Ok(self.primes(lo + 1, hi + 1)?.collect())
    }

    /// Number of primes in `[lo, hi)` via masked popcounts.
    pub fn count_primes(&self, lo: u64, hi: u64) -> Result<u64> {
        if hi > self.limit {
            return Err(Error::OutOfRange {
                n: hi,
                limit: self.limit,
            });
        }
        let mut count = u64::from(lo <= 2 && 2 < hi);
        let mut lo2 = lo.max(3);
        if lo2 % 2 == 0 {
            lo2 += 1;
        }
        if lo2 >= hi {
            return Ok(count);
        }
        let i_lo = (lo2 >> 1) as usize;
        let i_hi = (hi >> 1) as usize; // exclusive
        let (w_lo, w_hi) = (i_lo / 64, i_hi / 64);
        if w_lo == w_hi {
            let m = ones_range(i_lo % 64, i_hi % 64);
            return Ok(count + (self.words[w_lo] & m).count_ones() as u64);
        }
        count += (self.words[w_lo] & (!0u64 << (i_lo % 64))).count_ones() as u64;
        for w in &self.words[w_lo + 1..w_hi] {
            count += w.count_ones() as u64;
        }
        if i_hi % 64 != 0 {
            count += (self.words[w_hi] & !(!0u64 << (i_hi % 64))).count_ones() as u64;
        }
        Ok(count)
    }

    /// Persist the table: magic, limit, packed bitmap, 64-bit checksum.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        let mut sum = Fnv1a::new();

        sum.update(CACHE_MAGIC);
        out.write_all(CACHE_MAGIC)?;
        let limit_bytes = self.limit.to_le_bytes();
        sum.update(&limit_bytes);
        out.write_all(&limit_bytes)?;
        for w in &self.words {
            let b = w.to_le_bytes();
            sum.update(&b);
            out.write_all(&b)?;
        }
        out.write_all(&sum.finish().to_le_bytes())?;
        out.flush()?;
        Ok(())
    }

    /// Load a persisted table, re-verifying the checksum and rebuilding the
    /// base-prime list from the bitmap itself.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        if bytes.len() < CACHE_MAGIC.len() + 8 + 8 {
            return Err(Error::CorruptCache("file too short".into()));
        }
        if &bytes[..6] != CACHE_MAGIC {
            return Err(Error::CorruptCache("bad magic".into()));
        }
        let payload_end = bytes.len() - 8;
        let mut sum = Fnv1a::new();
        sum.update(&bytes[..payload_end]);
        let stored = u64::from_le_bytes(bytes[payload_end..].try_into().unwrap());
        if sum.finish() != stored {
            return Err(Error::CorruptCache(format!(
                "checksum mismatch: stored {stored:#018x}, computed {:#018x}",
                sum.finish()
            )));
        }
        let limit = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
        if limit % SEGMENT_SPAN != 0 {
            return Err(Error::CorruptCache(format!(
                "limit {limit} is not a segment boundary"
            )));
        }
        let expect_words = (limit / SEGMENT_SPAN) as usize * SEGMENT_WORDS;
        let word_bytes = &bytes[14..payload_end];
        if word_bytes.len() != expect_words * 8 {
            return Err(Error::CorruptCache(format!(
                "payload holds {} words, limit {limit} implies {expect_words}",
                word_bytes.len() / 8
            )));
        }
        let words: Vec<u64> = word_bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut table = PrimeTable {
            limit,
            words,
            base_primes: Vec::new(),
            cap: DEFAULT_CAP.max(limit),
        };
        if limit > 0 {
            let root = isqrt(limit - 1);
            table.base_primes = table.primes(2, root + 1)?.collect();
        }
        Ok(table)
    }
}

impl Default for PrimeTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Mask with bits `[lo, hi)` set (`hi` ≤ 64, `hi` == 0 meaning none here is
/// never passed; callers guarantee `lo < hi`).
#[inline]
fn ones_range(lo: usize, hi: usize) -> u64 {
    debug_assert!(lo < hi && hi <= 64);
    let high = if hi == 64 { !0u64 } else { (1u64 << hi) - 1 };
    high & (!0u64 << lo)
}

/// Sieve one segment `[seg_lo, seg_lo + SEGMENT_SPAN)` given base primes
/// covering its square root. `seg` arrives all-ones.
fn sieve_segment(seg: &mut [u64], seg_lo: u64, base_primes: &[u64]) {
    let seg_hi = seg_lo + SEGMENT_SPAN;
    let bit_base = seg_lo / 2;
    for &p in base_primes {
        if p == 2 {
            continue;
        }
        if p * p >= seg_hi {
            break;
        }
        // First odd multiple of p inside the segment, at least p^2 (smaller
        // multiples are cleared via their own smaller prime factor).
        let mut m = seg_lo.div_ceil(p) * p;
        if m < p * p {
            m = p * p;
        }
        if m % 2 == 0 {
            m += p;
        }
        while m < seg_hi {
            let bit = m / 2 - bit_base;
            seg[(bit / 64) as usize] &= !(1u64 << (bit % 64));
            m += 2 * p;
        }
    }
}

/// Plain bool-array sieve used only to bootstrap base primes (≤ 2^20 for the
/// default cap, so the simple form is plenty).
fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

/// Streaming FNV-1a, the checksum used by the cache and checkpoint formats.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub(crate) fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
    pub(crate) fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

/// Word-skipping iterator over primes in `[lo, hi)`.
pub struct Primes<'a> {
    words: &'a [u64],
    hi: u64,
    pending_two: bool,
    word_idx: usize,
    mask: u64,
    done: bool,
}

impl<'a> Primes<'a> {
    fn new(words: &'a [u64], lo: u64, hi: u64) -> Self {
        let pending_two = lo <= 2 && 2 < hi;
        let mut it = Primes {
            words,
            hi,
            pending_two,
            word_idx: 0,
            mask: 0,
            done: false,
        };
        let mut lo2 = lo.max(3);
        if lo2 % 2 == 0 {
            lo2 += 1;
        }
        if lo2 >= hi {
            it.done = true;
        } else {
            let i_lo = (lo2 >> 1) as usize;
            it.word_idx = i_lo / 64;
            it.mask = words.get(it.word_idx).copied().unwrap_or(0) & (!0u64 << (i_lo % 64));
        }
        it
    }
}

impl Iterator for Primes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pending_two {
            self.pending_two = false;
            return Some(2);
        }
        if self.done {
            return None;
        }
        loop {
            if self.mask != 0 {
                let tz = self.mask.trailing_zeros() as u64;
                self.mask &= self.mask - 1;
                let n = (self.word_idx as u64 * 64 + tz) * 2 + 1;
                if n < self.hi {
                    return Some(n);
                }
                self.done = true;
                return None;
            }
            self.word_idx += 1;
            match self.words.get(self.word_idx) {
                Some(&w) => self.mask = w,
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial division, deliberately naive: the independent referee for the
    /// bitmap sieve.
    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        let mut d = 3;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        true
    }

    #[test]
    fn empty_table_extends_and_answers() {
        let mut t = PrimeTable::new();
        assert_eq!(t.limit(), 0);
        t.extend_to(100).unwrap();
        assert!(t.limit() >= 100);
        assert!(t.is_prime(97).unwrap());
        assert!(!t.is_prime(91).unwrap()); // 7 * 13
        assert!(t.is_prime(2).unwrap());
        assert!(!t.is_prime(1).unwrap());
        assert!(!t.is_prime(0).unwrap());
    }

    #[test]
    fn extend_is_idempotent_at_or_below_limit() {
        let mut t = PrimeTable::with_limit(100).unwrap();
        let limit = t.limit();
        let words_before = t.words.clone();
        t.extend_to(100).unwrap();
        t.extend_to(50).unwrap();
        assert_eq!(t.limit(), limit);
        assert_eq!(t.words, words_before);
    }

    #[test]
    fn extension_is_bitwise_stable() {
        let mut t = PrimeTable::with_limit(100_000).unwrap();
        let prefix = t.words.clone();
        t.extend_to(1_000_000).unwrap();
        assert_eq!(&t.words[..prefix.len()], &prefix[..]);
    }

    #[test]
    fn agrees_with_trial_division_below_a_million() {
        let t = PrimeTable::with_limit(1_000_000).unwrap();
        for n in 0..1_000_000u64 {
            assert_eq!(
                t.is_prime(n).unwrap(),
                is_prime_trial(n),
                "disagreement at {n}"
            );
        }
    }

    #[test]
    fn pi_of_one_million() {
        let t = PrimeTable::with_limit(1_000_000).unwrap();
        let count = t.primes(2, 1_000_000).unwrap().count();
        assert_eq!(count, 78_498);
        assert_eq!(t.count_primes(2, 1_000_000).unwrap(), 78_498);
    }

    #[test]
    fn pi_of_one_hundred_million() {
        let t = PrimeTable::with_limit(100_000_000).unwrap();
        assert_eq!(t.count_primes(0, 100_000_000).unwrap(), 5_761_455);
    }

    #[test]
    fn query_beyond_limit_is_refused() {
        let t = PrimeTable::with_limit(100).unwrap();
        let limit = t.limit();
        assert!(matches!(
            t.is_prime(limit),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            t.primes(0, limit + 1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let mut t = PrimeTable::with_cap(1 << 20);
        t.extend_to(1 << 20).unwrap();
        let err = t.extend_to((1 << 20) + 1).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
    }

    #[test]
    fn iterator_respects_bounds() {
        let t = PrimeTable::with_limit(1000).unwrap();
        let ps: Vec<u64> = t.primes(14, 16).unwrap().collect();
        assert!(ps.is_empty());
        let ps: Vec<u64> = t.primes(0, 20).unwrap().collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19]);
        let ps: Vec<u64> = t.primes(3, 8).unwrap().collect();
        assert_eq!(ps, vec![3, 5, 7]);
        let window = t.primes_in_window(20, 40).unwrap();
        assert_eq!(window, vec![23, 29, 31, 37]);
    }

    #[test]
    fn count_matches_iterator_on_assorted_ranges() {
        let t = PrimeTable::with_limit(100_000).unwrap();
        for (lo, hi) in [
            (0u64, 0u64),
            (0, 2),
            (0, 3),
            (2, 3),
            (3, 4),
            (0, 100),
            (17, 18),
            (90, 97),
            (1000, 1100),
            (99_000, 100_000),
            (64 * 2 + 1, 64 * 6 + 1),
        ] {
            let by_iter = t.primes(lo, hi).unwrap().count() as u64;
            let by_count = t.count_primes(lo, hi).unwrap();
            assert_eq!(by_iter, by_count, "range [{lo}, {hi})");
        }
    }

    #[test]
    fn grow_for_doubles() {
        let mut t = PrimeTable::with_limit(SEGMENT_SPAN).unwrap();
        t.grow_for(SEGMENT_SPAN + 1).unwrap();
        assert_eq!(t.limit(), 2 * SEGMENT_SPAN);
        // A need far beyond the doubled size jumps straight there.
        t.grow_for(10 * SEGMENT_SPAN).unwrap();
        assert_eq!(t.limit(), 10 * SEGMENT_SPAN);
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.bin");
        let t = PrimeTable::with_limit(2_000_000).unwrap();
        t.save(&path).unwrap();

        let loaded = PrimeTable::load(&path).unwrap();
        assert_eq!(loaded.limit(), t.limit());
        assert_eq!(loaded.words, t.words);
        assert_eq!(loaded.count_primes(2, 2_000_000).unwrap(), 148_933);
        // Base primes were rebuilt, not trusted from the file.
        assert!(!loaded.base_primes.is_empty());

        let mut bytes = fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            PrimeTable::load(&path),
            Err(Error::CorruptCache(_))
        ));
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..2000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "isqrt({n}) = {r}");
        }
        assert_eq!(isqrt(u64::MAX), (1u64 << 32) - 1);
    }
}
