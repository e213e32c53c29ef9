//! Four-stage residue-class covering of an integer interval.
//!
//! Given a modulus `k` and cutoffs `t1 < z < x/4 < x < y`, the construction
//! chooses one residue class `a_p mod p` for each sieving prime so that every
//! integer in `(x, y]` lies in some chosen class:
//!
//! 1. **Stage 1** takes class 0 for the small primes `p ≤ t1` and the medium
//!    primes `p ∈ (z, x/4]` (skipping divisors of `k` throughout).
//! 2. **Stage 2** picks a uniformly random class for each `s ∈ (t1, z]`.
//! 3. **Stage 3** covers greedily with the large primes `p ∈ (x/2, x]`.
//! 4. **Stage 4** matches each leftover element injectively to its own prime
//!    `q ∈ (x/4, x/2]`.
//!
//! What survives stage 1 splits exactly three ways (the `zs`/`zr`/`mq` lists
//! of [`ResidualReport`]) when `4y ≤ t1·x`. A completed cover yields, via the
//! Chinese Remainder Theorem, a witness `t` with `gcd(t + n, m) > 1` for all
//! `n ∈ (x, y]` — certifying that the coprime gap of `m = ∏ p` is at least
//! `y − x`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::jacobsthal::{jacobsthal_g, JacobsthalResult, SCAN_CAP};
use crate::primes::PrimeTable;
use crate::rng;

/// How stage 3 chooses its residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage3Mode {
    /// Maximum-coverage greedy choice per prime, ties to the smallest class.
    Greedy,
    /// Class 0 for every prime — the baseline the greedy mode is compared to.
    Zero,
}

/// Parameters of one covering run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverConfig {
    /// Modulus whose prime divisors are excluded from sieving.
    pub k: u64,
    /// Interval left endpoint; the cover targets `(x, y]`.
    pub x: u64,
    /// Interval right endpoint.
    pub y: u64,
    /// Small-prime cutoff.
    pub t1: u64,
    /// Medium-prime cutoff.
    pub z: u64,
    pub seed: u64,
    pub stage3_mode: Stage3Mode,
}

impl CoverConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k == 0 {
            return fail("k must be positive".into());
        }
        if self.t1 < 2 {
            return fail(format!("t1 must be ≥ 2 (got {})", self.t1));
        }
        if self.t1 >= self.z {
            return fail(format!("need t1 < z (got t1 = {}, z = {})", self.t1, self.z));
        }
        if 4 * self.z >= self.x {
            return fail(format!("need z < x/4 (got z = {}, x = {})", self.z, self.x));
        }
        if self.x >= self.y {
            return fail(format!("need x < y (got x = {}, y = {})", self.x, self.y));
        }
        let lhs = 4u64.checked_mul(self.y);
        let rhs = self.t1.checked_mul(self.x);
        match (lhs, rhs) {
            (Some(l), Some(r)) if l <= r => Ok(()),
            (Some(_), Some(_)) => fail(format!(
                "need 4y ≤ t1·x for the exact residual trichotomy (got y = {}, t1 = {}, x = {})",
                self.y, self.t1, self.x
            )),
            _ => fail("parameters overflow".into()),
        }
    }

    /// Primes in `(lo, hi]` not dividing `k`.
    fn sieving_primes(&self, table: &PrimeTable, lo: u64, hi: u64) -> Result<Vec<u64>> {
        Ok(table
            .primes_in_window(lo, hi)?
            .into_iter()
            .filter(|p| self.k % p != 0)
            .collect())
    }
}

/// A choice of residue class `a_p ∈ [0, p)` per sieving prime.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResidueAssignment {
    entries: BTreeMap<u64, u64>,
}

impl ResidueAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: u64, a: u64) -> Result<()> {
        if a >= p {
            return Err(Error::Domain(format!("residue {a} out of range for modulus {p}")));
        }
        if self.entries.contains_key(&p) {
            return Err(Error::Domain(format!("prime {p} assigned twice")));
        }
        self.entries.insert(p, a);
        Ok(())
    }

    /// Does some chosen class contain `n`?
    pub fn covers(&self, n: u64) -> bool {
        self.entries.iter().any(|(&p, &a)| n % p == a)
    }

    /// Fold `other` in; the prime sets must be disjoint.
    pub fn merge(&mut self, other: &ResidueAssignment) -> Result<()> {
        for (&p, &a) in &other.entries {
            self.insert(p, a)?;
        }
        Ok(())
    }

    /// Entries in increasing prime order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&p, &a)| (p, a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Product of the assigned primes.
    pub fn modulus(&self) -> BigUint {
        let mut m = BigUint::one();
        for &p in self.entries.keys() {
            m *= p;
        }
        m
    }
}

/// Stage 1: class 0 for small primes (`p ≤ t1`) and medium primes
/// (`p ∈ (z, x/4]`), excluding divisors of `k`.
pub fn stage1_assign(table: &mut PrimeTable, cfg: &CoverConfig) -> Result<ResidueAssignment> {
    cfg.validate()?;
    table.grow_for(cfg.x + 1)?;
    let mut asg = ResidueAssignment::new();
    for p in cfg.sieving_primes(table, 1, cfg.t1)? {
        asg.insert(p, 0)?;
    }
    for p in cfg.sieving_primes(table, cfg.z, cfg.x / 4)? {
        asg.insert(p, 0)?;
    }
    Ok(asg)
}

/// Stage 2: independent uniform residues for the primes `s ∈ (t1, z]`, `s ∤ k`,
/// drawn from the seeded generator (rejection sampling, no modulo bias).
pub fn stage2_random(table: &mut PrimeTable, cfg: &CoverConfig) -> Result<ResidueAssignment> {
    cfg.validate()?;
    table.grow_for(cfg.z + 1)?;
    let mut gen = rng::stream(cfg.seed);
    let mut asg = ResidueAssignment::new();
    for s in cfg.sieving_primes(table, cfg.t1, cfg.z)? {
        asg.insert(s, rng::below(&mut gen, s))?;
    }
    Ok(asg)
}

/// The three-way split of what survives stage 1 in `(x, y]`.
///
/// `zs` holds the `z`-smooth survivors; `zr` those whose largest prime factor
/// lies in `(z, x/4]` (necessarily a divisor of `k`); `mq` those of the form
/// `m·q` with `q` prime, `q > x/4`, and the cofactor `m ≤ 4y/x` made of
/// divisors of `k`. `other` collects anything violating its class's side
/// conditions — provably empty when the config invariants hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub zs: Vec<u64>,
    pub zr: Vec<u64>,
    pub mq: Vec<u64>,
    pub other: Vec<u64>,
    /// `∏ (1 − 1/s)` over the stage-2 primes — the expected surviving fraction
    /// under random residues.
    pub sigma: f64,
    /// Product of the primes dividing `k` that are ≤ t1.
    pub m_small: u64,
    /// Product of the primes dividing `k` in `(t1, z]`.
    pub kappa: u64,
}

impl ResidualReport {
    /// All survivors, ascending.
    pub fn uncovered(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self
            .zs
            .iter()
            .chain(&self.zr)
            .chain(&self.mq)
            .chain(&self.other)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// Classify every integer of `(x, y]` left uncovered by the stage-1
/// assignment. See [`ResidualReport`].
pub fn classify_residual(
    table: &mut PrimeTable,
    cfg: &CoverConfig,
    stage1: &ResidueAssignment,
) -> Result<ResidualReport> {
    cfg.validate()?;
    table.grow_for(cfg.y + 1)?;
    let k_fac = factorize(table, cfg.k)?;
    let mut report = ResidualReport {
        zs: Vec::new(),
        zr: Vec::new(),
        mq: Vec::new(),
        other: Vec::new(),
        sigma: sigma(table, cfg)?,
        m_small: k_fac.primes().filter(|&p| p <= cfg.t1).product(),
        kappa: k_fac
            .primes()
            .filter(|&p| p > cfg.t1 && p <= cfg.z)
            .product(),
    };
    let divides_k = |p: u64| cfg.k % p == 0;
    for n in cfg.x + 1..=cfg.y {
        if stage1.covers(n) {
            continue;
        }
        let fac = factorize(table, n)?;
        let top = fac.largest_prime_factor();
        if top <= cfg.z {
            report.zs.push(n);
        } else if 4 * top <= cfg.x {
            // Everything above z in a survivor must divide k; otherwise the
            // medium-prime sieve would have removed n.
            if fac.primes().filter(|&p| p > cfg.z).all(divides_k) {
                report.zr.push(n);
            } else {
                report.other.push(n);
            }
        } else {
            let q = top;
            let cofactor = n / q;
            let cofactor_ok = cofactor
                .checked_mul(cfg.x)
                .map(|lhs| lhs <= 4 * cfg.y)
                .unwrap_or(false)
                && fac.primes().filter(|&p| p != q).all(divides_k);
            if q <= cfg.y && cofactor_ok {
                report.mq.push(n);
            } else {
                report.other.push(n);
            }
        }
    }
    Ok(report)
}

/// `∏ (1 − 1/s)` over the stage-2 prime set.
pub fn sigma(table: &PrimeTable, cfg: &CoverConfig) -> Result<f64> {
    let mut prod = 1.0;
    for s in cfg.sieving_primes(table, cfg.t1, cfg.z)? {
        prod *= 1.0 - 1.0 / s as f64;
    }
    Ok(prod)
}

/// Stage 3, greedy mode: walk `primes` in increasing order; give each the
/// class covering the most of the remaining set (ties to the smallest class),
/// then discard what it covered.
pub fn stage3_greedy(residual: &[u64], primes: &[u64]) -> ResidueAssignment {
    let mut remaining = residual.to_vec();
    let mut asg = ResidueAssignment::new();
    let mut sorted: Vec<u64> = primes.to_vec();
    sorted.sort_unstable();
    for p in sorted {
        let mut counts = vec![0u32; p as usize];
        for &n in &remaining {
            counts[(n % p) as usize] += 1;
        }
        let mut best = 0u64;
        for b in 1..p {
            if counts[b as usize] > counts[best as usize] {
                best = b;
            }
        }
        asg.insert(p, best).expect("stage sets are disjoint");
        remaining.retain(|&n| n % p != best);
    }
    asg
}

/// Stage 3, baseline mode: class 0 for every prime.
pub fn stage3_zero(primes: &[u64]) -> ResidueAssignment {
    let mut asg = ResidueAssignment::new();
    for &p in primes {
        asg.insert(p, 0).expect("stage sets are disjoint");
    }
    asg
}

/// Stage 4: match the `i`-th smallest leftover to the `i`-th smallest unused
/// prime, taking the class that contains it.
pub fn stage4_match(residual: &[u64], primes: &[u64]) -> Result<ResidueAssignment> {
    if residual.len() > primes.len() {
        return Err(Error::Stage4Deficit {
            needed: residual.len(),
            available: primes.len(),
        });
    }
    let mut ns: Vec<u64> = residual.to_vec();
    ns.sort_unstable();
    let mut qs: Vec<u64> = primes.to_vec();
    qs.sort_unstable();
    let mut asg = ResidueAssignment::new();
    for (&n, &q) in ns.iter().zip(&qs) {
        asg.insert(q, n % q)?;
    }
    Ok(asg)
}

/// Solve `t ≡ −a_p (mod p)` for all entries; returns `(t, ∏p)` with
/// `0 ≤ t < ∏p`. The empty assignment gives `(0, 1)`.
pub fn crt_combine(assignment: &ResidueAssignment) -> (BigUint, BigUint) {
    let mut t = BigUint::zero();
    let mut m = BigUint::one();
    for (p, a) in assignment.iter() {
        let target = (p - a) % p;
        let t_mod = (&t % p).to_u64().expect("residue fits u64");
        let m_mod = (&m % p).to_u64().expect("residue fits u64");
        let diff = (target + p - t_mod) % p;
        let step = diff * inv_mod(m_mod, p) % p;
        t += &m * step;
        m *= p;
    }
    (t, m)
}

/// Modular inverse for prime modulus `p` (so `a` with `p ∤ a` is invertible).
fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime to the residue");
    s0.rem_euclid(p as i128) as u64
}

/// Outcome of the exhaustive certification of an assignment over `(x, y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCertificate {
    /// CRT witness: `t ≡ −a_p (mod p)` for every assigned prime.
    pub t: BigUint,
    /// Product of the assigned primes.
    pub modulus: BigUint,
    /// Every `n ∈ (x, y]` lies in an assigned class.
    pub covered: bool,
    /// `gcd(t + n, modulus) > 1` for every `n ∈ (x, y]`.
    pub gcd_witnessed: bool,
}

/// Check an assignment against the whole interval — every `n`, never a
/// sample — and compute its CRT witness.
pub fn verify_cover(x: u64, y: u64, assignment: &ResidueAssignment) -> CoverCertificate {
    let (t, modulus) = crt_combine(assignment);
    let mut covered = true;
    let mut gcd_witnessed = true;
    let one = BigUint::one();
    for n in x + 1..=y {
        if !assignment.covers(n) {
            covered = false;
        }
        if (&t + n).gcd(&modulus) <= one {
            gcd_witnessed = false;
        }
    }
    CoverCertificate {
        t,
        modulus,
        covered,
        gcd_witnessed,
    }
}

/// Uncovered counts after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub after_stage1: usize,
    pub after_stage2: usize,
    pub after_stage3: usize,
    pub after_stage4: usize,
}

/// Everything a covering run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    pub config: CoverConfig,
    /// All four stages merged.
    pub assignment: ResidueAssignment,
    pub uncovered_after: StageCounts,
    /// The stage-1 residual classification.
    pub residual: ResidualReport,
    /// CRT witness.
    pub t: BigUint,
    /// Product of all assigned primes.
    pub modulus: BigUint,
    /// Both exhaustive checks passed and no stage failed.
    pub verified: bool,
    /// The coprime-gap length this cover certifies when verified: `y − x`.
    pub gap_certified: u64,
    /// `(needed, available)` when stage 4 ran out of primes.
    pub stage4_deficit: Option<(usize, usize)>,
}

/// Run all four stages, then certify the merged assignment exhaustively.
///
/// A stage-4 deficit is reported in the result (`verified = false`,
/// `stage4_deficit` set) rather than as an error, so callers can inspect how
/// close the construction came and retry with a smaller `y`.
pub fn build_cover(table: &mut PrimeTable, cfg: &CoverConfig) -> Result<CoverResult> {
    cfg.validate()?;
    table.grow_for(cfg.y + 1)?;

    let a1 = stage1_assign(table, cfg)?;
    let residual = classify_residual(table, cfg, &a1)?;
    if !residual.other.is_empty() {
        return Err(Error::Domain(format!(
            "residual trichotomy violated for {:?} — this is a bug, the config invariants make it impossible",
            residual.other
        )));
    }
    let uncovered1 = residual.uncovered();

    let a2 = stage2_random(table, cfg)?;
    let uncovered2: Vec<u64> = uncovered1
        .iter()
        .copied()
        .filter(|&n| !a2.covers(n))
        .collect();

    let big = cfg.sieving_primes(table, cfg.x / 2, cfg.x)?;
    let a3 = match cfg.stage3_mode {
        Stage3Mode::Greedy => stage3_greedy(&uncovered2, &big),
        Stage3Mode::Zero => stage3_zero(&big),
    };
    let uncovered3: Vec<u64> = uncovered2
        .iter()
        .copied()
        .filter(|&n| !a3.covers(n))
        .collect();

    let mid = cfg.sieving_primes(table, cfg.x / 4, cfg.x / 2)?;
    let (a4, stage4_deficit) = match stage4_match(&uncovered3, &mid) {
        Ok(a) => (a, None),
        Err(Error::Stage4Deficit { needed, available }) => {
            (ResidueAssignment::new(), Some((needed, available)))
        }
        Err(e) => return Err(e),
    };
    let uncovered4: Vec<u64> = uncovered3
        .iter()
        .copied()
        .filter(|&n| !a4.covers(n))
        .collect();

    let mut assignment = a1;
    assignment.merge(&a2)?;
    assignment.merge(&a3)?;
    assignment.merge(&a4)?;

    let cert = verify_cover(cfg.x, cfg.y, &assignment);
    let verified = stage4_deficit.is_none() && cert.covered && cert.gcd_witnessed;
    Ok(CoverResult {
        config: *cfg,
        assignment,
        uncovered_after: StageCounts {
            after_stage1: uncovered1.len(),
            after_stage2: uncovered2.len(),
            after_stage3: uncovered3.len(),
            after_stage4: uncovered4.len(),
        },
        residual,
        t: cert.t,
        modulus: cert.modulus,
        verified,
        gap_certified: cfg.y - cfg.x,
        stage4_deficit,
    })
}

/// Where the sieving modulus is small enough for the full-period scan,
/// recompute its coprime gap independently; `None` when it is out of reach.
///
/// A verified cover of `(x, y]` promises `g(modulus) ≥ y − x`, and this is
/// the cross-check.
pub fn gap_crosscheck(
    table: &mut PrimeTable,
    modulus: &BigUint,
) -> Result<Option<JacobsthalResult>> {
    match modulus.to_u64() {
        Some(m) if m <= SCAN_CAP => Ok(Some(jacobsthal_g(table, m)?)),
        _ => Ok(None),
    }
}

/// Exact count of `z`-smooth integers in `(x, y]`, with Rankin's
/// upper-bound-style reference value for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothCount {
    pub exact: u64,
    /// `y · exp(−u ln u)` with `u = ln y / ln z`; reported, never asserted.
    pub rankin_reference: f64,
}

/// Count `{n ∈ (x, y] : P⁺(n) ≤ z}` by a windowed division sieve
/// (`P⁺(1) = 1`, so `n = 1` is `z`-smooth for every `z`).
pub fn smooth_count(table: &mut PrimeTable, x: u64, y: u64, z: u64) -> Result<SmoothCount> {
    const Y_CAP: u64 = 1_000_000_000;
    if y > Y_CAP {
        return Err(Error::OutOfRange { n: y, limit: Y_CAP });
    }
    if x >= y {
        return Err(Error::Domain(format!(
            "need x < y for the window (x, y] (got x = {x}, y = {y})"
        )));
    }
    if z == 0 {
        return Err(Error::Domain("smoothness bound z must be ≥ 1".into()));
    }
    let rankin_reference = if z == 1 {
        0.0
    } else {
        let u = (y as f64).ln() / (z as f64).ln();
        y as f64 * (-u * u.ln()).exp()
    };
    if z >= y {
        // Every n ≤ y has P⁺(n) ≤ n ≤ z.
        return Ok(SmoothCount {
            exact: y - x,
            rankin_reference,
        });
    }
    let bound = z.min(y);
    table.grow_for(bound + 1)?;
    let primes: Vec<u64> = table.primes_in_window(1, bound)?;
    let mut exact = 0u64;
    const SPAN: u64 = 1 << 20;
    let mut lo = x + 1;
    while lo <= y {
        let hi = (lo + SPAN - 1).min(y);
        let mut residue: Vec<u64> = (lo..=hi).collect();
        for &p in &primes {
            let first = lo.div_ceil(p) * p;
            let mut n = first;
            while n <= hi {
                let slot = &mut residue[(n - lo) as usize];
                while *slot % p == 0 {
                    *slot /= p;
                }
                n += p;
            }
        }
        exact += residue.iter().filter(|&&r| r == 1).count() as u64;
        lo = hi + 1;
    }
    Ok(SmoothCount {
        exact,
        rankin_reference,
    })
}
