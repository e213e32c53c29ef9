//! Constrained coupon-collector model for residue classes hit by primes.
//!
//! Think of the `φ(k)` reduced classes mod `k` as coupons. The first `m`
//! primes `p_1 = 2, p_2 = 3, …` draw classes one at a time, but two primes
//! closer than `k` cannot land in the same class. The sample space is
//!
//! ```text
//! Ω_k = {(x_1, …, x_m) : x_i ≠ x_j whenever |p_i − p_j| < k},
//! ```
//!
//! with `x_t ∈ {1, …, φ(k)}`. Writing `π_t = #{j < t : p_t − p_j < k}`, the
//! number of choices at step `t` is `φ(k) − π_t`, every valid tuple has the
//! same probability, and the chance a fixed class is never drawn — or that a
//! fixed pair is never drawn — is an exact product over the steps. The event
//! `A` that some class stays empty is what makes the least prime `P(k)`
//! exceed `p_m`, and tiny instances are small enough to enumerate outright,
//! giving an oracle for every formula here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factorize_growing;
use crate::primes::PrimeTable;
use crate::rng;

/// Largest number of tuples the enumeration oracle will walk.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// The window counts `π_t` for one `(k, m)` instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiVector {
    pub k: u64,
    pub phi: u64,
    /// `values[t-1] = π_t = #{j < t : p_t − p_j < k}` for `t = 1..=m`.
    pub values: Vec<u64>,
}

impl PiVector {
    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// `φ(k) − π_t` per step, the number of admissible classes (0 when the
    /// space has collapsed).
    pub fn cells(&self) -> Vec<u64> {
        self.values.iter().map(|&p| self.phi.saturating_sub(p)).collect()
    }

    /// True when some step has no admissible class, i.e. `Ω_k` is empty for
    /// this `m` (and every larger one reaching that step).
    pub fn degenerate(&self) -> bool {
        self.values.iter().any(|&p| p >= self.phi)
    }

    /// `|Ω_k| = ∏ (φ − π_t)`, saturating at `u128::MAX`.
    pub fn omega_size(&self) -> u128 {
        self.cells()
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128))
            .unwrap_or(u128::MAX)
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.degenerate() {
            return Err(Error::EmptySpace(format!(
                "no admissible class left: some π_t reaches φ({}) = {} within the first {} primes",
                self.k,
                self.phi,
                self.m()
            )));
        }
        Ok(())
    }
}

/// The first `m` primes `2, 3, 5, …`.
pub fn first_primes(table: &mut PrimeTable, m: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    // p_m < m (ln m + ln ln m) for m ≥ 6; pad and double on shortfall.
    let mut limit = if m < 6 {
        16
    } else {
        let mf = m as f64;
        (mf * (mf.ln() + mf.ln().ln())) as u64 + 16
    };
    loop {
        table.grow_for(limit)?;
        let got = table.primes_in_window(1, limit)?;
        if got.len() >= m {
            return Ok(got[..m].to_vec());
        }
        limit = limit.checked_mul(2).ok_or(Error::CapacityExceeded {
            requested: u64::MAX,
            cap: table.cap(),
        })?;
    }
}

/// Exact `π_t` for `t = 1..=m` from the actual primes.
///
/// Works for any `k ≥ 1` (`m = 0` gives the empty vector); the probability
/// operations below additionally need `φ(k) ≥ 2`.
pub fn pi_vector(table: &mut PrimeTable, k: u64, m: usize) -> Result<PiVector> {
    if k == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let phi = factorize_growing(table, k)?.phi();
    let primes = first_primes(table, m)?;
    let mut values = Vec::with_capacity(m);
    let mut lo = 0usize;
    for t in 0..m {
        // The j < t with p_t − p_j < k form a suffix; advance its left edge.
        while primes[t] - primes[lo] >= k {
            lo += 1;
        }
        values.push((t - lo) as u64);
    }
    Ok(PiVector { k, phi, values })
}

fn model(table: &mut PrimeTable, k: u64, m: usize) -> Result<PiVector> {
    let pis = pi_vector(table, k, m)?;
    if pis.phi < 2 {
        return Err(Error::Domain(format!(
            "the model needs at least two residue classes; φ({k}) = {}",
            pis.phi
        )));
    }
    Ok(pis)
}

/// One uniformly drawn element of `Ω_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaSample {
    pub k: u64,
    pub m: usize,
    /// Class labels in `[1, φ(k)]`, one per prime.
    pub tuple: Vec<u32>,
}

impl OmegaSample {
    /// Re-check the membership condition against the given primes:
    /// `x_i ≠ x_j` whenever `|p_i − p_j| < k`.
    pub fn satisfies_constraints(&self, primes: &[u64]) -> bool {
        let x = &self.tuple;
        for i in 0..x.len() {
            for j in 0..i {
                if primes[i] - primes[j] < self.k && x[i] == x[j] {
                    return false;
                }
            }
        }
        true
    }
}

/// Append one sequential draw to `tuple`: at step `t` the forbidden classes
/// are exactly those of the `π_t` most recent predecessors (they are mutually
/// within `k`, hence pairwise distinct), so picking uniformly among the
/// remaining `φ − π_t` makes every valid tuple equally likely.
fn draw_step(rng: &mut impl RngCore, phi: u64, pi: u64, tuple: &mut Vec<u32>) {
    let window_from = tuple.len() - pi as usize;
    let window = &tuple[window_from..];
    let mut rank = rng::below(rng, phi - pi);
    let mut chosen = 0u32;
    for c in 1..=phi as u32 {
        if window.contains(&c) {
            continue;
        }
        if rank == 0 {
            chosen = c;
            break;
        }
        rank -= 1;
    }
    tuple.push(chosen);
}

fn draw_tuple(rng: &mut impl RngCore, pis: &PiVector, tuple: &mut Vec<u32>) {
    tuple.clear();
    for &pi in &pis.values {
        draw_step(rng, pis.phi, pi, tuple);
    }
}

/// Draw one tuple uniformly from `Ω_k` with a fresh generator for `seed`.
pub fn sample_omega(table: &mut PrimeTable, k: u64, m: usize, seed: u64) -> Result<OmegaSample> {
    let pis = model(table, k, m)?;
    pis.require_nondegenerate()?;
    let mut gen = rng::stream(seed);
    let mut tuple = Vec::with_capacity(m);
    draw_tuple(&mut gen, &pis, &mut tuple);
    Ok(OmegaSample { k, m, tuple })
}

/// The two exact step products of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct EmptyProbs {
    /// `P(E_i) = ∏_t (1 − 1/(φ − π_t))` — one fixed class never drawn.
    pub p_single: BigRational,
    /// `P(E_i ∩ E_j) = ∏_t (1 − 2/(φ − π_t))` — a fixed pair never drawn.
    pub p_pair: BigRational,
}

impl EmptyProbs {
    pub fn p_single_f64(&self) -> f64 {
        self.p_single.to_f64().unwrap_or(f64::NAN)
    }

    pub fn p_pair_f64(&self) -> f64 {
        self.p_pair.to_f64().unwrap_or(f64::NAN)
    }
}

/// `∏ (1 − d/c)` over the cell counts, exactly.
///
/// Once a cell hits `d` the product is pinned to zero; cells shrink by at
/// most one per step, so a later `c < d` factor (formally negative) can only
/// multiply an exact zero and never surfaces.
fn step_product(cells: &[u64], d: i64) -> BigRational {
    let mut prod = BigRational::one();
    for &c in cells {
        prod *= BigRational::new(BigInt::from(c as i64 - d), BigInt::from(c));
        if prod.is_zero() {
            return prod;
        }
    }
    prod
}

/// Exact `p_single` and `p_pair` for `(k, m)` (empty products for `m = 0`).
pub fn empty_prob_exact(table: &mut PrimeTable, k: u64, m: usize) -> Result<EmptyProbs> {
    let pis = model(table, k, m)?;
    pis.require_nondegenerate()?;
    let cells = pis.cells();
    Ok(EmptyProbs {
        p_single: step_product(&cells, 1),
        p_pair: step_product(&cells, 2),
    })
}

/// Everything the brute-force oracle knows about one tiny instance.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedProbs {
    pub k: u64,
    pub m: usize,
    pub phi: u64,
    pub omega_size: u128,
    /// `P(E_i)` for class `i` (1-based order), by exhaustive count.
    pub p_empty_by_class: Vec<BigRational>,
    /// `P(A) = P(some class empty)`.
    pub p_a: BigRational,
    /// `P(all classes covered) = 1 − P(A)`.
    pub p_all_covered: BigRational,
}

/// Enumerate `Ω_k` tuple by tuple and count the empty-class events exactly.
pub fn event_prob_enumerate(table: &mut PrimeTable, k: u64, m: usize) -> Result<EnumeratedProbs> {
    let pis = model(table, k, m)?;
    pis.require_nondegenerate()?;
    let size = pis.omega_size();
    if size > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            size,
            cap: ENUMERATION_CAP as u64,
        });
    }
    let phi = pis.phi as usize;
    let full: u64 = if phi == 64 { u64::MAX } else { (1u64 << phi) - 1 };
    let mut empty_counts = vec![0u64; phi];
    let mut any_empty = 0u64;
    let mut leaves = 0u64;
    let mut tuple: Vec<u32> = Vec::with_capacity(pis.m());

    // Depth-first walk; the per-step choice set mirrors the sampler's.
    fn walk(
        pis: &PiVector,
        tuple: &mut Vec<u32>,
        mask: u64,
        leaves: &mut u64,
        empty_counts: &mut [u64],
        any_empty: &mut u64,
        full: u64,
    ) {
        let t = tuple.len();
        if t == pis.m() {
            *leaves += 1;
            if mask != full {
                *any_empty += 1;
                for (i, slot) in empty_counts.iter_mut().enumerate() {
                    if mask & (1 << i) == 0 {
                        *slot += 1;
                    }
                }
            }
            return;
        }
        let window_from = t - pis.values[t] as usize;
        for c in 1..=pis.phi as u32 {
            if tuple[window_from..].contains(&c) {
                continue;
            }
            tuple.push(c);
            walk(
                pis,
                tuple,
                mask | (1 << (c - 1)),
                leaves,
                empty_counts,
                any_empty,
                full,
            );
            tuple.pop();
        }
    }
    walk(
        &pis,
        &mut tuple,
        0,
        &mut leaves,
        &mut empty_counts,
        &mut any_empty,
        full,
    );
    debug_assert_eq!(leaves as u128, size);

    let total = BigInt::from(leaves);
    let ratio = |c: u64| BigRational::new(BigInt::from(c), total.clone());
    let p_a = ratio(any_empty);
    Ok(EnumeratedProbs {
        k,
        m,
        phi: pis.phi,
        omega_size: size,
        p_empty_by_class: empty_counts.iter().map(|&c| ratio(c)).collect(),
        p_all_covered: BigRational::one() - &p_a,
        p_a,
    })
}

/// Monte Carlo estimate of `P(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub workers: u64,
}

/// Estimate `P(A)` by sampling; `trials` split across `workers` independent
/// generator streams and merged by summation, so the result is bitwise
/// reproducible for a fixed `(seed, workers)` regardless of scheduling.
pub fn monte_carlo_a(
    table: &mut PrimeTable,
    k: u64,
    m: usize,
    trials: u64,
    seed: u64,
    workers: u64,
) -> Result<MonteCarlo> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    if workers == 0 {
        return Err(Error::Domain("worker count must be positive".into()));
    }
    let pis = model(table, k, m)?;
    pis.require_nondegenerate()?;
    let full: u64 = if pis.phi == 64 {
        u64::MAX
    } else {
        (1u64 << pis.phi) - 1
    };
    let base = trials / workers;
    let extra = trials % workers;
    let hits: u64 = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut gen = rng::worker_stream(seed, w);
            let my_trials = base + u64::from(w < extra);
            let mut tuple = Vec::with_capacity(pis.m());
            let mut local = 0u64;
            for _ in 0..my_trials {
                draw_tuple(&mut gen, &pis, &mut tuple);
                let mask = tuple.iter().fold(0u64, |acc, &c| acc | 1 << (c - 1));
                if mask != full {
                    local += 1;
                }
            }
            local
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    Ok(MonteCarlo {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        workers,
    })
}

/// First-order Bonferroni bracket for `P(A)`, reported raw (no clamping).
#[derive(Debug, Clone, PartialEq)]
pub struct BonferroniBounds {
    /// `φ · p_single`.
    pub upper: BigRational,
    /// `φ · p_single − C(φ, 2) · p_pair` (may be negative).
    pub lower: BigRational,
}

pub fn bonferroni_bounds(table: &mut PrimeTable, k: u64, m: usize) -> Result<BonferroniBounds> {
    let pis = model(table, k, m)?;
    let probs = empty_prob_exact(table, k, m)?;
    let phi = BigRational::from_integer(BigInt::from(pis.phi));
    let pairs = BigRational::from_integer(BigInt::from(pis.phi * (pis.phi - 1) / 2));
    let upper = &phi * &probs.p_single;
    let lower = &upper - pairs * &probs.p_pair;
    Ok(BonferroniBounds { upper, lower })
}

/// Does `P(no class empty) ≤ ∏_i P(class i nonempty)` hold exactly?
///
/// The covering events are negatively correlated in this model; enumeration
/// confirms the implementation on every instance small enough to check.
pub fn negative_correlation_check(table: &mut PrimeTable, k: u64, m: usize) -> Result<bool> {
    let probs = event_prob_enumerate(table, k, m)?;
    let mut rhs = BigRational::one();
    for p in &probs.p_empty_by_class {
        rhs *= BigRational::one() - p;
    }
    Ok(probs.p_all_covered <= rhs)
}

/// One row of the coverage-threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub alpha: f64,
    /// `m = ⌊α·φ·ln φ⌋` below a threshold, `⌈·⌉` above it.
    pub m: u64,
    /// `P(E_i)` at this `m`, absent when `Ω_k` is already empty.
    pub p_single: Option<f64>,
    /// `φ · p_single`, the expected number of empty classes.
    pub expected_empty: Option<f64>,
}

/// Evaluate the model just below and above the coupon-collector thresholds
/// `m ≈ φ ln φ` and `m ≈ 2 φ ln φ`: `α ∈ {1−ε, 1+ε, 2−ε, 2+ε}` (rounded
/// toward the threshold's near side). Diagnostics only — desk-scale `k`
/// usually collapses `Ω_k` long before the second threshold.
pub fn threshold_sweep(table: &mut PrimeTable, k: u64, eps: f64) -> Result<Vec<ThresholdPoint>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let phi = factorize_growing(table, k)?.phi();
    if phi < 2 {
        return Err(Error::Domain(format!(
            "the model needs at least two residue classes; φ({k}) = {phi}"
        )));
    }
    let scale = phi as f64 * (phi as f64).ln();
    let mut points = Vec::with_capacity(4);
    for (alpha, round_up) in [
        (1.0 - eps, false),
        (1.0 + eps, true),
        (2.0 - eps, false),
        (2.0 + eps, true),
    ] {
        let raw = alpha * scale;
        let m = if round_up { raw.ceil() } else { raw.floor() }.max(0.0) as u64;
        let point = match empty_prob_exact(table, k, m as usize) {
            Ok(probs) => {
                let p = probs.p_single_f64();
                ThresholdPoint {
                    alpha,
                    m,
                    p_single: Some(p),
                    expected_empty: Some(phi as f64 * p),
                }
            }
            Err(Error::EmptySpace(_)) => ThresholdPoint {
                alpha,
                m,
                p_single: None,
                expected_empty: None,
            },
            Err(e) => return Err(e),
        };
        points.push(point);
    }
    Ok(points)
}
