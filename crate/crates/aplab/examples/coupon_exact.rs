//! The coupon-collector model of least primes, computed exactly.
//!
//! The first `m` primes are dealt into the `φ(k)` reduced classes mod `k`,
//! except that primes closer than `k` cannot repeat a class — the constraint
//! vector `π` counts, for each prime, how many predecessors crowd its window.
//! Everything here is exact rational arithmetic; nothing is sampled. Run
//! with:
//!
//! ```text
//! cargo run --release -p aplab --example coupon_exact
//! ```

use aplab::coupon::{
    bonferroni_bounds, empty_prob_exact, event_prob_enumerate, negative_correlation_check,
    pi_vector, threshold_sweep,
};
use aplab::primes::PrimeTable;
use aplab::Error;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn main() -> aplab::Result<()> {
    let mut table = PrimeTable::new();

    // The constraint vector and the free-cell counts it leaves.
    for (k, m) in [(10u64, 4usize), (16, 9)] {
        let pis = pi_vector(&mut table, k, m)?;
        println!(
            "k = {:>2}, m = {}: π = {:?}, free cells = {:?}, |Ω| = {}",
            k,
            m,
            pis.values,
            pis.cells(),
            pis.omega_size()
        );
    }

    // k = 10 packs its four classes so tightly that the four primes
    // 2, 3, 5, 7 all sit within one window: every admissible tuple is a
    // permutation, so no class can be empty, and a fifth prime has no
    // cell left at all.
    let probs = empty_prob_exact(&mut table, 10, 4)?;
    println!("\nk = 10, m = 4: p_single = {} (a zero factor pins the product)", probs.p_single);
    let e = event_prob_enumerate(&mut table, 10, 4)?;
    assert_eq!(e.p_a, BigRational::zero()); // P(A) = 0
    let pis = pi_vector(&mut table, 10, 5)?;
    assert!(pis.degenerate() && pis.omega_size() == 0);
    match empty_prob_exact(&mut table, 10, 5) {
        Err(Error::EmptySpace(_)) => {
            println!("k = 10, m = 5: π = {:?} — Ω is empty, probability ops refuse", pis.values)
        }
        other => panic!("expected an empty space, got {other:?}"),
    }

    // k = 16, m = 9 is the showcase: the pair product vanishes, so the
    // first-order bracket closes and P(A) collapses to an exact 1/2.
    let probs = empty_prob_exact(&mut table, 16, 9)?;
    println!(
        "\nk = 16, m = 9: p_single = {}, p_pair = {}",
        probs.p_single, probs.p_pair
    );
    let b = bonferroni_bounds(&mut table, 16, 9)?;
    println!("  Bonferroni bracket: [{}, {}]", b.lower, b.upper);
    assert_eq!(b.lower, b.upper);

    let e = event_prob_enumerate(&mut table, 16, 9)?;
    println!(
        "  enumeration over {} tuples: P(A) = {} = {:.6}",
        e.omega_size,
        e.p_a,
        e.p_a.to_f64().unwrap()
    );
    assert_eq!(e.p_a, b.upper);
    // Each per-class count matches the sequential product independently.
    for p_i in &e.p_empty_by_class {
        assert_eq!(*p_i, probs.p_single);
    }

    // Covering events lean against each other: seeing class i empty makes
    // the others more likely to be hit. Exhaustive counting confirms the
    // inequality P(all covered) ≤ ∏ P(class i nonempty).
    for (k, m) in [(5u64, 3usize), (8, 4), (10, 3), (16, 9)] {
        assert!(negative_correlation_check(&mut table, k, m)?);
    }
    println!("\nnegative correlation holds on every instance checked");

    // The classical collector needs ~φ ln φ draws to cover φ cells; near
    // double that, misses should be rare. The window constraint empties Ω
    // long before the second threshold at this scale.
    println!("\nthreshold sweep for k = 10 (φ = 4, φ·ln φ ≈ 5.5):");
    for pt in threshold_sweep(&mut table, 10, 0.1)? {
        match (pt.p_single, pt.expected_empty) {
            (Some(p), Some(ee)) => println!(
                "  α = {:.1}: m = {:>2}, p_single = {:.4}, expected empty classes = {:.4}",
                pt.alpha, pt.m, p, ee
            ),
            _ => println!("  α = {:.1}: m = {:>2}, Ω is empty", pt.alpha, pt.m),
        }
    }
    Ok(())
}
