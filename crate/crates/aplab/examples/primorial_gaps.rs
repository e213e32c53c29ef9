//! The Jacobsthal function on primorials, and what a large gap buys.
//!
//! g(m) is the largest gap between consecutive integers coprime to m. On the
//! primorials m = 2·3·5···p_n it grows remarkably slowly — the table below
//! also shows g/ln²m, the density Iwaniec's bound g(m) ≪ ln²m makes
//! interesting. A modulus m with a large gap converts directly into a long
//! prime-free stretch of any progression it is woven into. Run with:
//!
//! ```text
//! cargo run --release -p aplab --example primorial_gaps
//! ```

use aplab::jacobsthal::{iwaniec_table, jacobsthal_g, pomerance_bound};
use aplab::least_prime::p_max;
use aplab::primes::PrimeTable;

fn main() -> aplab::Result<()> {
    let mut table = PrimeTable::new();

    println!("  n     p_n#          g    witness      g/ln²m");
    for row in iwaniec_table(&mut table, 8)? {
        println!(
            "  {:>1} {:>12} {:>6} {:>10} {:>11.4}",
            row.n, row.m, row.g, row.witness_start, row.gap_over_log_sq
        );
    }

    // Individual squarefree moduli work too.
    let r = jacobsthal_g(&mut table, 2 * 3 * 7 * 11)?;
    println!(
        "\ng({}) = {} — first maximal run starts at {}",
        r.m, r.g, r.witness_start
    );

    // The reduction: a gap for the primes outside k bounds the least prime
    // in SOME progression mod k from below by (g − 1)·k, provided the
    // arithmetic hypotheses hold. Desk-scale k satisfy them only rarely —
    // the three below do, and the actual P(k) clears each bound.
    println!("\nreduction m = ∏ p ≤ x, p ∤ k:");
    for (k, x) in [(210u64, 11u64), (2310, 13), (30030, 19)] {
        let b = pomerance_bound(&mut table, k, x)?;
        let actual = p_max(&mut table, k)?;
        println!(
            "  k = {:>6}, x = {:>2}: m = {:>4}, g(m) = {}, bound (g−1)·k = {:>6}, \
             hypotheses {}, actual P(k) = {}",
            b.k,
            b.x,
            b.m,
            b.g_m,
            b.bound,
            if b.hypotheses_ok { "hold" } else { "FAIL" },
            actual.p_max
        );
        assert!(b.hypotheses_ok && actual.p_max >= b.bound);
    }
    Ok(())
}
