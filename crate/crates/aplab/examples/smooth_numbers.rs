//! Counting smooth numbers in a window, against Rankin's reference curve.
//!
//! The covering construction cares how many integers of `(x, y]` have all
//! prime factors at most `z` — those are the survivors its first stage can
//! close with small primes alone. The exact count comes from a windowed
//! division sieve; alongside it the classical reference `y·exp(−u ln u)`
//! with `u = ln y / ln z` shows the expected order of magnitude. Run with:
//!
//! ```text
//! cargo run --release -p aplab --example smooth_numbers
//! ```

use aplab::covering::smooth_count;
use aplab::primes::PrimeTable;

fn main() -> aplab::Result<()> {
    let mut table = PrimeTable::new();

    // A window small enough to check by hand: the 3-smooth numbers in
    // (10, 20] are 12, 16 and 18.
    let s = smooth_count(&mut table, 10, 20, 3)?;
    println!("3-smooth in (10, 20]: {} (reference {:.1})", s.exact, s.rankin_reference);
    assert_eq!(s.exact, 3);

    // Fix the window (0, 10⁶] and sweep the smoothness bound. The exact
    // count and the reference value move together across three orders of
    // magnitude; the reference is a guide, not a bound, at this scale.
    println!("\nz-smooth counts in (0, 10⁶]:");
    println!("       z      exact     y·exp(−u ln u)   ratio");
    for z in [10u64, 30, 100, 300, 1000, 10_000] {
        let s = smooth_count(&mut table, 0, 1_000_000, z)?;
        println!(
            "  {:>6} {:>10} {:>17.1} {:>7.2}",
            z,
            s.exact,
            s.rankin_reference,
            s.exact as f64 / s.rankin_reference
        );
    }

    // The same sweep on a shifted window of the kind the covering stages
    // see: a short interval far from the origin is much poorer in smooth
    // numbers than the full segment of the same length.
    println!("\n100-smooth counts in windows of length 10⁵:");
    for x in [0u64, 100_000, 900_000] {
        let s = smooth_count(&mut table, x, x + 100_000, 100)?;
        println!("  ({:>7}, {:>7}]: {:>6}", x, x + 100_000, s.exact);
    }
    Ok(())
}
