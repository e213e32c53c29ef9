//! The least-prime statistic P(k): scan single moduli and inspect records.
//!
//! P(k) is the largest, over the reduced residue classes mod k, of the least
//! prime in that class — the last coupon of a coupon-collector run where the
//! primes 2, 3, 5, … draw classes. Run with:
//!
//! ```text
//! cargo run --release -p aplab --example least_primes
//! ```

use aplab::factor::factorize_growing;
use aplab::least_prime::{least_prime_in_ap_growing, p_max};
use aplab::primes::PrimeTable;
use aplab::report::{record_line, CSV_HEADER};

fn main() -> aplab::Result<()> {
    let mut table = PrimeTable::new();

    println!("Selected P(k) records ({CSV_HEADER}):");
    for k in [4, 5, 6, 44, 461, 1945, 23636] {
        let r = p_max(&mut table, k)?;
        print!("  {}", record_line(&r));
    }

    // k = 461 in detail: the modulus is prime, so every class except 0 must
    // be filled; 3956 usable primes are consumed before the last one.
    let r = p_max(&mut table, 461)?;
    println!("\nModulus 461 (prime modulus, {} classes):", r.phi);
    println!("  last class filled by p = {} ≡ {} (mod 461)", r.p_max, r.residue);
    println!("  usable primes consumed: {}", r.primes_consumed);
    println!("  P/(φ·ln φ·ln k) = {:.5}", r.ratio);

    // A famously delicate modulus: the published record here once missed a
    // prime. The class walk pins it down.
    let k = 636_184;
    let r = p_max(&mut table, k)?;
    let fac = factorize_growing(&mut table, k)?;
    println!("\nModulus {k} = {fac}:");
    println!("  P({k}) = {} with residue {}", r.p_max, r.residue);
    let missed = least_prime_in_ap_growing(&mut table, k, 629_991)?;
    println!(
        "  the class 629991 is already served by {} — an easy prime to miss",
        missed
    );
    Ok(())
}
