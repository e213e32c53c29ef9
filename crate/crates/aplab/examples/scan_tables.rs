//! Range scan plus the extremal-ratio tables it feeds.
//!
//! Scans every modulus k ≤ 3246, writes the CSV, and reproduces the
//! high-ratio table (ratio > 1.95), the low-ratio table (ratio < 0.5), and
//! the band tally. Run with:
//!
//! ```text
//! cargo run --release -p aplab --example scan_tables
//! ```

use aplab::primes::PrimeTable;
use aplab::report::{band_counts, extremal_tables, read_records, record_line, TableFilter};
use aplab::scan::{scan_range, ScanConfig};

fn main() -> aplab::Result<()> {
    let out = std::env::temp_dir().join("aplab-example-scan.csv");
    let cfg = ScanConfig::new(3, 3246);
    let mut table = PrimeTable::new();
    let outcome = scan_range(&mut table, &cfg, &out, None)?;
    println!(
        "scanned {} moduli into {} (threads: rayon default, chunk {})",
        outcome.rows_total,
        out.display(),
        cfg.chunk
    );

    let records = read_records(&out)?;
    let filter = TableFilter::default();
    let tables = extremal_tables(&records, &filter);

    println!("\nratio > {} (the record-setters):", filter.hi);
    for r in &tables.high {
        print!("  {}", record_line(r));
    }
    println!("ratio < {} (the laggards):", filter.lo);
    for r in &tables.low {
        print!("  {}", record_line(r));
    }

    let bands = band_counts(&records, &filter);
    println!(
        "\nband tally over k ∈ [{}, 3246]: {} above {}, {} in [{}, {}], {} below {}, {} total",
        filter.min_k,
        bands.above_hi,
        filter.hi,
        bands.in_band,
        filter.band.0,
        filter.band.1,
        bands.below_lo,
        filter.lo,
        bands.total
    );

    let _ = std::fs::remove_file(&out);
    Ok(())
}
