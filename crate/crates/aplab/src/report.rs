//! Result tables: CSV serialization, significant-digit formatting, extremal
//! tables, band tallies, and histograms.
//!
//! The on-disk format is a plain CSV with a fixed header. Floating-point
//! columns are printed to six significant digits in positional notation, so
//! files are stable across runs and platforms and diff cleanly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::least_prime::PkRecord;

/// Exact header line of result CSVs (without trailing newline).
pub const CSV_HEADER: &str = "k,p_max,residue,primes_consumed,phi,ratio,r_stat";

/// Render `v` with six significant digits in positional notation.
///
/// Examples: `2.60171`, `0.498394`, `113.000`, `1234570`, `-0.0243562`.
/// Rounding is the standard library's round-half-to-even decimal conversion.
pub fn format_sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.5e}", v);
    let (mant, exp) = sci
        .split_once('e')
        .expect("{:.5e} always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is a small integer");
    let neg = mant.starts_with('-');
    let digits: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), 6);
    let mut out = String::with_capacity(12);
    if neg {
        out.push('-');
    }
    if exp >= 5 {
        out.push_str(std::str::from_utf8(&digits).unwrap());
        for _ in 0..(exp - 5) {
            out.push('0');
        }
    } else if exp >= 0 {
        let point = (exp + 1) as usize;
        out.push_str(std::str::from_utf8(&digits[..point]).unwrap());
        out.push('.');
        out.push_str(std::str::from_utf8(&digits[point..]).unwrap());
    } else {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(std::str::from_utf8(&digits).unwrap());
    }
    out
}

/// One CSV data line for a record, newline-terminated.
pub fn record_line(r: &PkRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        r.k,
        r.p_max,
        r.residue,
        r.primes_consumed,
        r.phi,
        format_sig6(r.ratio),
        format_sig6(r.r_stat)
    )
}

fn bad(line_no: usize, what: impl std::fmt::Display) -> Error {
    Error::MalformedCsv(format!("line {line_no}: {what}"))
}

/// Parse one data line (no trailing newline).
pub fn parse_line(line: &str, line_no: usize) -> Result<PkRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 7 {
        return Err(bad(line_no, format!("expected 7 fields, got {}", fields.len())));
    }
    let int = |i: usize| -> Result<u64> {
        fields[i]
            .parse()
            .map_err(|_| bad(line_no, format!("field {} is not an integer: {:?}", i + 1, fields[i])))
    };
    let float = |i: usize| -> Result<f64> {
        fields[i]
            .parse()
            .map_err(|_| bad(line_no, format!("field {} is not a number: {:?}", i + 1, fields[i])))
    };
    Ok(PkRecord {
        k: int(0)?,
        p_max: int(1)?,
        residue: int(2)?,
        primes_consumed: int(3)?,
        phi: int(4)?,
        ratio: float(5)?,
        r_stat: float(6)?,
    })
}

/// Read a result CSV back into records, validating the header exactly.
pub fn read_records(path: &Path) -> Result<Vec<PkRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        Some((_, h)) => {
            return Err(Error::MalformedCsv(format!(
                "bad header {h:?}; expected {CSV_HEADER:?}"
            )))
        }
        None => return Err(Error::MalformedCsv("empty file".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        out.push(parse_line(line, i + 1)?);
    }
    Ok(out)
}

/// Thresholds for the extremal tables and the three-way band tally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableFilter {
    /// Rows with `ratio > hi` make the high-side table.
    pub hi: f64,
    /// Rows with `ratio < lo` make the low-side table.
    pub lo: f64,
    /// Inclusive interval counted as the central band.
    pub band: (f64, f64),
    /// Smallest modulus admitted to the tables and tallies. The published
    /// convention starts at 4: the k = 3 row, whose tiny logarithms inflate
    /// the normalized ratio past every other modulus, is left out.
    pub min_k: u64,
}

impl Default for TableFilter {
    fn default() -> Self {
        TableFilter {
            hi: 1.95,
            lo: 0.5,
            band: (1.05, 1.95),
            min_k: 4,
        }
    }
}

/// The two extremal tables, rows in increasing `k`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalTables {
    pub high: Vec<PkRecord>,
    pub low: Vec<PkRecord>,
}

/// Split off the rows with unusually large or small normalized ratio.
pub fn extremal_tables(records: &[PkRecord], filter: &TableFilter) -> ExtremalTables {
    let admitted = || records.iter().filter(|r| r.k >= filter.min_k);
    let mut high: Vec<PkRecord> = admitted().filter(|r| r.ratio > filter.hi).cloned().collect();
    let mut low: Vec<PkRecord> = admitted().filter(|r| r.ratio < filter.lo).cloned().collect();
    high.sort_by_key(|r| r.k);
    low.sort_by_key(|r| r.k);
    ExtremalTables { high, low }
}

/// How many rows fall above `hi`, inside `band` (inclusive), and below `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandCounts {
    pub above_hi: u64,
    pub in_band: u64,
    pub below_lo: u64,
    pub total: u64,
}

pub fn band_counts(records: &[PkRecord], filter: &TableFilter) -> BandCounts {
    let (b_lo, b_hi) = filter.band;
    let mut c = BandCounts {
        above_hi: 0,
        in_band: 0,
        below_lo: 0,
        total: 0,
    };
    for r in records.iter().filter(|r| r.k >= filter.min_k) {
        c.total += 1;
        if r.ratio > filter.hi {
            c.above_hi += 1;
        }
        if r.ratio >= b_lo && r.ratio <= b_hi {
            c.in_band += 1;
        }
        if r.ratio < filter.lo {
            c.below_lo += 1;
        }
    }
    c
}

/// Fixed-width histogram with bin `i` covering `[i·width, (i+1)·width)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub width: f64,
    /// Bin index → count; indices may be negative.
    pub bins: BTreeMap<i64, u64>,
    pub total: u64,
}

impl Histogram {
    /// Plain-text rendering, one `lo ≤ v < hi: count` line per occupied bin.
    pub fn render(&self) -> String {
        let max = self.bins.values().copied().max().unwrap_or(0).max(1);
        let mut out = String::new();
        for (&idx, &count) in &self.bins {
            let lo = idx as f64 * self.width;
            let hi = (idx + 1) as f64 * self.width;
            let bar = "#".repeat(((count * 60).div_ceil(max)) as usize);
            out.push_str(&format!(
                "[{:>10}, {:>10})  {:>8}  {}\n",
                format_sig6(lo),
                format_sig6(hi),
                count,
                bar
            ));
        }
        out
    }
}

/// Bin values by `floor(v / width)`.
pub fn histogram(values: &[f64], width: f64) -> Result<Histogram> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::Domain(format!("bin width must be positive (got {width})")));
    }
    let mut bins = BTreeMap::new();
    for &v in values {
        if !v.is_finite() {
            return Err(Error::Domain(format!("cannot bin non-finite value {v}")));
        }
        let idx = (v / width).floor() as i64;
        *bins.entry(idx).or_insert(0u64) += 1;
    }
    Ok(Histogram {
        width,
        total: values.len() as u64,
        bins,
    })
}
