//! Parallel scans of `P(k)` over a modulus range, with restartable output.
//!
//! The scanner computes records for `k = kmin..=kmax` in fixed-size chunks.
//! Each chunk is evaluated in parallel, appended to the output CSV in one
//! write, and then (optionally) acknowledged in a small checkpoint file. A
//! later run with the same paths resumes after the last acknowledged modulus,
//! first dropping any rows beyond it that a dying run may have left behind.
//!
//! Output is deterministic: records are collected in index order and every
//! per-record computation is independent of thread count, so the final CSV is
//! byte-identical whether produced in one run or several, on one thread or
//! many.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::least_prime::{p_max_in, suggested_limit, PkRecord};
use crate::primes::{Fnv1a, PrimeTable};
use crate::report::{record_line, CSV_HEADER};

/// Range and execution parameters for [`scan_range`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    /// First modulus, at least 3.
    pub kmin: u64,
    /// Last modulus, inclusive.
    pub kmax: u64,
    /// Worker threads; 0 uses the global thread pool.
    pub threads: usize,
    /// Moduli per chunk; one checkpoint is written per completed chunk.
    pub chunk: u64,
}

impl ScanConfig {
    pub fn new(kmin: u64, kmax: u64) -> ScanConfig {
        ScanConfig {
            kmin,
            kmax,
            threads: 0,
            chunk: 1024,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.kmin < 3 {
            return Err(Error::InvalidConfig(format!(
                "kmin must be ≥ 3 (got {})",
                self.kmin
            )));
        }
        if self.kmax < self.kmin {
            return Err(Error::InvalidConfig(format!(
                "kmax {} is below kmin {}",
                self.kmax, self.kmin
            )));
        }
        if self.chunk == 0 {
            return Err(Error::InvalidConfig("chunk size must be positive".into()));
        }
        Ok(())
    }
}

/// What a [`scan_range`] call did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanOutcome {
    /// Rows computed and written by this call.
    pub new_rows: u64,
    /// Checkpointed modulus this call resumed after, if any.
    pub resumed_from: Option<u64>,
    /// Data rows now in the output file.
    pub rows_total: u64,
}

fn checksum_line(k_line: &str) -> String {
    let mut f = Fnv1a::new();
    f.update(k_line.as_bytes());
    format!("fnv64:{:016x}", f.finish())
}

/// Atomically record `k` as the last fully written modulus.
pub fn write_checkpoint(path: &Path, k: u64) -> Result<()> {
    let k_line = k.to_string();
    let body = format!("{k_line}\n{}\n", checksum_line(&k_line));
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Read a checkpoint; `Ok(None)` when the file does not exist.
pub fn read_checkpoint(path: &Path) -> Result<Option<u64>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut lines = text.lines();
    let (Some(k_line), Some(sum_line)) = (lines.next(), lines.next()) else {
        return Err(Error::CorruptCheckpoint(format!(
            "{}: expected a modulus line and a checksum line",
            path.display()
        )));
    };
    let k: u64 = k_line.trim().parse().map_err(|_| {
        Error::CorruptCheckpoint(format!(
            "{}: modulus line is not an integer: {k_line:?}",
            path.display()
        ))
    })?;
    if sum_line.trim() != checksum_line(k_line.trim()) {
        return Err(Error::CorruptCheckpoint(format!(
            "{}: checksum mismatch",
            path.display()
        )));
    }
    Ok(Some(k))
}

/// Rewrite the CSV keeping the header and rows with `k ≤ last_k`; returns the
/// number of rows kept. Rows past the checkpoint are partial-run debris.
fn trim_csv_to(path: &Path, last_k: u64) -> Result<u64> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MalformedCsv(format!(
                "{} is missing but a checkpoint exists; delete the checkpoint to start over",
                path.display()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::MalformedCsv(format!(
                "{}: bad header {other:?}",
                path.display()
            )))
        }
    }
    let mut out = String::with_capacity(text.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    let mut kept = 0u64;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let first = line.split(',').next().unwrap_or("");
        let k: u64 = first.parse().map_err(|_| {
            Error::MalformedCsv(format!(
                "{}: non-numeric modulus field {first:?}",
                path.display()
            ))
        })?;
        if k > last_k {
            break;
        }
        out.push_str(line);
        out.push('\n');
        kept += 1;
    }
    fs::write(path, &out)?;
    Ok(kept)
}

/// Evaluate one chunk of moduli in parallel, growing the shared table as
/// needed. Records come back in the order of `ks`.
fn compute_chunk(lock: &RwLock<PrimeTable>, ks: &[u64]) -> Result<Vec<PkRecord>> {
    loop {
        let mut needed = 0u64;
        {
            let t = lock.read().expect("prime table lock poisoned");
            let results: Vec<Result<PkRecord>> =
                ks.par_iter().map(|&k| p_max_in(&t, k)).collect();
            let mut out = Vec::with_capacity(ks.len());
            for r in results {
                match r {
                    Ok(rec) => out.push(rec),
                    Err(Error::ScanExhausted { scanned_to, .. }) => {
                        needed = needed.max(scanned_to + 1)
                    }
                    Err(Error::TableTooSmall { needed: n, .. }) => needed = needed.max(n),
                    Err(e) => return Err(e),
                }
            }
            if needed == 0 {
                return Ok(out);
            }
        }
        let mut t = lock.write().expect("prime table lock poisoned");
        if t.limit() < needed {
            t.grow_for(needed)?;
        }
    }
}

/// Scan `cfg.kmin..=cfg.kmax`, writing records to `out` and progress to
/// `checkpoint` after each chunk.
///
/// An existing checkpoint resumes the scan after its modulus; the caller must
/// then pass the same `out` path and the same `kmin` as the original run.
/// The table is grown in place and handed back enlarged, so a warm table can
/// be reused or cached across calls.
pub fn scan_range(
    table: &mut PrimeTable,
    cfg: &ScanConfig,
    out: &Path,
    checkpoint: Option<&Path>,
) -> Result<ScanOutcome> {
    cfg.validate()?;
    let resume = match checkpoint {
        Some(p) => read_checkpoint(p)?,
        None => None,
    };
    let (mut file, start_k, resumed_from, kept_rows) = match resume {
        Some(ck) => {
            let kept = trim_csv_to(out, ck)?;
            let f = OpenOptions::new().append(true).open(out)?;
            (f, (ck + 1).max(cfg.kmin), Some(ck), kept)
        }
        None => {
            let mut f = File::create(out)?;
            f.write_all(CSV_HEADER.as_bytes())?;
            f.write_all(b"\n")?;
            (f, cfg.kmin, None, 0)
        }
    };
    if start_k > cfg.kmax {
        return Ok(ScanOutcome {
            new_rows: 0,
            resumed_from,
            rows_total: kept_rows,
        });
    }

    let pool = if cfg.threads > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let owned = std::mem::replace(table, PrimeTable::new());
    let lock = RwLock::new(owned);
    let result = (|| -> Result<u64> {
        // Pre-size the sieve near the typical largest value in the range so
        // most chunks run without growth pauses.
        lock.write()
            .expect("prime table lock poisoned")
            .grow_for(suggested_limit(cfg.kmax, cfg.kmax / 2))?;
        let mut new_rows = 0u64;
        let mut k = start_k;
        while k <= cfg.kmax {
            let hi = (k + cfg.chunk - 1).min(cfg.kmax);
            let ks: Vec<u64> = (k..=hi).collect();
            let records = match &pool {
                Some(p) => p.install(|| compute_chunk(&lock, &ks)),
                None => compute_chunk(&lock, &ks),
            }?;
            let mut buf = String::with_capacity(records.len() * 48);
            for r in &records {
                buf.push_str(&record_line(r));
            }
            file.write_all(buf.as_bytes())?;
            new_rows += records.len() as u64;
            if let Some(p) = checkpoint {
                write_checkpoint(p, hi)?;
            }
            k = hi + 1;
        }
        Ok(new_rows)
    })();
    *table = lock.into_inner().expect("prime table lock poisoned");
    let new_rows = result?;
    Ok(ScanOutcome {
        new_rows,
        resumed_from,
        rows_total: kept_rows + new_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::read_records;

    fn scan_to_file(cfg: &ScanConfig, dir: &Path, name: &str, ck: bool) -> (Vec<u8>, ScanOutcome) {
        let out = dir.join(name);
        let ckpt = dir.join(format!("{name}.ckpt"));
        let mut table = PrimeTable::new();
        let outcome =
            scan_range(&mut table, cfg, &out, ck.then_some(ckpt.as_path())).unwrap();
        (fs::read(&out).unwrap(), outcome)
    }

    #[test]
    fn fresh_scan_has_header_and_expected_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ScanConfig {
            chunk: 64,
            ..ScanConfig::new(3, 300)
        };
        let (bytes, outcome) = scan_to_file(&cfg, dir.path(), "a.csv", false);
        assert_eq!(outcome.new_rows, 298);
        assert_eq!(outcome.resumed_from, None);
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert!(lines.next().unwrap().starts_with("3,7,1,"));
        let row44 = text
            .lines()
            .find(|l| l.starts_with("44,"))
            .expect("row for modulus 44");
        assert!(
            row44.starts_with("44,113,25,28,20,0.498394,"),
            "unexpected row: {row44}"
        );
        let records = read_records(&dir.path().join("a.csv")).unwrap();
        assert_eq!(records.len(), 298);
        for r in &records {
            assert_eq!(r.residue, r.p_max % r.k);
            assert!(r.primes_consumed >= r.phi);
        }
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let base = ScanConfig {
            chunk: 128,
            ..ScanConfig::new(3, 500)
        };
        let one = scan_to_file(&ScanConfig { threads: 1, ..base }, dir.path(), "t1.csv", false);
        let four = scan_to_file(&ScanConfig { threads: 4, ..base }, dir.path(), "t4.csv", false);
        assert_eq!(one.0, four.0);
    }

    #[test]
    fn resumed_scan_reproduces_uninterrupted_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let ckpt = dir.path().join("run.ckpt");

        // First leg stops early, as an interrupted long scan would.
        let mut table = PrimeTable::new();
        let leg1 = ScanConfig {
            chunk: 256,
            ..ScanConfig::new(3, 1200)
        };
        let o1 = scan_range(&mut table, &leg1, &out, Some(&ckpt)).unwrap();
        assert_eq!(o1.new_rows, 1198);
        assert_eq!(read_checkpoint(&ckpt).unwrap(), Some(1200));

        // Second leg extends the range, resuming from the checkpoint.
        let leg2 = ScanConfig {
            chunk: 256,
            ..ScanConfig::new(3, 2500)
        };
        let o2 = scan_range(&mut table, &leg2, &out, Some(&ckpt)).unwrap();
        assert_eq!(o2.resumed_from, Some(1200));
        assert_eq!(o2.new_rows, 1300);
        assert_eq!(o2.rows_total, 2498);
        assert_eq!(read_checkpoint(&ckpt).unwrap(), Some(2500));

        // The stitched file must match a single uninterrupted run exactly.
        let (fresh, _) = scan_to_file(&leg2, dir.path(), "fresh.csv", false);
        assert_eq!(fs::read(&out).unwrap(), fresh);

        // Scanning again with nothing left to do writes nothing new.
        let o3 = scan_range(&mut table, &leg2, &out, Some(&ckpt)).unwrap();
        assert_eq!(o3.new_rows, 0);
        assert_eq!(o3.rows_total, 2498);
    }

    #[test]
    fn rows_beyond_the_checkpoint_are_discarded_on_resume() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let ckpt = dir.path().join("run.ckpt");
        let mut table = PrimeTable::new();
        let leg1 = ScanConfig {
            chunk: 100,
            ..ScanConfig::new(3, 600)
        };
        scan_range(&mut table, &leg1, &out, Some(&ckpt)).unwrap();

        // Simulate a run that died after writing rows but before the
        // checkpoint: leave a bogus unacknowledged row behind.
        let mut f = OpenOptions::new().append(true).open(&out).unwrap();
        f.write_all(b"601,999,1,1,1,9.99999,9.99999\n").unwrap();
        drop(f);

        let leg2 = ScanConfig {
            chunk: 100,
            ..ScanConfig::new(3, 800)
        };
        scan_range(&mut table, &leg2, &out, Some(&ckpt)).unwrap();
        let (fresh, _) = scan_to_file(&leg2, dir.path(), "fresh.csv", false);
        assert_eq!(fs::read(&out).unwrap(), fresh);
    }

    #[test]
    fn checkpoint_corruption_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let ckpt = dir.path().join("c.ckpt");
        write_checkpoint(&ckpt, 4096).unwrap();
        assert_eq!(read_checkpoint(&ckpt).unwrap(), Some(4096));

        let text = fs::read_to_string(&ckpt).unwrap();
        fs::write(&ckpt, text.replace("fnv64:", "fnv64:0")).unwrap();
        assert!(matches!(
            read_checkpoint(&ckpt),
            Err(Error::CorruptCheckpoint(_))
        ));

        fs::write(&ckpt, "12345\n").unwrap();
        assert!(matches!(
            read_checkpoint(&ckpt),
            Err(Error::CorruptCheckpoint(_))
        ));

        assert_eq!(read_checkpoint(&dir.path().join("absent")).unwrap(), None);
    }

    #[test]
    fn missing_csv_with_checkpoint_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("gone.csv");
        let ckpt = dir.path().join("c.ckpt");
        write_checkpoint(&ckpt, 100).unwrap();
        let mut table = PrimeTable::new();
        let cfg = ScanConfig::new(3, 200);
        assert!(matches!(
            scan_range(&mut table, &cfg, &out, Some(&ckpt)),
            Err(Error::MalformedCsv(_))
        ));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let mut table = PrimeTable::new();
        for cfg in [
            ScanConfig::new(2, 10),
            ScanConfig::new(50, 10),
            ScanConfig {
                chunk: 0,
                ..ScanConfig::new(3, 10)
            },
        ] {
            assert!(matches!(
                scan_range(&mut table, &cfg, &out, None),
                Err(Error::InvalidConfig(_))
            ));
        }
    }
}
