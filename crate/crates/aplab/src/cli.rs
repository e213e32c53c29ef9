//! Command-line surface: one thin dispatcher over the library modules.
//!
//! Structured single results are emitted as JSON, bulk data as CSV, and every
//! failure as a single machine-readable `{"error": …}` line on standard error
//! with a nonzero exit status. Outputs are byte-identical across reruns with
//! identical flags and seeds.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::json;

use crate::covering::{self, CoverConfig, Stage3Mode};
use crate::coupon;
use crate::error::{Error, Result};
use crate::gumbel;
use crate::jacobsthal;
use crate::least_prime;
use crate::primes::PrimeTable;
use crate::report;
use crate::scan::{self, ScanConfig};

#[derive(Parser)]
#[command(
    name = "aplab",
    version,
    about = "Number-theory laboratory: least primes in progressions, Jacobsthal gaps, \
             residue-class coverings, and the coupon-collector model"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads / parallel streams (0 = module default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Checkpoint file for interruptible runs.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,

    /// Output path; `-` or omitted writes to standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute P(k) and print its CSV record (no header).
    Pk {
        #[arg(long)]
        k: u64,
    },
    /// Scan a modulus range into the CSV schema, checkpointing per chunk.
    Scan {
        #[arg(long)]
        kmin: u64,
        #[arg(long)]
        kmax: u64,
        /// Moduli per work chunk (one checkpoint per chunk).
        #[arg(long, default_value_t = 1024)]
        chunk: u64,
    },
    /// Jacobsthal function: one squarefree m, or the first n primorials.
    #[command(group(ArgGroup::new("target").required(true).args(["m", "primorials"])))]
    Jacobsthal {
        /// Squarefree modulus to scan.
        #[arg(long)]
        m: Option<u64>,
        /// Tabulate primorials 1# through n#.
        #[arg(long)]
        primorials: Option<u32>,
    },
    /// Build and certify a four-stage residue-class cover of (x, y].
    Cover {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        t1: u64,
        #[arg(long)]
        z: u64,
        #[arg(long, value_enum, default_value_t = Stage3Arg::Greedy)]
        stage3: Stage3Arg,
    },
    /// Monte Carlo estimate of P(some residue class stays empty).
    Simulate {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: u64,
    },
    /// Exact enumeration oracle for a tiny coupon-model instance.
    Enumerate {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: usize,
    },
    /// Fit the double-exponential law to a scan CSV's r_stat column.
    FitGumbel {
        /// Scan CSV to read.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Extremal-ratio tables and band counts from a scan CSV.
    Tables {
        #[arg(long = "in")]
        input: PathBuf,
        /// High-table threshold (ratio strictly above).
        #[arg(long, default_value_t = 1.95)]
        hi: f64,
        /// Low-table threshold (ratio strictly below).
        #[arg(long, default_value_t = 0.5)]
        lo: f64,
        /// Central band, inclusive on both ends.
        #[arg(long, num_args = 2, value_names = ["LOW", "HIGH"],
              default_values_t = [1.05, 1.95])]
        band: Vec<f64>,
        /// Smallest modulus admitted (the published tables start at 4).
        #[arg(long, default_value_t = 4)]
        min_k: u64,
    },
    /// Histogram of a scan CSV column, as plotter-friendly CSV.
    Hist {
        #[arg(long = "in")]
        input: PathBuf,
        /// Bin width.
        #[arg(long)]
        width: f64,
        #[arg(long, value_enum, default_value_t = ColumnArg::Ratio)]
        column: ColumnArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Stage3Arg {
    Greedy,
    Zero,
}

impl From<Stage3Arg> for Stage3Mode {
    fn from(a: Stage3Arg) -> Self {
        match a {
            Stage3Arg::Greedy => Stage3Mode::Greedy,
            Stage3Arg::Zero => Stage3Mode::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ColumnArg {
    Ratio,
    RStat,
}

/// Parse the process arguments, dispatch, and return the exit status.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            1
        }
    }
}

fn writes_to_stdout(out: &Option<PathBuf>) -> bool {
    match out {
        None => true,
        Some(p) => p.as_os_str() == "-",
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    if writes_to_stdout(out) {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(content.as_bytes())?;
        if !content.ends_with('\n') {
            lock.write_all(b"\n")?;
        }
        Ok(())
    } else {
        std::fs::write(out.as_ref().unwrap(), content)?;
        Ok(())
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Pk { k } => {
            let mut table = PrimeTable::new();
            let record = least_prime::p_max(&mut table, *k)?;
            emit(&cli.out, &report::record_line(&record))
        }
        Command::Scan { kmin, kmax, chunk } => {
            let cfg = ScanConfig {
                kmin: *kmin,
                kmax: *kmax,
                threads: cli.threads,
                chunk: *chunk,
            };
            let mut table = PrimeTable::new();
            if writes_to_stdout(&cli.out) {
                if cli.checkpoint.is_some() {
                    return Err(Error::InvalidConfig(
                        "checkpointing requires a file output; pass --out <path>".into(),
                    ));
                }
                let tmp = std::env::temp_dir()
                    .join(format!("aplab-scan-{}-{kmin}-{kmax}.csv", std::process::id()));
                let produced = scan::scan_range(&mut table, &cfg, &tmp, None);
                let content = produced.and_then(|_| Ok(std::fs::read_to_string(&tmp)?));
                let _ = std::fs::remove_file(&tmp);
                emit(&cli.out, &content?)
            } else {
                let out = cli.out.as_ref().unwrap();
                scan::scan_range(&mut table, &cfg, out, cli.checkpoint.as_deref())?;
                Ok(())
            }
        }
        Command::Jacobsthal { m, primorials } => {
            let mut table = PrimeTable::new();
            let mut csv = String::from("m,g,witness_start\n");
            match (m, primorials) {
                (Some(m), None) => {
                    let r = jacobsthal::jacobsthal_g(&mut table, *m)?;
                    writeln!(csv, "{},{},{}", r.m, r.g, r.witness_start).unwrap();
                }
                (None, Some(n)) => {
                    for row in jacobsthal::iwaniec_table(&mut table, *n)? {
                        writeln!(csv, "{},{},{}", row.m, row.g, row.witness_start).unwrap();
                    }
                }
                _ => unreachable!("clap group enforces exactly one"),
            }
            emit(&cli.out, &csv)
        }
        Command::Cover { k, x, y, t1, z, stage3 } => {
            let cfg = CoverConfig {
                k: *k,
                x: *x,
                y: *y,
                t1: *t1,
                z: *z,
                seed: cli.seed,
                stage3_mode: (*stage3).into(),
            };
            let mut table = PrimeTable::new();
            let r = covering::build_cover(&mut table, &cfg)?;
            let doc = json!({
                "config": cfg,
                "uncovered_after": r.uncovered_after,
                "residual": {
                    "zs": r.residual.zs.len(),
                    "zr": r.residual.zr.len(),
                    "mq": r.residual.mq.len(),
                    "other": r.residual.other.len(),
                    "sigma": r.residual.sigma,
                    "m_small": r.residual.m_small,
                    "kappa": r.residual.kappa,
                },
                "assigned_primes": r.assignment.len(),
                "t": r.t.to_str_radix(10),
                "modulus": r.modulus.to_str_radix(10),
                "verified": r.verified,
                "gap_certified": r.gap_certified,
                "stage4_deficit": r.stage4_deficit
                    .map(|(needed, available)| json!({ "needed": needed, "available": available })),
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())
        }
        Command::Simulate { k, m, trials } => {
            let workers = if cli.threads == 0 { 1 } else { cli.threads as u64 };
            let mut table = PrimeTable::new();
            let mc = coupon::monte_carlo_a(&mut table, *k, *m, *trials, cli.seed, workers)?;
            let doc = json!({
                "k": k,
                "m": m,
                "seed": cli.seed,
                "trials": mc.trials,
                "workers": mc.workers,
                "estimate": mc.estimate,
                "std_error": mc.std_error,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())
        }
        Command::Enumerate { k, m } => {
            let mut table = PrimeTable::new();
            let probs = coupon::event_prob_enumerate(&mut table, *k, *m)?;
            let exact = coupon::empty_prob_exact(&mut table, *k, *m)?;
            let bounds = coupon::bonferroni_bounds(&mut table, *k, *m)?;
            let negcorr = coupon::negative_correlation_check(&mut table, *k, *m)?;
            let doc = json!({
                "k": k,
                "m": m,
                "phi": probs.phi,
                "omega_size": probs.omega_size.to_string(),
                "p_a": {
                    "exact": probs.p_a.to_string(),
                    "value": probs.p_a.to_f64(),
                },
                "p_all_covered": {
                    "exact": probs.p_all_covered.to_string(),
                    "value": probs.p_all_covered.to_f64(),
                },
                "p_empty_by_class": probs.p_empty_by_class.iter()
                    .map(|p| p.to_f64().unwrap_or(f64::NAN))
                    .collect::<Vec<_>>(),
                "p_single": {
                    "exact": exact.p_single.to_string(),
                    "value": exact.p_single_f64(),
                },
                "p_pair": {
                    "exact": exact.p_pair.to_string(),
                    "value": exact.p_pair_f64(),
                },
                "bonferroni": {
                    "upper": bounds.upper.to_f64(),
                    "lower": bounds.lower.to_f64(),
                },
                "negatively_correlated": negcorr,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())
        }
        Command::FitGumbel { input } => {
            let records = report::read_records(input)?;
            let values: Vec<f64> = records.iter().map(|r| r.r_stat).collect();
            let fit = gumbel::gumbel_fit(&values)?;
            let doc = json!({
                "n": fit.n,
                "b": fit.b,
                "c": fit.c,
                "rms_residual": fit.rms_residual,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())
        }
        Command::Tables { input, hi, lo, band, min_k } => {
            let filter = report::TableFilter {
                hi: *hi,
                lo: *lo,
                band: (band[0], band[1]),
                min_k: *min_k,
            };
            let records = report::read_records(input)?;
            let tables = report::extremal_tables(&records, &filter);
            let bands = report::band_counts(&records, &filter);
            let mut outp = String::new();
            writeln!(outp, "# high: ratio > {}", report::format_sig6(filter.hi)).unwrap();
            writeln!(outp, "{}", report::CSV_HEADER).unwrap();
            for r in &tables.high {
                outp.push_str(&report::record_line(r));
            }
            writeln!(outp, "# low: ratio < {}", report::format_sig6(filter.lo)).unwrap();
            writeln!(outp, "{}", report::CSV_HEADER).unwrap();
            for r in &tables.low {
                outp.push_str(&report::record_line(r));
            }
            writeln!(outp, "# bands").unwrap();
            writeln!(outp, "above_hi,in_band,below_lo,total").unwrap();
            writeln!(
                outp,
                "{},{},{},{}",
                bands.above_hi, bands.in_band, bands.below_lo, bands.total
            )
            .unwrap();
            if bands.total > 0 {
                let prop = |c: u64| report::format_sig6(c as f64 / bands.total as f64);
                writeln!(
                    outp,
                    "{},{},{},{}",
                    prop(bands.above_hi),
                    prop(bands.in_band),
                    prop(bands.below_lo),
                    report::format_sig6(1.0)
                )
                .unwrap();
            }
            emit(&cli.out, &outp)
        }
        Command::Hist { input, width, column } => {
            let records = report::read_records(input)?;
            let values: Vec<f64> = records
                .iter()
                .map(|r| match column {
                    ColumnArg::Ratio => r.ratio,
                    ColumnArg::RStat => r.r_stat,
                })
                .collect();
            let h = report::histogram(&values, *width)?;
            let mut csv = String::from("bin,low_edge,count\n");
            for (&bin, &count) in &h.bins {
                writeln!(
                    csv,
                    "{},{},{}",
                    bin,
                    report::format_sig6(bin as f64 * h.width),
                    count
                )
                .unwrap();
            }
            emit(&cli.out, &csv)
        }
    }
}
