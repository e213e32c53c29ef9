//! A workbench for the extremal statistics of least primes in arithmetic
//! progressions.
//!
//! For a modulus `k`, write `p(k, ℓ)` for the least prime `≡ ℓ (mod k)` and
//! `P(k) = max p(k, ℓ)` over the reduced residues `ℓ`. This crate measures
//! `P(k)` at scale and hosts the constructions that bound it from below:
//!
//! * [`primes`] / [`factor`] — a growable segmented sieve with a binary cache
//!   format, and trial-division factorization on top of it.
//! * [`least_prime`] / [`scan`] — the class-coverage scan computing `P(k)`,
//!   its normalized ratio statistics, and a deterministic, checkpointed,
//!   parallel range scanner emitting CSV.
//! * [`jacobsthal`] — maximal gaps between consecutive integers coprime to a
//!   squarefree modulus, plus the classical lower-bound reduction that turns
//!   such gaps into least-prime bounds.
//! * [`covering`] — a four-stage residue-class covering construction over an
//!   interval `(x, y]`, certified by exhaustive verification and a CRT
//!   witness.
//! * [`coupon`] / [`gumbel`] — a constrained coupon-collector model of the
//!   class-coverage process: exact product probabilities, exhaustive
//!   enumeration, Monte Carlo estimation, Bonferroni bounds, and
//!   double-exponential tail fitting.
//! * [`report`] — extremal tables, band statistics, histograms, and the CSV
//!   conventions shared by the command-line front end in [`cli`].
//!
//! The `examples/` directory exercises each capability end to end; the thin
//! `aplab` binary exposes the same operations as subcommands.

pub mod cli;
pub mod coupon;
pub mod covering;
pub mod error;
pub mod factor;
pub mod gumbel;
pub mod jacobsthal;
pub mod least_prime;
pub mod primes;
pub mod report;
mod rng;
pub mod scan;

pub use error::{Error, Result};
