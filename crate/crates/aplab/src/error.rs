//! Error type shared by every module in the crate.
//!
//! The variants are deliberately specific: callers retry on
//! [`Error::TableTooSmall`] / [`Error::ScanExhausted`] by growing the prime
//! table, while capacity and domain failures are terminal and must surface to
//! the user unchanged. Nothing in this crate truncates silently.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A point query beyond the sieved limit. The table never guesses.
    #[error("{n} is beyond the sieved limit {limit}")]
    OutOfRange { n: u64, limit: u64 },

    /// Growing the table past its configured hard cap was refused.
    #[error("requested sieve limit {requested} exceeds the configured cap {cap}")]
    CapacityExceeded { requested: u64, cap: u64 },

    /// An operation needs primes the table does not hold yet. Callers with a
    /// mutable table grow it and retry; callers without one report this.
    #[error("prime table ends at {limit} but primes up to {needed} are required")]
    TableTooSmall { needed: u64, limit: u64 },

    /// A least-prime class scan ran off the end of the table before every
    /// residue class was hit. Retry signal, not a verdict.
    #[error("class scan for modulus {k} exhausted the sieve at {scanned_to}")]
    ScanExhausted { k: u64, scanned_to: u64 },

    /// Input outside the documented domain of an operation.
    #[error("invalid input: {0}")]
    Domain(String),

    /// The Jacobsthal function is only computed for squarefree moduli.
    #[error("{m} is not squarefree")]
    NotSquarefree { m: u64 },

    /// A prime product overflowed 64 bits; the partial product is reported so
    /// the caller can see how far the accumulation got.
    #[error("prime product exceeds 64 bits (partial product {partial})")]
    ProductOverflow { partial: u64 },

    /// A covering configuration violates its ordering constraints.
    #[error("invalid covering configuration: {0}")]
    InvalidConfig(String),

    /// The injective matching stage ran out of primes.
    #[error("matching stage needs {needed} primes but only {available} remain in its window")]
    Stage4Deficit { needed: usize, available: usize },

    /// A constrained tuple space has no elements, so sampling or exact
    /// probabilities over it are undefined.
    #[error("sample space is empty: {0}")]
    EmptySpace(String),

    /// Exhaustive enumeration would visit more tuples than the configured cap.
    #[error("enumeration would visit {size} tuples (cap {cap})")]
    EnumerationTooLarge { size: u128, cap: u64 },

    /// Curve fitting was asked to explain degenerate data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A persisted prime table failed validation on load.
    #[error("corrupt table cache: {0}")]
    CorruptCache(String),

    /// A scan checkpoint failed validation on load.
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    /// A CSV input did not match the expected schema.
    #[error("malformed csv: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
