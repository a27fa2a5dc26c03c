#![forbid(unsafe_code)]

//! Exact arithmetic and verification harnesses for three intertwined Collatz
//! maps: `Col2` on positive integers, `Col3` on positive triadic rationals
//! (halving with a round-up correction when exact halving leaves the triadic
//! lattice), and `Col4`, which rescales `Col3` back into the band `[1, 3)`.
//!
//! Everything observable is exact. Values are `m / 3^r` with an
//! arbitrary-precision numerator and an explicit power-of-three denominator;
//! floors, windows and orbit records come from integer arithmetic only.
//! Comparisons against `log2(3)` go through rigorous dyadic interval
//! enclosures with adaptive precision ([`dyadic`]), never through floating
//! point. Floats appear solely in display-only decimal renderings and hit
//! fractions.
//!
//! Randomized harnesses ([`analysis`]) are fully deterministic: a single
//! 64-bit seed is expanded per property into a ChaCha8 stream keyed by
//! `seed XOR FNV-1a-64(label)` (see [`analysis::substream`]), so re-running
//! any harness with the same seed reproduces its report byte for byte.

pub mod analysis;
pub mod diophantine;
pub mod dyadic;
pub mod maps;
pub mod triadic;

pub use num_bigint;

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// An operation that is undefined at zero was handed zero.
    #[error("{op} is undefined for zero")]
    Zero { op: &'static str },
    /// A denominator exponent left the machine-integer range.
    #[error("denominator exponent overflow")]
    DenomExpOverflow,
    /// An argument fell outside the documented domain.
    #[error("{what} must be {bound}, got {got}")]
    OutOfRange {
        what: &'static str,
        bound: &'static str,
        got: String,
    },
    /// A computation was refused because it would exceed the built-in
    /// resource limits (precision escalation, absurd precision requests).
    #[error("resource guard tripped: {0}")]
    ResourceGuard(String),
    /// An identity the library promises to maintain failed to hold. Seeing
    /// this variant means a genuine property violation (or a bug), never bad
    /// input.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
