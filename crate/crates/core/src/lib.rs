//! Square-free palindromes in arithmetic progressions.
//!
//! The crate enumerates and counts base-`b` palindromes (and the
//! quasi-palindromes that majorize them), measures how square-free
//! palindromes distribute over residue classes against the predicted main
//! term, and evaluates the exponential sums, sieve quantities and digit
//! harmonics that control that distribution. Every fast routine has a
//! naive counterpart in [`oracle`]; [`verify`] wires the two together into
//! named checks.

pub mod arith;
pub mod baseline;
pub mod digits;
pub mod equidist;
mod error;
pub mod expsums;
pub mod harmonics;
pub mod largesieve;
pub mod oracle;
pub mod palsets;
pub mod phase;
pub mod verify;

pub use error::{Error, Result};

/// Largest integer any counting routine accepts.
pub const INT_CAP: u64 = 1_000_000_000_000_000_000;
