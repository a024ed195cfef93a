//! Combinatorics of permutation patterns and superpatterns.
//!
//! * [`perm`], [`rank`], [`random`]: hosts, patterns, occurrences, Lehmer
//!   ranks and seeded generation.
//! * [`pattern`]: containment, occurrence enumeration, exact distinct-pattern
//!   census and universality checks.
//! * [`perm_encoding`]: the width-based injective encoding of patterns in a
//!   permutation.
//! * [`seq_encoding`]: the relative-position encoding of patterns in an
//!   r-ary sequence together with gap and split statistics.
//! * [`prob`]: samplers, tail bounds, log-space numbers and inequality
//!   certificates.

pub mod error;
pub mod format;
pub mod pattern;
pub mod perm;
pub mod perm_encoding;
pub mod prob;
pub mod random;
pub mod rank;
pub mod seq_encoding;
pub mod util;

pub use error::{Error, Result};
pub use perm::{extract_pattern, lift, standardize, AnyHost, Host, Occurrence, Permutation, RarySequence};
pub use rank::{rank_pattern, unrank_pattern, PatternRank};
