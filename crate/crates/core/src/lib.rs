//! Goldbach partitions seen through residue classes.
//!
//! An even `q` splits as `n1 + n2` with both parts prime exactly when, for
//! every odd prime `p` below `sqrt(q)`, the residue `n1 mod p` avoids the two
//! "bad" classes `0` and `q mod p` (up to partitions whose parts are themselves
//! such small primes). Counting the surviving classes in the worst case gives
//! a conjectured lower bound on the number of partitions,
//!
//! ```text
//! A(q) = (1/3)(3/5)(5/7)(9/11)...((p_j - 2)/p_j) * (q/2 - 2) - (p_j - 2),
//! ```
//!
//! where `p_j` is the largest odd prime with `p_j^2 + 3 <= q`.
//!
//! The crate is split into:
//!
//! - [`primes`]: bit-packed odd-only sieve ([`PrimeTable`]), segmented sieving
//!   and the two cutoff prime lists.
//! - [`partition`]: the admissibility predicate, bad residues, residue rows and
//!   exact Goldbach counts.
//! - [`bound`]: the lower bound and its specialisations in exact rational
//!   arithmetic, including the local minima at `q = p^2 + 3`.
//! - [`scan`]: a parallel, deterministic, checkpointed audit over ranges of `q`
//!   emitting CSV or JSONL reports.
//!
//! Primes are indexed from `p_0 = 2`, so `p_3 = 7`, `p_4 = 11` and `p_11 = 37`.

pub mod bound;
pub mod error;
pub mod partition;
pub mod primes;
pub mod scan;

pub use bound::{BoundBreakdown, MinimaRecord, Rational};
pub use error::{Error, Result};
pub use partition::{BadResidueSet, GoldbachCount, PartitionEntry, PartitionProfile, ResidueRow};
pub use primes::{PrimeTable, Segment};
pub use scan::{OutputFormat, ScanConfig, ScanRecord, ScanReport, Special};
