//! Exact arithmetic for the Romik sequence `d(n)` and its auxiliary
//! sequences `u(n)`, `v(n)`, `s(n,k)`, `r(n,k)`, together with independent
//! oracles (partition sums, closed residue formulas, valuations) used to
//! witness its congruences modulo 2, 5 and primes `p ≡ 3 (mod 4)`.
//!
//! - [`exact`]: the memoized [`SequenceCache`] and the recurrences.
//! - [`series`]: truncated power series over exact rationals.
//! - [`partitions`]: odd partitions and the partition-sum formula for `s(n,k)`.
//! - [`residues`]: residues, p-adic valuations, closed forms mod 5, grids.
//! - [`verify`]: theorem suites producing [`VerificationReport`]s.
//! - [`persist`]: the on-disk cache format.
//! - [`cli`]: the `romik` command line front end.

pub mod cli;
pub mod error;
pub mod exact;
pub mod partitions;
pub mod persist;
pub mod residues;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use exact::SequenceCache;
pub use partitions::{OddPartition, PartitionFilter};
pub use residues::{Residue, ResidueGrid, ValuationBudget};
pub use series::RationalSeries;
pub use verify::{PeriodScanResult, VerificationReport};

