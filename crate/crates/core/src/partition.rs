//! Admissibility, residue rows and exact Goldbach counts for a single `q`.
//!
//! Counts are ordered: `8 = 3 + 5 = 5 + 3` contributes two partitions, the
//! same convention under which `q` has `n = q/2 - 2` odd two-part
//! compositions `n1 + n2` with `n1, n2 >= 3`.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::primes::{predicate_cutoff, require_root_coverage, PrimeTable};

/// Number of ordered pairs `(n1, n2)` of odd integers `>= 3` with `n1 + n2 = q`.
pub fn odd_partition_count(q: u64) -> Result<u64> {
    check_even(q, 6)?;
    Ok(q / 2 - 2)
}

/// `n1 mod p` for each listed prime; one row of the residue table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueRow {
    pub n1: u64,
    pub residues: BTreeMap<u64, u64>,
}

impl ResidueRow {
    pub fn get(&self, p: u64) -> Option<u64> {
        self.residues.get(&p).copied()
    }
}

pub fn residue_row(n1: u64, primes: &[u64]) -> Result<ResidueRow> {
    if n1 < 3 || n1 % 2 == 0 {
        return Err(invalid(format!("n1 must be an odd integer >= 3, got {n1}")));
    }
    if primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("residue primes must be strictly ascending"));
    }
    if let Some(&p) = primes.iter().find(|&&p| p < 3 || p % 2 == 0) {
        return Err(invalid(format!("residue columns must be odd primes, got {p}")));
    }
    Ok(ResidueRow { n1, residues: primes.iter().map(|&p| (p, n1 % p)).collect() })
}

/// Residues of `n1` modulo `p` that force `p | n1` or `p | q - n1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadResidueSet {
    pub q: u64,
    pub p: u64,
    /// `{0}` when `p | q`, otherwise `{0, q mod p}` in ascending order.
    pub residues: Vec<u64>,
}

impl BadResidueSet {
    pub fn contains(&self, r: u64) -> bool {
        self.residues.contains(&r)
    }

    /// The two bad residues coincide.
    pub fn is_degenerate(&self) -> bool {
        self.residues.len() == 1
    }
}

pub fn bad_residues(q: u64, p: u64) -> Result<BadResidueSet> {
    check_even(q, 6)?;
    if p < 3 || p % 2 == 0 {
        return Err(invalid(format!("p must be an odd prime, got {p}")));
    }
    let r = q % p;
    let residues = if r == 0 { vec![0] } else { vec![0, r] };
    Ok(BadResidueSet { q, p, residues })
}

/// True iff `n1 mod p` avoids `{0, q mod p}` for every odd prime `p` with
/// `p^2 < q`.
///
/// An admissible `n1` always gives a Goldbach partition. The converse fails
/// only for partitions where `n1` or `q - n1` is one of those small primes.
pub fn is_admissible(q: u64, n1: u64, table: &PrimeTable) -> Result<bool> {
    check_even(q, 6)?;
    if n1 < 3 || n1 % 2 == 0 || n1 > q - 3 {
        return Err(invalid(format!("n1 must be odd in [3, {}], got {n1}", q - 3)));
    }
    require_root_coverage(q, table)?;
    Ok(admissible_unchecked(q, n1, predicate_cutoff(q, table)))
}

#[inline]
pub(crate) fn admissible_unchecked(q: u64, n1: u64, cutoff: &[u64]) -> bool {
    cutoff.iter().all(|&p| {
        let r = n1 % p;
        r != 0 && r != q % p
    })
}

/// Number of odd `n1` in `[3, q - 3]` passing [`is_admissible`].
pub fn admissible_count(q: u64, table: &PrimeTable) -> Result<u64> {
    check_even(q, 6)?;
    require_root_coverage(q, table)?;
    let cutoff = predicate_cutoff(q, table);
    Ok((3..=q - 3).step_by(2).filter(|&n1| admissible_unchecked(q, n1, cutoff)).count() as u64)
}

/// Both `n1` and `q - n1` are prime.
pub fn is_prime_pair(q: u64, n1: u64, table: &PrimeTable) -> Result<bool> {
    check_even(q, 4)?;
    if n1 < 2 || n1 > q - 2 {
        return Err(invalid(format!("n1 must lie in [2, {}], got {n1}", q - 2)));
    }
    require_coverage(q, table)?;
    Ok(table.is_prime(n1) && table.is_prime(q - n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoldbachCount {
    pub ordered: u64,
    pub unordered: u64,
}

pub fn goldbach_count(q: u64, table: &PrimeTable) -> Result<GoldbachCount> {
    check_even(q, 4)?;
    require_coverage(q, table)?;
    let mut ordered = 0;
    let mut unordered = 0;
    for n1 in 2..=q - 2 {
        if table.is_prime(n1) && table.is_prime(q - n1) {
            ordered += 1;
            if n1 <= q / 2 {
                unordered += 1;
            }
        }
    }
    Ok(GoldbachCount { ordered, unordered })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionEntry {
    pub n1: u64,
    pub n2: u64,
    pub admissible: bool,
    pub prime_pair: bool,
}

/// Every odd `n1` in `[3, q - 3]`, preceded by `n1 = 2` when `q - 2` is prime.
///
/// The `n1 = 2` row is never admissible: the predicate only looks at odd
/// candidates. For `q = 4` it is the only row.
pub fn enumerate_partitions(q: u64, table: &PrimeTable) -> Result<Vec<PartitionEntry>> {
    check_even(q, 4)?;
    require_coverage(q, table)?;
    let mut out = Vec::with_capacity((q / 2) as usize);
    if table.is_prime(q - 2) {
        out.push(PartitionEntry { n1: 2, n2: q - 2, admissible: false, prime_pair: true });
    }
    if q >= 6 {
        let cutoff = predicate_cutoff(q, table);
        for n1 in (3..=q - 3).step_by(2) {
            out.push(PartitionEntry {
                n1,
                n2: q - n1,
                admissible: admissible_unchecked(q, n1, cutoff),
                prime_pair: table.is_prime(n1) && table.is_prime(q - n1),
            });
        }
    }
    if q > 4 && table.is_prime(q - 2) {
        out.push(PartitionEntry { n1: q - 2, n2: 2, admissible: false, prime_pair: true });
    }
    Ok(out)
}

/// Everything known about one `q`.
///
/// For `q = 4` the odd machinery does not apply: `n`, `admissible_count` and
/// `predicate_cutoff` are all zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionProfile {
    pub q: u64,
    pub n: u64,
    pub goldbach_ordered: u64,
    pub goldbach_unordered: u64,
    pub admissible_count: u64,
    /// Largest odd prime with `p^2 < q`, or 0.
    pub predicate_cutoff: u64,
}

pub fn profile(q: u64, table: &PrimeTable) -> Result<PartitionProfile> {
    let count = goldbach_count(q, table)?;
    if q == 4 {
        return Ok(PartitionProfile {
            q,
            n: 0,
            goldbach_ordered: count.ordered,
            goldbach_unordered: count.unordered,
            admissible_count: 0,
            predicate_cutoff: 0,
        });
    }
    Ok(PartitionProfile {
        q,
        n: odd_partition_count(q)?,
        goldbach_ordered: count.ordered,
        goldbach_unordered: count.unordered,
        admissible_count: admissible_count(q, table)?,
        predicate_cutoff: predicate_cutoff(q, table).last().copied().unwrap_or(0),
    })
}

fn check_even(q: u64, min: u64) -> Result<()> {
    if q < min || q % 2 != 0 {
        return Err(invalid(format!("q must be an even integer >= {min}, got {q}")));
    }
    Ok(())
}

fn require_coverage(q: u64, table: &PrimeTable) -> Result<()> {
    if !table.covers(q) {
        return Err(Error::OutOfTable { value: q, limit: table.limit() });
    }
    Ok(())
}
