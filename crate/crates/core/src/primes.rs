//! Prime generation and the cutoff prime lists.
//!
//! Only odd numbers are stored: slot `i` of a bitmap stands for the value
//! `2i + 1`, so a table up to `limit` costs about `limit / 16` bytes. Small
//! tables are sieved in one pass; larger ones are filled segment by segment
//! from a base table of primes up to `sqrt(limit)`.

use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

/// Tables up to this limit are sieved in a single pass.
const MONOLITHIC_LIMIT: u64 = 1 << 24;

/// Odd slots per segment when filling large tables.
pub const DEFAULT_SEGMENT_SLOTS: u64 = 1 << 20;

/// Queryable primality for every integer in `[0, limit]`.
///
/// Immutable after construction; share it freely across threads.
#[derive(Debug)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    primes: OnceLock<Vec<u64>>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Panics if `k` is beyond the table; callers that take user input
    /// should check [`PrimeTable::covers`] first.
    pub fn is_prime(&self, k: u64) -> bool {
        assert!(k <= self.limit, "{k} is beyond the prime table limit {}", self.limit);
        match k {
            0 | 1 => false,
            2 => true,
            _ if k % 2 == 0 => false,
            _ => test_bit(&self.bits, k / 2),
        }
    }

    pub fn covers(&self, k: u64) -> bool {
        k <= self.limit
    }

    /// All primes `<= limit`, ascending. Built on first use.
    pub fn primes(&self) -> &[u64] {
        self.primes.get_or_init(|| {
            let mut out = Vec::new();
            if self.limit >= 2 {
                out.push(2);
            }
            out.extend(iter_set_bits(&self.bits).map(|i| 2 * i + 1));
            out
        })
    }

    /// Primes `<= x`, ascending.
    pub fn primes_up_to(&self, x: u64) -> &[u64] {
        let primes = self.primes();
        &primes[..primes.partition_point(|&p| p <= x)]
    }

    /// Odd primes `<= x`, ascending.
    pub fn odd_primes_up_to(&self, x: u64) -> &[u64] {
        let primes = self.primes_up_to(x);
        primes.strip_prefix(&[2]).unwrap_or(primes)
    }

    /// Raw odd-slot bitmap: bit `i` is set iff `2i + 1` is prime.
    pub fn odd_bits(&self) -> &[u64] {
        &self.bits
    }

    /// Number of meaningful slots in [`PrimeTable::odd_bits`].
    pub fn odd_slots(&self) -> u64 {
        odd_slot_count(self.limit)
    }
}

/// Builds a table covering `[2, limit]`.
pub fn build_table(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(invalid(format!("prime table limit must be at least 2, got {limit}")));
    }
    let slots = odd_slot_count(limit);
    let mut bits = ones(slots);
    clear_bit(&mut bits, 0);

    if limit <= MONOLITHIC_LIMIT {
        let mut i = 1;
        while (2 * i + 1) * (2 * i + 1) <= limit {
            if test_bit(&bits, i) {
                let p = 2 * i + 1;
                let mut j = (p * p) / 2;
                while j < slots {
                    clear_bit(&mut bits, j);
                    j += p;
                }
            }
            i += 1;
        }
    } else {
        let base = build_table(limit.isqrt())?;
        let base_primes = base.odd_primes_up_to(base.limit());
        let words_per_segment = (DEFAULT_SEGMENT_SLOTS / 64) as usize;
        for (seg, chunk) in bits.chunks_mut(words_per_segment).enumerate() {
            let first_slot = seg as u64 * DEFAULT_SEGMENT_SLOTS;
            let seg_slots = DEFAULT_SEGMENT_SLOTS.min(slots - first_slot);
            strike_odd_window(base_primes, 2 * first_slot + 1, seg_slots, chunk);
        }
    }

    Ok(PrimeTable { limit, bits, primes: OnceLock::new() })
}

/// Exact primality of the odd values in a window `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct Segment {
    lo: u64,
    hi: u64,
    bits: Vec<u64>,
}

impl Segment {
    /// Inclusive lower end, rounded down to an even number.
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// `None` outside `[lo, hi]`.
    pub fn is_prime(&self, k: u64) -> Option<bool> {
        if k < self.lo || k > self.hi {
            return None;
        }
        Some(match k {
            0 | 1 => false,
            2 => true,
            _ if k % 2 == 0 => false,
            _ => test_bit(&self.bits, (k - self.lo - 1) / 2),
        })
    }

    /// Primes in the window, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let two = (self.lo <= 2 && 2 <= self.hi).then_some(2);
        two.into_iter().chain(iter_set_bits(&self.bits).map(move |i| self.lo + 2 * i + 1))
    }
}

/// Sieves `[lo, hi]` using the base primes of `table`.
pub fn sieve_segment(table: &PrimeTable, lo: u64, hi: u64) -> Result<Segment> {
    if lo > hi {
        return Err(invalid(format!("segment bounds reversed: [{lo}, {hi}]")));
    }
    let covered = (table.limit as u128) * (table.limit as u128);
    if covered < hi as u128 {
        return Err(Error::InsufficientBasePrimes { limit: table.limit, hi });
    }
    let lo = lo & !1;
    let start = lo + 1;
    let slots = if hi >= start { (hi - start) / 2 + 1 } else { 0 };
    let mut bits = ones(slots);
    strike_odd_window(table.odd_primes_up_to(hi.isqrt()), start, slots, &mut bits);
    if start == 1 && slots > 0 {
        clear_bit(&mut bits, 0);
    }
    Ok(Segment { lo, hi, bits })
}

/// Odd primes `p` with `p^2 + 3 <= q`: the primes the lower bound accounts
/// for. The last element is the bound's `p_j`; empty when `q < 12`.
///
/// Each even `q` lies in exactly one half-open interval
/// `[p_j^2 + 3, p_{j+1}^2 + 3)`, so a new prime enters precisely at its
/// square plus three.
pub fn cutoff_primes_for_bound(q: u64, table: &PrimeTable) -> Result<Vec<u64>> {
    check_even_q(q)?;
    require_root_coverage(q, table)?;
    let odd = table.odd_primes_up_to(q.isqrt());
    Ok(odd.iter().copied().take_while(|&p| p * p + 3 <= q).collect())
}

/// Odd primes `p` with `p^2 < q`: every odd composite below `q` has one of
/// these as a factor, which is what the admissibility predicate relies on.
pub fn cutoff_primes_for_predicate(q: u64, table: &PrimeTable) -> Result<Vec<u64>> {
    check_even_q(q)?;
    require_root_coverage(q, table)?;
    Ok(predicate_cutoff(q, table).to_vec())
}

/// Borrowing form of [`cutoff_primes_for_predicate`] without validation.
pub(crate) fn predicate_cutoff(q: u64, table: &PrimeTable) -> &[u64] {
    let odd = table.odd_primes_up_to(q.isqrt());
    &odd[..odd.partition_point(|&p| p * p < q)]
}

fn check_even_q(q: u64) -> Result<()> {
    if q < 6 || q % 2 != 0 {
        return Err(invalid(format!("q must be an even integer >= 6, got {q}")));
    }
    Ok(())
}

pub(crate) fn require_root_coverage(q: u64, table: &PrimeTable) -> Result<()> {
    let root = q.isqrt();
    if !table.covers(root) {
        return Err(Error::OutOfTable { value: root, limit: table.limit });
    }
    Ok(())
}

/// Clears the slots of odd multiples of each base prime in a window whose
/// slot `k` is the odd value `start + 2k`. The base primes themselves stay set.
fn strike_odd_window(base_primes: &[u64], start: u64, slots: u64, words: &mut [u64]) {
    if slots == 0 {
        return;
    }
    let last = start + 2 * (slots - 1);
    for &p in base_primes {
        if p * p > last {
            break;
        }
        let mut m = (start.div_ceil(p) * p).max(p * p);
        if m % 2 == 0 {
            m += p;
        }
        let mut slot = (m - start) / 2;
        while slot < slots {
            clear_bit(words, slot);
            slot += p;
        }
    }
}

fn odd_slot_count(limit: u64) -> u64 {
    limit.div_ceil(2)
}

fn ones(slots: u64) -> Vec<u64> {
    let words = slots.div_ceil(64) as usize;
    let mut bits = vec![u64::MAX; words];
    let tail = slots % 64;
    if tail != 0 {
        bits[words - 1] = (1u64 << tail) - 1;
    }
    bits
}

#[inline]
pub(crate) fn test_bit(words: &[u64], i: u64) -> bool {
    words[(i / 64) as usize] >> (i % 64) & 1 == 1
}

#[inline]
fn clear_bit(words: &mut [u64], i: u64) {
    words[(i / 64) as usize] &= !(1u64 << (i % 64));
}

fn iter_set_bits(words: &[u64]) -> impl Iterator<Item = u64> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let b = word.trailing_zeros() as u64;
            word &= word - 1;
            Some(w as u64 * 64 + b)
        })
    })
}
