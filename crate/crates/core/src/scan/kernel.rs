//! Word-parallel counting over the odd-slot prime bitmap.
//!
//! With slot `i` standing for `2i + 1`, the odd partitions of `q` are the
//! slot pairs `i + j = m` where `m = q/2 - 1`. Keeping a bit-reversed copy of
//! the bitmap turns `P[m - i]` into a forward read, so a whole word of
//! candidates is tested with one AND.

use std::sync::OnceLock;

use crate::primes::{test_bit, PrimeTable};

pub(crate) struct PairKernel<'a> {
    fwd: &'a [u64],
    rev: Vec<u64>,
    max_slot: u64,
}

/// Outcome of re-deriving the admissible set of one `q` from residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Verification {
    pub admissible: u64,
    /// Admissible `n1` whose pair is not prime. Always zero unless the
    /// predicate is unsound.
    pub unsound: u64,
}

impl<'a> PairKernel<'a> {
    pub fn new(table: &'a PrimeTable) -> Self {
        let fwd = table.odd_bits();
        let max_slot = table.odd_slots() - 1;
        let mut rev = vec![0u64; fwd.len()];
        for (w, &word) in fwd.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let i = w as u64 * 64 + word.trailing_zeros() as u64;
                word &= word - 1;
                let k = max_slot - i;
                rev[(k / 64) as usize] |= 1 << (k % 64);
            }
        }
        Self { fwd, rev, max_slot }
    }

    /// Number of slots `i` in `[lo, m - lo]` with both `i` and `m - i` prime.
    /// Requires `m <= max_slot`.
    pub fn symmetric_count(&self, m: u64, lo: u64) -> u64 {
        if 2 * lo > m {
            return 0;
        }
        // Pairs with i < m - i, doubled, plus the centre when m is even.
        let half_hi = (m - 1) / 2;
        let mut count = 2 * self.range_count(m, lo, half_hi);
        if m % 2 == 0 && test_bit(self.fwd, m / 2) {
            count += 1;
        }
        count
    }

    /// Slots `i` in `[lo, hi]` with both `i` and `m - i` prime.
    fn range_count(&self, m: u64, lo: u64, hi: u64) -> u64 {
        if lo > hi {
            return 0;
        }
        let offset = self.max_slot - m;
        let mut count = 0;
        let mut i = lo;
        while i <= hi {
            let len = (hi - i + 1).min(64);
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            let a = window(self.fwd, i);
            let b = window(&self.rev, offset + i);
            count += (a & b & mask).count_ones() as u64;
            i += 64;
        }
        count
    }

    /// Rebuilds the admissible set of `q` by striking the bad residue classes
    /// of every predicate prime, then checks each survivor against the pair
    /// bitmap.
    pub fn verify_admissible(&self, q: u64, cutoff: &[u64]) -> Verification {
        let m = q / 2 - 1;
        let words = ((m + 1).div_ceil(64)) as usize;
        let mut strike = vec![0u64; words];
        let small = small_prime_masks();

        // Residue classes of primes below 64 are applied a word at a time
        // from precomputed masks; larger primes are struck bit by bit.
        let mut phases: Vec<(&[u64], u64, u64, u64)> = Vec::new();
        for &p in cutoff {
            // (p + 1)/2 is the inverse of 2 modulo p.
            #[allow(clippy::manual_div_ceil)]
            let inv2 = (p + 1) / 2;
            let r = q % p;
            let classes: &[u64] = if r == 0 { &[0] } else { &[0, r] };
            for &c in classes {
                // n1 = 2i + 1 = c (mod p)  <=>  i = (c - 1) / 2 (mod p)
                let t = (c + p - 1) % p * inv2 % p;
                match small.get(p) {
                    Some(masks) => phases.push((masks, p, 64 % p, t)),
                    None => {
                        let mut i = t;
                        while i <= m {
                            strike[(i / 64) as usize] |= 1 << (i % 64);
                            i += p;
                        }
                    }
                }
            }
        }
        for word in strike.iter_mut() {
            let mut acc = 0;
            for (masks, p, step, phase) in phases.iter_mut() {
                acc |= masks[*phase as usize];
                *phase = if *phase >= *step { *phase - *step } else { *phase + *p - *step };
            }
            *word |= acc;
        }

        // Candidates are slots 1..=m-1, i.e. n1 in [3, q - 3].
        let offset = self.max_slot - m;
        let mut admissible = 0;
        let mut unsound = 0;
        for (w, &s) in strike.iter().enumerate() {
            let base = w as u64 * 64;
            let mut valid = !s;
            if base == 0 {
                valid &= !1;
            }
            let end = base + 64;
            if end > m {
                let keep = m - base;
                valid &= if keep >= 64 { u64::MAX } else { (1u64 << keep) - 1 };
            }
            let pair = self.fwd[w] & window(&self.rev, offset + base);
            admissible += valid.count_ones() as u64;
            unsound += (valid & !pair).count_ones() as u64;
        }
        Verification { admissible, unsound }
    }
}

/// 64 bits starting at bit `start`; bits past the end read as zero.
#[inline]
fn window(words: &[u64], start: u64) -> u64 {
    let w = (start / 64) as usize;
    let b = start % 64;
    let lo = words.get(w).copied().unwrap_or(0);
    if b == 0 {
        lo
    } else {
        let hi = words.get(w + 1).copied().unwrap_or(0);
        (lo >> b) | (hi << (64 - b))
    }
}

/// For each odd prime `p < 64`, `masks[r]` has bit `j` set iff `j = r (mod p)`.
struct SmallPrimeMasks {
    by_prime: Vec<Option<Vec<u64>>>,
}

impl SmallPrimeMasks {
    fn get(&self, p: u64) -> Option<&[u64]> {
        self.by_prime.get(p as usize).and_then(|m| m.as_deref())
    }
}

fn small_prime_masks() -> &'static SmallPrimeMasks {
    static MASKS: OnceLock<SmallPrimeMasks> = OnceLock::new();
    MASKS.get_or_init(|| {
        let mut by_prime = vec![None; 64];
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
            let masks = (0..p).map(|r| (0..64).filter(|j| j % p == r).fold(0u64, |acc, j| acc | 1 << j)).collect();
            by_prime[p as usize] = Some(masks);
        }
        SmallPrimeMasks { by_prime }
    })
}
