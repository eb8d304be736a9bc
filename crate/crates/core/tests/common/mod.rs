//! Brute-force reference implementations. Nothing here touches the sieve:
//! primality is decided by trial division.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

pub fn is_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    if k % 2 == 0 {
        return k == 2;
    }
    let mut d = 3;
    while d * d <= k {
        if k % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primality flags for `0..=limit`, each decided by trial division.
pub fn prime_flags(limit: u64) -> Vec<bool> {
    (0..=limit).map(is_prime).collect()
}

pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&k| is_prime(k)).collect()
}

/// Ordered Goldbach partitions of `q`, by direct enumeration.
pub fn goldbach_ordered(q: u64, flags: &[bool]) -> u64 {
    (2..=q - 2).filter(|&n1| flags[n1 as usize] && flags[(q - n1) as usize]).count() as u64
}

/// Odd primes `p` with `p * p < q`.
pub fn predicate_primes(q: u64) -> Vec<u64> {
    odd_primes(3, q.isqrt() + 1).into_iter().take_while(|p| p * p < q).collect()
}

/// Odd primes `p` with `p * p + 3 <= q`.
pub fn bound_primes(q: u64) -> Vec<u64> {
    odd_primes(3, q.isqrt() + 1).into_iter().take_while(|p| p * p + 3 <= q).collect()
}

/// Admissibility straight from the definition: `n1 mod p` avoids `0` and
/// `q mod p` for every predicate prime.
pub fn admissible(q: u64, n1: u64, primes: &[u64]) -> bool {
    primes.iter().all(|&p| n1 % p != 0 && n1 % p != q % p)
}

pub fn admissible_count(q: u64) -> u64 {
    let primes = predicate_primes(q);
    (3..=q - 3).step_by(2).filter(|&n1| admissible(q, n1, &primes)).count() as u64
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `prod (p - 2)/p * n - (p_j - 2)` over the bound primes, or `n` when
/// there are none.
pub fn bound(q: u64) -> BigRational {
    let primes = bound_primes(q);
    let n = BigRational::from_integer(BigInt::from(q / 2 - 2));
    let Some(&p_j) = primes.last() else {
        return n;
    };
    let shrink = primes.iter().fold(ratio(1, 1), |acc, &p| acc * ratio(p as i64 - 2, p as i64));
    shrink * n - BigRational::from_integer(BigInt::from(p_j - 2))
}
