//! Trial-division reference, independent of the sieve.

#![allow(dead_code)]

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

pub fn prime_flags(limit: u64) -> Vec<bool> {
    (0..=limit).map(is_prime).collect()
}

pub fn goldbach_ordered(q: u64, flags: &[bool]) -> u64 {
    (2..=q - 2).filter(|&n1| flags[n1 as usize] && flags[(q - n1) as usize]).count() as u64
}

/// Odd `n1` in `[3, q - 3]` avoiding `0` and `q mod p` for every odd prime
/// `p` with `p * p < q`.
pub fn admissible_count(q: u64) -> u64 {
    let primes: Vec<u64> = (3..).filter(|&p| is_prime(p)).take_while(|p| p * p < q).collect();
    (3..=q - 3).step_by(2).filter(|&n1| primes.iter().all(|&p| n1 % p != 0 && n1 % p != q % p)).count() as u64
}
