//! The conjectured partition-count lower bound, evaluated exactly.
//!
//! For even `q` with bound cutoff primes `3, 5, ..., p_j`:
//!
//! ```text
//! A(q) = prod (p - 2)/p * (q/2 - 2) - (p_j - 2)
//! ```
//!
//! With no cutoff primes (`q < 12`) the product is 1 and the subtractive
//! term 0, so `A = n`.
//!
//! At `q = p_m^2 + 3` the bound has a local minimum `A_m`. Shifting each
//! denominator one prime down the leading telescope `(1/3)(3/5)(5/7) = 1/7`
//! rewrites it as
//!
//! ```text
//! A_m = prod_{i=4..m} (p_i - 2)/p_{i-1} * (p_m^2 - 1)/(2 p_m) - (p_m - 2)
//! ```
//!
//! where factors from twin primes equal 1. Nothing here is rounded.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::primes::{cutoff_primes_for_bound, PrimeTable};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `prod (p - 2)/p` over the given odd primes; 1 for an empty list.
pub fn shrink_product(cutoff: &[u64]) -> Result<Rational> {
    if cutoff.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("cutoff primes must be strictly ascending"));
    }
    if let Some(&p) = cutoff.iter().find(|&&p| p % 2 == 0 || !is_prime_small(p)) {
        return Err(invalid(format!("cutoff entries must be odd primes, got {p}")));
    }
    Ok(shrink_fraction(cutoff).to_rational())
}

fn shrink_fraction(cutoff: &[u64]) -> Fraction {
    let mut f = Fraction::one();
    for &p in cutoff {
        f.mul(p - 2, p);
    }
    f
}

/// A positive fraction kept in lowest terms while small factors are
/// multiplied in. Cross-cancelling each factor against the running
/// numerator and denominator costs one big-by-small division per step
/// instead of a big gcd.
#[derive(Debug, Clone)]
struct Fraction {
    num: BigUint,
    den: BigUint,
}

impl Fraction {
    fn one() -> Self {
        Self { num: BigUint::one(), den: BigUint::one() }
    }

    /// Multiplies by `a/b` for positive `a`, `b`.
    fn mul(&mut self, a: u64, b: u64) {
        let g = a.gcd(&b);
        let (a, b) = (a / g, b / g);
        let g_a = a.gcd(&small_rem(&self.den, a));
        let g_b = b.gcd(&small_rem(&self.num, b));
        self.num = &self.num / g_b * (a / g_a);
        self.den = &self.den / g_a * (b / g_b);
    }

    /// `self * n - s` in lowest terms. Relies on the denominator being
    /// squarefree, which holds for products of `(p - 2)/p` style factors
    /// over distinct primes: then `gcd(nN - sD, D) = gcd(n, D)`.
    fn affine(&self, n: u64, s: u64) -> (BigInt, BigUint) {
        let g = if n == 0 { 1 } else { n.gcd(&small_rem(&self.den, n)) };
        let num = BigInt::from(&self.num * n) - BigInt::from(&self.den * s);
        if g > 1 {
            (num / g, &self.den / g)
        } else {
            (num, self.den.clone())
        }
    }

    fn to_rational(&self) -> Rational {
        Rational::new_raw(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }
}

fn small_rem(big: &BigUint, m: u64) -> u64 {
    (big % m).to_u64().expect("remainder is below a u64 modulus")
}

fn pair_to_rational((num, den): (BigInt, BigUint)) -> Rational {
    Rational::new_raw(num, BigInt::from(den))
}

fn rational_u(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn is_prime_small(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Exact decomposition of the bound at one `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundBreakdown {
    pub q: u64,
    pub cutoff: Vec<u64>,
    pub shrink_product: Rational,
    pub n: u64,
    /// `p_j - 2`, or 0 when the cutoff is empty.
    pub subtractive: u64,
    pub a: Rational,
}

impl BoundBreakdown {
    /// Largest cutoff prime, 0 if none.
    pub fn p_j(&self) -> u64 {
        self.cutoff.last().copied().unwrap_or(0)
    }

    /// No cutoff prime applies (`q < 12`), so `A = n` by convention.
    pub fn is_empty_cutoff(&self) -> bool {
        self.cutoff.is_empty()
    }
}

pub fn bound_a(q: u64, table: &PrimeTable) -> Result<BoundBreakdown> {
    let cutoff = cutoff_primes_for_bound(q, table)?;
    shrink_product(&cutoff)?;
    let shrink = shrink_fraction(&cutoff);
    let n = q / 2 - 2;
    let subtractive = cutoff.last().map_or(0, |p| p - 2);
    let a = pair_to_rational(shrink.affine(n, subtractive));
    Ok(BoundBreakdown { q, cutoff, shrink_product: shrink.to_rational(), n, subtractive, a })
}

/// The bound with only the prime 3: `(n - 2)/3`, before it is weakened to
/// `n/3 - 1`. May be negative.
pub fn bound_a_three(q: u64) -> Result<Rational> {
    check_q(q)?;
    let n = BigInt::from(q / 2 - 2);
    Ok(Rational::new(n - 2, BigInt::from(3)))
}

/// Whether a value was requested inside the range its formula was stated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Stated,
    OutOfStatedScope,
}

/// The bound with primes 3 and 5: `(3/5)(n/3 - 1) - 2`, stated for `q >= 28`.
/// Smaller `q` are still evaluated but tagged [`Scope::OutOfStatedScope`].
pub fn bound_a_three_five(q: u64) -> Result<(Rational, Scope)> {
    check_q(q)?;
    let n = int(q / 2 - 2);
    let value = rational(3, 5) * (n / int(3) - int(1)) - int(2);
    let scope = if q >= 28 { Scope::Stated } else { Scope::OutOfStatedScope };
    Ok((value, scope))
}

/// The bound at a local minimum `q = p_m^2 + 3`, computed both directly and
/// in telescoped form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimaRecord {
    pub p_m: u64,
    pub q: u64,
    pub n: u64,
    pub a_direct: Rational,
    /// `None` for `p_m < 11`, where the telescoped grouping is not defined.
    pub a_telescoped: Option<Rational>,
    /// `2 - 1/p_m`.
    pub lower_chain: Rational,
}

impl MinimaRecord {
    /// Both forms are built in lowest terms, so equal values have equal
    /// numerators and denominators; comparing those avoids the general
    /// rational comparison, which is slow on thousand-digit operands.
    pub fn forms_agree(&self) -> Option<bool> {
        self.a_telescoped.as_ref().map(|t| t.numer() == self.a_direct.numer() && t.denom() == self.a_direct.denom())
    }

    /// `A_m > 2 - 1/p_m > 1`, when the telescoped form exists.
    pub fn exceeds_lower_chain(&self) -> Option<bool> {
        let one = Rational::one();
        self.a_telescoped.as_ref().map(|t| *t > self.lower_chain && self.lower_chain > one)
    }
}

pub fn minima_record(p_m: u64, table: &PrimeTable) -> Result<MinimaRecord> {
    if p_m < 3 || p_m % 2 == 0 || !is_prime_small(p_m) {
        return Err(invalid(format!("p_m must be an odd prime, got {p_m}")));
    }
    let q = p_m * p_m + 3;
    let breakdown = bound_a(q, table)?;
    let a_telescoped = if p_m >= 11 { Some(telescoped_minimum(p_m, table)?) } else { None };
    Ok(MinimaRecord {
        p_m,
        q,
        n: (p_m * p_m - 1) / 2,
        a_direct: breakdown.a,
        a_telescoped,
        lower_chain: minima_lower_chain(p_m)?,
    })
}

/// `prod_{i=4..m} (p_i - 2)/p_{i-1} * (p_m^2 - 1)/(2 p_m) - (p_m - 2)`.
pub fn telescoped_minimum(p_m: u64, table: &PrimeTable) -> Result<Rational> {
    if p_m < 11 {
        return Err(invalid(format!("telescoped form needs p_m >= 11, got {p_m}")));
    }
    let primes = table.odd_primes_up_to(p_m);
    if primes.last() != Some(&p_m) {
        return Err(invalid(format!("{p_m} is not a prime covered by the table")));
    }
    // primes[0] = 3 = p_1, so p_4 = 11 sits at index 3.
    let mut product = Fraction::one();
    for w in primes.windows(2).skip(2) {
        product.mul(w[1] - 2, w[0]);
    }
    // (p_m^2 - 1)/(2 p_m) = ((p_m - 1)/2) * ((p_m + 1)/p_m)
    product.mul((p_m - 1) / 2, 1);
    product.mul(p_m + 1, p_m);
    Ok(pair_to_rational(product.affine(1, p_m - 2)))
}

/// `(9/7)(15/13)(21/19)(27/23)(35/31)`: the telescoped factors present for
/// every `p_m >= 37`.
pub fn five_fraction_product() -> Rational {
    [(9, 7), (15, 13), (21, 19), (27, 23), (35, 31)]
        .into_iter()
        .fold(Rational::one(), |acc, (a, b)| acc * rational(a, b))
}

/// `2 - 1/p_m`.
pub fn minima_lower_chain(p_m: u64) -> Result<Rational> {
    if p_m < 3 {
        return Err(invalid(format!("p_m must be at least 3, got {p_m}")));
    }
    Ok(int(2) - rational_u(1, p_m))
}

/// Bound values for many `q` sharing one set of precomputed shrink products.
///
/// Produces `A` as a reduced `(numerator, denominator)` pair without
/// general rational normalisation: with `S = N/D` in lowest terms,
/// `A = (nN - sD)/D` and `gcd(nN - sD, D) = gcd(n, D)`.
#[derive(Debug, Clone)]
pub struct BoundEvaluator {
    primes: Vec<u64>,
    /// `prefix[k]` is the shrink product of the first `k` odd primes.
    prefix: Vec<(BigInt, BigUint)>,
}

/// Bound value at one `q` as an integer pair with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactBound {
    pub p_j: u64,
    pub num: BigInt,
    pub den: BigUint,
}

impl ExactBound {
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.clone(), BigInt::from(self.den.clone()))
    }

    /// `count > A`, by cross-multiplication.
    pub fn exceeded_by(&self, count: u64) -> bool {
        BigInt::from(&self.den * count) > self.num
    }
}

impl BoundEvaluator {
    /// Covers every even `q <= q_max`.
    pub fn new(q_max: u64, table: &PrimeTable) -> Result<Self> {
        let root = q_max.isqrt();
        if !table.covers(root) {
            return Err(crate::Error::OutOfTable { value: root, limit: table.limit() });
        }
        let primes = table.odd_primes_up_to(root).to_vec();
        let mut prefix = Vec::with_capacity(primes.len() + 1);
        let mut shrink = Fraction::one();
        prefix.push((BigInt::one(), BigUint::one()));
        for &p in &primes {
            shrink.mul(p - 2, p);
            prefix.push((BigInt::from(shrink.num.clone()), shrink.den.clone()));
        }
        Ok(Self { primes, prefix })
    }

    /// `A(q)` for even `q >= 6` within range.
    pub fn evaluate(&self, q: u64) -> ExactBound {
        debug_assert!(q >= 6 && q % 2 == 0);
        let k = self.primes.partition_point(|&p| p * p + 3 <= q);
        let p_j = if k == 0 { 0 } else { self.primes[k - 1] };
        let subtractive = if k == 0 { 0 } else { p_j - 2 };
        let n = q / 2 - 2;
        let (shrink_num, shrink_den) = &self.prefix[k];

        let g = (shrink_den % n).to_u64().expect("remainder below n").gcd(&n);
        let num = shrink_num * n - BigInt::from(shrink_den * subtractive);
        let (num, den) = if g > 1 { (num / g, shrink_den / g) } else { (num, shrink_den.clone()) };
        debug_assert!(!den.is_zero());
        ExactBound { p_j, num, den }
    }
}

fn check_q(q: u64) -> Result<()> {
    if q < 6 || q % 2 != 0 {
        return Err(invalid(format!("q must be an even integer >= 6, got {q}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::build_table;

    #[test]
    fn fractions_stay_in_lowest_terms() {
        let mut f = Fraction::one();
        let mut reference = Rational::one();
        for (a, b) in [(9, 7), (11, 11), (15, 13), (4, 6), (21, 19), (7, 3), (1, 1), (35, 31), (26, 49)] {
            f.mul(a, b);
            reference *= rational_u(a, b);
            assert_eq!(f.num.gcd(&f.den), BigUint::one(), "after {a}/{b}");
            assert_eq!(f.to_rational(), reference);
        }
    }

    #[test]
    fn results_are_reduced() {
        let t = build_table(2000).unwrap();
        let reduced = |r: &Rational| r.numer().gcd(r.denom()).is_one();
        for p in t.odd_primes_up_to(2000).iter().filter(|&&p| p >= 11) {
            let m = minima_record(*p, &t).unwrap();
            assert!(reduced(&m.a_direct) && reduced(m.a_telescoped.as_ref().unwrap()), "p={p}");
            assert_eq!(m.forms_agree(), Some(true), "p={p}");
        }
        for q in (6..4000).step_by(2) {
            let b = bound_a(q, &t).unwrap();
            assert!(reduced(&b.a) && reduced(&b.shrink_product), "q={q}");
        }
    }

    #[test]
    fn shrink_products_telescope() {
        assert_eq!(shrink_product(&[]).unwrap(), rational(1, 1));
        assert_eq!(shrink_product(&[3]).unwrap(), rational(1, 3));
        assert_eq!(shrink_product(&[3, 5]).unwrap(), rational(1, 5));
        assert_eq!(shrink_product(&[3, 5, 7]).unwrap(), rational(1, 7));
        assert!(shrink_product(&[3, 9]).is_err());
        assert!(shrink_product(&[2, 3]).is_err());
        assert!(shrink_product(&[5, 3]).is_err());
    }

    #[test]
    fn bound_breakdowns() {
        let t = build_table(1000).unwrap();
        let b = bound_a(100, &t).unwrap();
        assert_eq!(b.cutoff, vec![3, 5, 7]);
        assert_eq!(b.shrink_product, rational(1, 7));
        assert_eq!((b.n, b.subtractive), (48, 5));
        assert_eq!(b.a, rational(13, 7));

        let b = bound_a(12, &t).unwrap();
        assert_eq!(b.cutoff, vec![3]);
        assert_eq!(b.a, rational(1, 3));

        let b = bound_a(6, &t).unwrap();
        assert!(b.is_empty_cutoff());
        assert_eq!(b.a, rational(1, 1));
    }

    #[test]
    fn three_prime_specialisation() {
        assert_eq!(bound_a_three(10).unwrap(), rational(1, 3));
        assert_eq!(bound_a_three(20).unwrap(), rational(2, 1));
        assert_eq!(bound_a_three(6).unwrap(), rational(-1, 3));
    }

    #[test]
    fn three_five_specialisation() {
        assert_eq!(bound_a_three_five(28).unwrap(), (rational(-1, 5), Scope::Stated));
        let (v, scope) = bound_a_three_five(100).unwrap();
        assert_eq!((v.clone(), scope), (rational(7, 1), Scope::Stated));
        assert!(v > rational(48, 5) - rational(3, 1));
        assert_eq!(bound_a_three_five(20).unwrap().1, Scope::OutOfStatedScope);
    }

    #[test]
    fn minima_at_eleven_and_thirteen() {
        let t = build_table(1000).unwrap();
        let m = minima_record(11, &t).unwrap();
        assert_eq!((m.q, m.n), (124, 60));
        assert_eq!(m.a_direct, rational(-153, 77));
        assert_eq!(m.a_telescoped, Some(rational(-153, 77)));

        let m = minima_record(13, &t).unwrap();
        assert_eq!(m.forms_agree(), Some(true));

        let m = minima_record(7, &t).unwrap();
        assert_eq!(m.a_telescoped, None);
        assert!(minima_record(9, &t).is_err());
    }

    #[test]
    fn five_fractions_and_chain() {
        let f = five_fraction_product();
        assert_eq!(f, rational(2679075, 1232777));
        assert!(f > rational(2, 1));
        assert_eq!(minima_lower_chain(37).unwrap(), rational(73, 37));
        assert_eq!(minima_lower_chain(3).unwrap(), rational(5, 3));
        assert!(rational(39, 37) > rational(1, 1));
    }

    #[test]
    fn evaluator_matches_direct_bound() {
        let t = build_table(2000).unwrap();
        let eval = BoundEvaluator::new(2000, &t).unwrap();
        for q in (6..=2000).step_by(2) {
            let direct = bound_a(q, &t).unwrap();
            let fast = eval.evaluate(q);
            assert_eq!(fast.p_j, direct.p_j(), "q={q}");
            assert_eq!(fast.to_rational(), direct.a, "q={q}");
            let g = fast.num.gcd(&BigInt::from(fast.den.clone()));
            assert!(g.is_one(), "q={q} not reduced");
        }
    }
}
