//! Arithmetic functions backed by a smallest-prime-factor table.
//!
//! One [`FactorSieve`] answers every function the experiments need
//! (Ω, λ, μ, μ², p_max, φ_k). Each of them is a pure function of a
//! [`Factorization`], so the table is the only state. Ranges above the
//! in-core table are handled by [`segment`], which sieves Ω, μ and p_max
//! window by window.

mod family;
mod primes;
pub mod segment;

pub use family::PrimeFamily;
pub use primes::PrimeSet;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default upper bound on the number of table entries a sieve may allocate.
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 28;

/// Prime factorization with strictly increasing primes. Empty for 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: SmallVec<[(u64, u32); 12]>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from `(prime, exponent)` pairs.
    ///
    /// Primes must be strictly increasing and exponents positive; primality
    /// itself is the caller's responsibility.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u32)>,
    {
        let factors: SmallVec<[(u64, u32); 12]> = pairs.into_iter().collect();
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Argument("primes must be strictly increasing".into()));
            }
        }
        if factors.iter().any(|&(p, e)| p < 2 || e == 0) {
            return Err(Error::Argument("factors need p >= 2 and e >= 1".into()));
        }
        Ok(Self { factors })
    }

    pub(crate) fn push(&mut self, p: u64, e: u32) {
        debug_assert!(self.factors.last().is_none_or(|&(q, _)| q < p));
        self.factors.push((p, e));
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Reconstructs n, failing on u64 overflow.
    pub fn value(&self) -> Result<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, e)| {
            p.checked_pow(e).and_then(|pe| acc.checked_mul(pe)).ok_or(Error::Overflow("product of prime powers"))
        })
    }

    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn liouville(&self) -> i8 {
        if self.big_omega().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn mobius(&self) -> i8 {
        if self.is_squarefree() {
            self.liouville()
        } else {
            0
        }
    }

    /// Largest prime factor, with the convention p_max(1) = 1.
    pub fn largest_prime(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    /// Euler's totient from the prime powers; never exceeds `value()`.
    pub fn totient(&self) -> Result<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, e)| {
            p.checked_pow(e - 1)
                .and_then(|pe| pe.checked_mul(p - 1))
                .and_then(|t| acc.checked_mul(t))
                .ok_or(Error::Overflow("totient"))
        })
    }

    /// `true` when every exponent is at least `k`.
    pub fn is_kfull(&self, k: u32) -> bool {
        self.factors.iter().all(|&(_, e)| e >= k)
    }
}

/// Smallest-prime-factor table for 2 ≤ n ≤ limit.
///
/// Immutable once built and `Sync`, so a single table can serve every worker
/// thread of an experiment.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    /// Linear sieve up to `limit`; errors with [`Error::Capacity`] when
    /// `limit < 2` or `limit > cap`.
    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Capacity(format!("sieve limit {limit} is below 2")));
        }
        if limit > cap || limit >= u32::MAX as u64 {
            return Err(Error::Capacity(format!("sieve limit {limit} exceeds the memory cap {cap}")));
        }
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(limit));
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m >= len {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Largest n that [`FactorSieve::factorize_wide`] accepts.
    pub fn reach(&self) -> u64 {
        self.limit.saturating_mul(self.limit)
    }

    /// All primes up to `limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(Error::OutOfRange { value: n, limit: self.limit });
        }
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        Ok(self.smallest_prime_factor(n)? == n)
    }

    /// Factorization from the table alone; n must lie in `1..=limit`.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange { value: n, limit: self.limit });
        }
        Ok(self.factor_in_table(n))
    }

    fn factor_in_table(&self, mut n: u64) -> Factorization {
        let mut out = Factorization::one();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push(p, e);
        }
        out
    }

    /// Factorization of any n ≤ limit², trial-dividing by table primes until
    /// the cofactor drops into the table.
    pub fn factorize_wide(&self, n: u64) -> Result<Factorization> {
        if n <= self.limit {
            return self.factorize(n);
        }
        if n > self.reach() {
            return Err(Error::OutOfRange { value: n, limit: self.reach() });
        }
        let mut out = Factorization::one();
        let mut rest = n;
        for &p in &self.primes {
            let p = p as u64;
            if rest <= self.limit || p * p > rest {
                break;
            }
            if rest.is_multiple_of(p) {
                let mut e = 0;
                while rest.is_multiple_of(p) {
                    rest /= p;
                    e += 1;
                }
                out.push(p, e);
            }
        }
        if rest > self.limit {
            // no prime factor up to sqrt(rest) remains, so rest is prime
            out.push(rest, 1);
        } else if rest > 1 {
            for &(p, e) in self.factor_in_table(rest).pairs() {
                out.push(p, e);
            }
        }
        Ok(out)
    }

    /// Ω(n): prime factors counted with multiplicity.
    pub fn big_omega(&self, n: u64) -> Result<u32> {
        if n >= 1 && n <= self.limit {
            let mut n = n as usize;
            let mut count = 0;
            while n > 1 {
                n /= self.spf[n] as usize;
                count += 1;
            }
            return Ok(count);
        }
        Ok(self.factorize_wide(n)?.big_omega())
    }

    pub fn liouville(&self, n: u64) -> Result<i8> {
        Ok(if self.big_omega(n)? % 2 == 0 { 1 } else { -1 })
    }

    pub fn mobius(&self, n: u64) -> Result<i8> {
        Ok(self.factorize_wide(n)?.mobius())
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        Ok(self.factorize_wide(n)?.is_squarefree())
    }

    pub fn p_max(&self, n: u64) -> Result<u64> {
        Ok(self.factorize_wide(n)?.largest_prime())
    }

    pub fn totient(&self, n: u64) -> Result<u64> {
        self.factorize_wide(n)?.totient()
    }

    /// φ_k(n), the k-fold iterate of Euler's totient (φ_0 = identity).
    pub fn iterated_totient(&self, n: u64, k: u32) -> Result<u64> {
        let mut v = n;
        for _ in 0..k {
            if v == 1 {
                break;
            }
            v = self.totient(v)?;
        }
        Ok(v)
    }
}

fn estimate_prime_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// Primality by trial division; used for validating small user input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest e with p^e | n.
pub fn valuation(n: u64, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Argument("valuation of 0 is undefined".into()));
    }
    if !is_prime(p) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    let mut n = n;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// w_S(n): 1 when no prime of `excluded` divides n, else 0.
pub fn w_indicator(n: u64, excluded: &PrimeSet) -> u8 {
    u8::from(excluded.is_coprime(n))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Integer k-th root: the largest r with r^k ≤ x.
///
/// Newton iteration on integers, then an exactness fix-up so that boundary
/// cases such as perfect cubes are never misclassified.
pub fn iroot(x: u64, k: u32) -> u64 {
    assert!(k >= 1, "root degree must be positive");
    if k == 1 || x < 2 {
        return x;
    }
    if k >= 64 {
        return 1;
    }
    let bits = 64 - x.leading_zeros();
    let mut r: u128 = 1u128 << bits.div_ceil(k);
    let x128 = x as u128;
    let kk = k as u128;
    loop {
        let pow = pow_u128_saturating(r, k - 1);
        let next = ((kk - 1) * r + x128 / pow.max(1)) / kk;
        if next >= r {
            break;
        }
        r = next;
    }
    while pow_u128_saturating(r, k) > x128 {
        r -= 1;
    }
    while pow_u128_saturating(r + 1, k) <= x128 {
        r += 1;
    }
    r as u64
}

fn pow_u128_saturating(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve(limit: u64) -> FactorSieve {
        FactorSieve::new(limit).unwrap()
    }

    #[test]
    fn smallest_prime_factors() {
        let s = sieve(10);
        assert_eq!(s.smallest_prime_factor(10).unwrap(), 2);
        assert_eq!(s.smallest_prime_factor(9).unwrap(), 3);
        assert_eq!(s.smallest_prime_factor(7).unwrap(), 7);
        assert_eq!(sieve(2).smallest_prime_factor(2).unwrap(), 2);
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(FactorSieve::new(1), Err(Error::Capacity(_))));
        assert!(matches!(FactorSieve::with_cap(1000, 999), Err(Error::Capacity(_))));
    }

    #[test]
    fn factorize_examples() {
        let s = sieve(10_000_000);
        assert_eq!(s.factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert!(s.factorize(1).unwrap().is_empty());
        let primorial = s.factorize(9_699_690).unwrap();
        assert_eq!(primorial.pairs(), &[(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1)]);
        assert!(matches!(s.factorize(10_000_001), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn wide_factorization_beyond_table() {
        let s = sieve(1000);
        assert_eq!(s.factorize_wide(999_983).unwrap().pairs(), &[(999_983, 1)]);
        assert_eq!(s.factorize_wide(997 * 991).unwrap().pairs(), &[(991, 1), (997, 1)]);
        assert_eq!(s.factorize_wide(1 << 19).unwrap().pairs(), &[(2, 19)]);
        assert_eq!(s.factorize_wide(2 * 499_979).unwrap().pairs(), &[(2, 1), (499_979, 1)]);
        assert!(s.factorize_wide(1_000_001).is_err());
    }

    #[test]
    fn function_examples() {
        let s = sieve(1000);
        assert_eq!(s.big_omega(1).unwrap(), 0);
        assert_eq!(s.big_omega(12).unwrap(), 3);
        assert_eq!(s.big_omega(1024).unwrap(), 10);
        assert_eq!(s.liouville(1).unwrap(), 1);
        assert_eq!(s.liouville(12).unwrap(), -1);
        assert_eq!(s.liouville(36).unwrap(), 1);
        assert_eq!(s.mobius(1).unwrap(), 1);
        assert_eq!(s.mobius(30).unwrap(), -1);
        assert_eq!(s.mobius(12).unwrap(), 0);
        assert!(s.is_squarefree(30).unwrap());
        assert!(!s.is_squarefree(12).unwrap());
        assert!(s.is_squarefree(1).unwrap());
        assert_eq!(s.p_max(1).unwrap(), 1);
        assert_eq!(s.p_max(12).unwrap(), 3);
        assert_eq!(s.p_max(97).unwrap(), 97);
        assert_eq!(s.iterated_totient(7, 0).unwrap(), 7);
        assert_eq!(s.iterated_totient(10, 1).unwrap(), 4);
        assert_eq!(s.iterated_totient(10, 2).unwrap(), 2);
    }

    #[test]
    fn valuation_and_w() {
        assert_eq!(valuation(12, 2).unwrap(), 2);
        assert_eq!(valuation(12, 5).unwrap(), 0);
        assert_eq!(valuation(1, 2).unwrap(), 0);
        assert!(matches!(valuation(12, 4), Err(Error::Argument(_))));
        let s23 = PrimeSet::new([2, 3]).unwrap();
        assert_eq!(w_indicator(35, &s23), 1);
        assert_eq!(w_indicator(6, &s23), 0);
        let empty = PrimeSet::empty();
        assert!((1..200).all(|n| w_indicator(n, &empty) == 1));
    }

    #[test]
    fn value_overflow_is_an_error() {
        let f = Factorization::from_pairs([(2, 40), (3, 30)]).unwrap();
        assert!(matches!(f.value(), Err(Error::Overflow(_))));
        let g = Factorization::from_pairs([(2, 3), (3, 2)]).unwrap();
        assert_eq!(g.value().unwrap(), 72);
        assert!(Factorization::from_pairs([(3, 1), (2, 1)]).is_err());
    }

    #[test]
    fn integer_roots() {
        assert_eq!(iroot(0, 3), 0);
        assert_eq!(iroot(26, 3), 2);
        assert_eq!(iroot(27, 3), 3);
        assert_eq!(iroot(28, 3), 3);
        assert_eq!(iroot(u64::MAX, 2), 4_294_967_295);
        assert_eq!(iroot(1_000_000_000_000_000_000, 3), 1_000_000);
        assert_eq!(iroot(999_999_999_999_999_999, 3), 999_999);
        for x in 0..5000u64 {
            for k in 2..6 {
                let r = iroot(x, k);
                assert!(r.pow(k) <= x && (r + 1).pow(k) > x, "x={x} k={k}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn mobius_is_lambda_on_squarefree(n in 1u64..200_000) {
            let s = sieve(200_000);
            let mu = s.mobius(n).unwrap();
            let sq = i8::from(s.is_squarefree(n).unwrap());
            proptest::prop_assert_eq!(mu, sq * sq * s.liouville(n).unwrap());
        }

        #[test]
        fn omega_is_completely_additive(a in 1u64..1_000_000, b in 1u64..1_000_000) {
            let s = sieve(1_000_000);
            let ab = s.factorize_wide(a * b).unwrap();
            proptest::prop_assert_eq!(ab.big_omega(), s.big_omega(a).unwrap() + s.big_omega(b).unwrap());
            proptest::prop_assert_eq!(ab.value().unwrap(), a * b);
        }

        #[test]
        fn iroot_brackets(x in 0u64..u64::MAX, k in 1u32..8) {
            let r = iroot(x, k);
            proptest::prop_assert!(r.checked_pow(k).is_some_and(|v| v <= x));
            proptest::prop_assert!((r + 1).checked_pow(k).is_none_or(|v| v > x));
        }
    }
}
