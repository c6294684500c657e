//! Squarefree and k-full integers: enumeration, canonical forms, counts and
//! the Euler-product constants attached to them.

mod constants;
pub mod identities;
mod kfull;

pub use constants::{
    bateman_grosswald_estimate, erdos_szekeres_constant, grosswald_coefficients, EulerProduct, DEFAULT_PRIME_CUTOFF,
};
pub use kfull::{count_kfull, enumerate_kfull, enumerate_kfull_forms, kfull_decode, kfull_encode, KFullForm};

use num_rational::Ratio;
use num_traits::CheckedMul;
use serde::{Deserialize, Serialize};

use crate::arith::segment::{Segment, SegmentedSieve, DEFAULT_SEGMENT_LEN};
use crate::arith::{iroot, FactorSieve, PrimeSet};
use crate::error::{Error, Result};

/// Products over a finite prime set S, exact and in double precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveConstants {
    pub primes: PrimeSet,
    /// α(S) = ∏ p/(p+1)
    pub alpha: f64,
    /// β(S) = ∏ (p²−1)/p²
    pub beta: f64,
    /// α₀(S) = ∏ (p−1)/p
    pub alpha0: f64,
    /// P(S) = ∏ p
    pub p_s: u64,
    #[serde(skip)]
    exact: ExactConstants,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct ExactConstants {
    alpha: Ratio<u128>,
    beta: Ratio<u128>,
    alpha0: Ratio<u128>,
}

impl SieveConstants {
    pub fn alpha_exact(&self) -> Ratio<u128> {
        self.exact.alpha
    }

    pub fn beta_exact(&self) -> Ratio<u128> {
        self.exact.beta
    }

    pub fn alpha0_exact(&self) -> Ratio<u128> {
        self.exact.alpha0
    }
}

fn ratio_to_f64(r: Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn checked_product(acc: Ratio<u128>, num: u128, den: u128) -> Result<Ratio<u128>> {
    acc.checked_mul(&Ratio::new(num, den)).ok_or(Error::Overflow("sieve constant"))
}

/// α(S), β(S), α₀(S) and P(S). Membership of S is validated by [`PrimeSet`].
pub fn sieve_constants(primes: &PrimeSet) -> Result<SieveConstants> {
    let one = Ratio::from_integer(1u128);
    let mut exact = ExactConstants { alpha: one, beta: one, alpha0: one };
    let mut p_s = 1u64;
    for &p in primes.as_slice() {
        let q = p as u128;
        exact.alpha = checked_product(exact.alpha, q, q + 1)?;
        exact.beta = checked_product(exact.beta, q * q - 1, q * q)?;
        exact.alpha0 = checked_product(exact.alpha0, q - 1, q)?;
        p_s = p_s.checked_mul(p).ok_or(Error::Overflow("P(S)"))?;
    }
    Ok(SieveConstants {
        primes: primes.clone(),
        alpha: ratio_to_f64(exact.alpha),
        beta: ratio_to_f64(exact.beta),
        alpha0: ratio_to_f64(exact.alpha0),
        p_s,
        exact,
    })
}

/// 1/ζ(2) = 6/π².
pub fn zeta2_inverse() -> f64 {
    6.0 / (std::f64::consts::PI * std::f64::consts::PI)
}

/// Squarefree n ≤ `limit` coprime to every prime in `excluded`, ascending.
pub fn enumerate_squarefree(limit: u64, excluded: &PrimeSet) -> Result<SquarefreeIter> {
    let sieve = SegmentedSieve::new(limit, DEFAULT_SEGMENT_LEN.min(limit.max(1)))?;
    let windows = sieve.windows();
    Ok(SquarefreeIter { sieve, excluded: excluded.clone(), windows: windows.into_iter(), current: None, pos: 0 })
}

/// Iterator returned by [`enumerate_squarefree`]; sieves one window at a time.
#[derive(Debug)]
pub struct SquarefreeIter {
    sieve: SegmentedSieve,
    excluded: PrimeSet,
    windows: std::vec::IntoIter<(u64, u64)>,
    current: Option<Segment>,
    pos: usize,
}

impl Iterator for SquarefreeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(seg) = &self.current {
                while self.pos < seg.len() {
                    let i = self.pos;
                    self.pos += 1;
                    let n = seg.start() + i as u64;
                    if seg.mobius_at(i) != 0 && self.excluded.is_coprime(n) {
                        return Some(n);
                    }
                }
            }
            let (a, b) = self.windows.next()?;
            // the sieve's own primes always cover its windows
            self.current = Some(self.sieve.segment(a, b).expect("window inside sieve range"));
            self.pos = 0;
        }
    }
}

/// Φ_S(x) = #{n ≤ x : w_S(n) = 1} by inclusion–exclusion over divisors of P(S).
fn coprime_count(x: u64, excluded: &PrimeSet) -> i128 {
    excluded
        .subsets()
        .iter()
        .map(|e| {
            let d: u128 = e.as_slice().iter().map(|&p| p as u128).product();
            let sign = if e.len() % 2 == 0 { 1 } else { -1 };
            sign * (x as u128 / d) as i128
        })
        .sum()
}

/// #{n ≤ N : μ²(n) w_S(n) = 1}, exactly.
///
/// Uses μ²w_S = Σ_{d²|n} μ(d)w_S(d)w_S(n/d), so only μ up to √N is needed.
pub fn squarefree_count(limit: u64, excluded: &PrimeSet) -> Result<u64> {
    if limit == 0 {
        return Err(Error::Argument("N must be positive".into()));
    }
    let root = iroot(limit, 2);
    let sieve = FactorSieve::new(root.max(2))?;
    let mut total: i128 = 0;
    for d in 1..=root {
        let mu = sieve.mobius(d)?;
        if mu == 0 || !excluded.is_coprime(d) {
            continue;
        }
        total += mu as i128 * coprime_count(limit / (d * d), excluded);
    }
    Ok(total as u64)
}

/// (1/N) Σ_{n≤N} μ²(n) w_S(n).
pub fn squarefree_density_partial(limit: u64, excluded: &PrimeSet) -> Result<f64> {
    Ok(squarefree_count(limit, excluded)? as f64 / limit as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ps: &[u64]) -> PrimeSet {
        PrimeSet::new(ps.iter().copied()).unwrap()
    }

    #[test]
    fn constants_examples() {
        let empty = sieve_constants(&PrimeSet::empty()).unwrap();
        assert_eq!((empty.alpha, empty.beta, empty.alpha0, empty.p_s), (1.0, 1.0, 1.0, 1));
        let two = sieve_constants(&set(&[2])).unwrap();
        assert_eq!(two.alpha_exact(), Ratio::new(2, 3));
        assert_eq!(two.beta_exact(), Ratio::new(3, 4));
        assert_eq!(two.alpha0_exact(), Ratio::new(1, 2));
        let both = sieve_constants(&set(&[2, 3])).unwrap();
        assert_eq!(both.alpha_exact(), Ratio::new(1, 2));
        assert_eq!(both.p_s, 6);
    }

    #[test]
    fn zeta2_inverse_value() {
        let z = zeta2_inverse();
        assert!((z - 0.607_927_101_854_026_6).abs() < 1e-16);
        assert!((z * std::f64::consts::PI.powi(2) / 6.0 - 1.0).abs() < 1e-15);
        assert!(((2.0 / 3.0) * z - 0.405_284_734_569_351).abs() < 1e-14);
    }

    #[test]
    fn squarefree_enumeration_examples() {
        let v: Vec<u64> = enumerate_squarefree(10, &PrimeSet::empty()).unwrap().collect();
        assert_eq!(v, [1, 2, 3, 5, 6, 7, 10]);
        let v: Vec<u64> = enumerate_squarefree(10, &set(&[2])).unwrap().collect();
        assert_eq!(v, [1, 3, 5, 7]);
        assert_eq!(enumerate_squarefree(100, &PrimeSet::empty()).unwrap().count(), 61);
    }

    #[test]
    fn density_examples() {
        assert_eq!(squarefree_density_partial(100, &PrimeSet::empty()).unwrap(), 0.61);
        assert_eq!(squarefree_density_partial(10, &set(&[2])).unwrap(), 0.4);
        let d = squarefree_density_partial(1_000_000, &PrimeSet::empty()).unwrap();
        assert!((d - 0.607_927).abs() < 5e-3);
    }

    #[test]
    fn count_matches_enumeration() {
        for s in set(&[2, 3, 5]).subsets() {
            for n in [1u64, 2, 17, 999, 20_000] {
                let direct = enumerate_squarefree(n, &s).unwrap().count() as u64;
                assert_eq!(squarefree_count(n, &s).unwrap(), direct, "N={n} S={s}");
            }
        }
    }
}
