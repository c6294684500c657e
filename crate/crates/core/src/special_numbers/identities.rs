//! Exact convolution identities for μ²w_S and the matching Dirichlet series.

use serde::{Deserialize, Serialize};

use super::sieve_constants;
use crate::arith::{FactorSieve, PrimeSet};
use crate::error::{Error, Result};
use crate::numeric::Compensated;

/// Outcome of checking an exact identity for every n ≤ N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub primes: PrimeSet,
    pub checked: u64,
    /// Total failures and the first few offending n.
    pub failures: u64,
    pub first_failures: Vec<u64>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn mobius_table(sieve: &FactorSieve, limit: u64) -> Result<Vec<i8>> {
    if limit > sieve.limit() {
        return Err(Error::OutOfRange { value: limit, limit: sieve.limit() });
    }
    let mut mu = vec![0i8; limit as usize + 1];
    for n in 1..=limit {
        mu[n as usize] = sieve.mobius(n)?;
    }
    Ok(mu)
}

fn compare(name: &str, primes: &PrimeSet, lhs: &[i64], rhs: impl Fn(usize) -> i64) -> IdentityCheck {
    let mut failures = 0;
    let mut first_failures = Vec::new();
    for (n, &v) in lhs.iter().enumerate().skip(1) {
        if v != rhs(n) {
            failures += 1;
            if first_failures.len() < 10 {
                first_failures.push(n as u64);
            }
        }
    }
    IdentityCheck { name: name.into(), primes: primes.clone(), checked: lhs.len() as u64 - 1, failures, first_failures }
}

/// μ²(n)w_S(n) = Σ_{d²|n} μ(d)w_S(d)w_S(n/d²) for all n ≤ N.
pub fn check_convolution(sieve: &FactorSieve, limit: u64, primes: &PrimeSet) -> Result<IdentityCheck> {
    let mu = mobius_table(sieve, limit)?;
    let w = |n: u64| i64::from(primes.is_coprime(n));
    let mut rhs = vec![0i64; limit as usize + 1];
    let mut d = 1u64;
    while d * d <= limit {
        let coef = mu[d as usize] as i64 * w(d);
        if coef != 0 {
            for j in 1..=limit / (d * d) {
                rhs[(d * d * j) as usize] += coef * w(j);
            }
        }
        d += 1;
    }
    Ok(compare("convolution", primes, &rhs, |n| {
        let m = mu[n] as i64;
        m * m * w(n as u64)
    }))
}

/// (μw_S) ∗ w_S = 1_{n=1} for all n ≤ N.
pub fn check_dirichlet_inverse(sieve: &FactorSieve, limit: u64, primes: &PrimeSet) -> Result<IdentityCheck> {
    let mu = mobius_table(sieve, limit)?;
    let w = |n: u64| i64::from(primes.is_coprime(n));
    let mut conv = vec![0i64; limit as usize + 1];
    for d in 1..=limit {
        let coef = mu[d as usize] as i64 * w(d);
        if coef == 0 {
            continue;
        }
        for j in 1..=limit / d {
            conv[(d * j) as usize] += coef * w(j);
        }
    }
    Ok(compare("dirichlet-inverse", primes, &conv, |n| i64::from(n == 1)))
}

/// Partial sums of the two Dirichlet series at s = 2 next to their limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheck {
    pub primes: PrimeSet,
    pub terms: u64,
    /// Σ_{n≤M} w_S(n)/n²
    pub w_sum: f64,
    /// β(S)ζ(2)
    pub w_limit: f64,
    /// Σ_{n≤M} μ(n)w_S(n)/n²
    pub mu_sum: f64,
    /// 1/(β(S)ζ(2))
    pub mu_limit: f64,
}

impl SeriesCheck {
    /// Both partial sums within `tol` of their limits.
    pub fn within(&self, tol: f64) -> bool {
        (self.w_sum - self.w_limit).abs() <= tol && (self.mu_sum - self.mu_limit).abs() <= tol
    }
}

pub fn check_series(sieve: &FactorSieve, terms: u64, primes: &PrimeSet) -> Result<SeriesCheck> {
    let mu = mobius_table(sieve, terms)?;
    let beta = sieve_constants(primes)?.beta;
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    let mut w_sum = Compensated::new();
    let mut mu_sum = Compensated::new();
    // smallest terms first
    for n in (1..=terms).rev() {
        if !primes.is_coprime(n) {
            continue;
        }
        let inv = 1.0 / (n as f64 * n as f64);
        w_sum.add(inv);
        mu_sum.add(mu[n as usize] as f64 * inv);
    }
    Ok(SeriesCheck {
        primes: primes.clone(),
        terms,
        w_sum: w_sum.value(),
        w_limit: beta * zeta2,
        mu_sum: mu_sum.value(),
        mu_limit: 1.0 / (beta * zeta2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_small_range() {
        let sieve = FactorSieve::new(5000).unwrap();
        let all = PrimeSet::new([2, 3, 5, 7]).unwrap();
        for s in all.subsets() {
            assert!(check_convolution(&sieve, 5000, &s).unwrap().passed(), "S={s}");
            assert!(check_dirichlet_inverse(&sieve, 5000, &s).unwrap().passed(), "S={s}");
        }
    }

    #[test]
    fn broken_identity_is_reported() {
        let check = compare("x", &PrimeSet::empty(), &[0, 1, 5, 3], |n| n as i64);
        assert_eq!(check.failures, 1);
        assert_eq!(check.first_failures, [2]);
    }

    #[test]
    fn series_converge() {
        let sieve = FactorSieve::new(100_000).unwrap();
        for s in PrimeSet::new([2, 3]).unwrap().subsets() {
            assert!(check_series(&sieve, 100_000, &s).unwrap().within(2e-5), "S={s}");
        }
    }

    #[test]
    fn beyond_table_is_an_error() {
        let sieve = FactorSieve::new(100).unwrap();
        assert!(check_convolution(&sieve, 101, &PrimeSet::empty()).is_err());
    }
}
