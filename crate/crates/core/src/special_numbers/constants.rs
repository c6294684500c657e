use serde::{Deserialize, Serialize};

use crate::arith::FactorSieve;
use crate::error::{Error, Result};
use crate::numeric::{exp_integral_e1, zeta, Compensated};

/// Default prime cutoff for truncated Euler products.
pub const DEFAULT_PRIME_CUTOFF: u64 = 1_000_000;

/// A truncated Euler product together with an estimate of the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub k: u32,
    pub cutoff: u64,
    /// Product over primes p ≤ cutoff.
    pub partial: f64,
    /// Estimated factor contributed by primes above the cutoff.
    pub tail: f64,
}

impl EulerProduct {
    pub fn value(&self) -> f64 {
        self.partial * self.tail
    }
}

/// c_k = ∏_p (1 + Σ_{m=k+1}^{2k−1} p^{−m/k}).
///
/// The product runs over p ≤ cutoff. For the rest, log(1 + x) ≈ x and
/// Σ_{p>X} p^{−s} ≈ ∫_X^∞ t^{−s}/log t dt = E1((s−1) log X).
pub fn erdos_szekeres_constant(k: u32, prime_cutoff: u64) -> Result<EulerProduct> {
    if k < 2 {
        return Err(Error::Argument(format!("k must be at least 2, got {k}")));
    }
    if prime_cutoff < 2 {
        return Err(Error::Argument("prime cutoff must be at least 2".into()));
    }
    let sieve = FactorSieve::new(prime_cutoff)?;
    let exponents: Vec<f64> = (k + 1..=2 * k - 1).map(|m| m as f64 / k as f64).collect();
    let mut log_sum = Compensated::new();
    for &p in sieve.primes() {
        let p = p as f64;
        let local: f64 = exponents.iter().map(|&s| p.powf(-s)).sum();
        log_sum.add(local.ln_1p());
    }
    let log_x = (prime_cutoff as f64).ln();
    let tail_log: f64 = exponents.iter().map(|&s| exp_integral_e1((s - 1.0) * log_x)).sum();
    Ok(EulerProduct { k, cutoff: prime_cutoff, partial: log_sum.value().exp(), tail: tail_log.exp() })
}

/// (A, B) = (ζ(3/2)/ζ(3), ζ(2/3)/ζ(2)).
pub fn grosswald_coefficients() -> (f64, f64) {
    (zeta(1.5) / zeta(3.0), zeta(2.0 / 3.0) / zeta(2.0))
}

/// A·x^{1/2} + B·x^{1/3}, the two main terms of Q₂(x).
pub fn bateman_grosswald_estimate(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::Argument(format!("x must be at least 1, got {x}")));
    }
    let (a, b) = grosswald_coefficients();
    Ok(a * x.sqrt() + b * x.cbrt())
}
