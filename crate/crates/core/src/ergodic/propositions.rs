//! Finite-N residuals of the squarefree and k-full decompositions, and the
//! totient shift bound.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::average::{restricted_average_with, AverageOptions, Restriction};
use super::observable::{Context, Dilated, Observable};
use crate::arith::{gcd, iroot, FactorSieve, Factorization, PrimeSet};
use crate::error::{Error, Result};
use crate::numeric::ComplexSum;

/// Σ_{n ≤ count, n coprime to `coprime`} a(n^k · mult), as a raw sum.
fn dilated_sum<O: Observable>(
    a: &O,
    k: u32,
    mult: u64,
    count: u64,
    coprime: Option<&PrimeSet>,
    ctx: &Context,
    horizon: f64,
) -> Result<ComplexSum> {
    let d = Dilated::new(a, k, mult)?;
    let mut acc = ComplexSum::new();
    for n in 1..=count {
        if coprime.is_some_and(|s| !s.is_coprime(n)) {
            continue;
        }
        acc.add(d.eval(&ctx.point(n, horizon)?)?);
    }
    Ok(acc)
}

/// |(1/N)Σ μ²w_S a − Σ_{d≤D} μ(d)w_S(d)/d² · 𝔼_{n≤N/d²} w_S(n)a(d²n)|.
pub fn proposition3_residual<O: Observable>(a: &O, excluded: &PrimeSet, limit: u64, d_max: u64) -> Result<f64> {
    let (lhs, rhs) = proposition3_sides(a, excluded, limit, d_max)?;
    Ok((lhs - rhs).norm())
}

/// Both sides of the truncated squarefree decomposition. 𝔼 over n ≤ x
/// divides by ⌊x⌋.
pub fn proposition3_sides<O: Observable>(
    a: &O,
    excluded: &PrimeSet,
    limit: u64,
    d_max: u64,
) -> Result<(Complex64, Complex64)> {
    if limit == 0 {
        return Err(Error::Argument("N must be positive".into()));
    }
    if d_max == 0 || d_max > iroot(limit, 2) {
        return Err(Error::Argument(format!("D must lie in [1, sqrt N], got {d_max}")));
    }
    let lhs = restricted_average_with(
        a,
        &Restriction::squarefree(excluded.clone(), None),
        &AverageOptions::new(vec![limit]),
    )?
    .final_value();
    let ctx = Context::new(a.max_argument(limit)?, a.needs_factorization())?;
    let small = FactorSieve::new(d_max.max(2))?;
    let horizon = limit as f64;
    let mut rhs = ComplexSum::new();
    for d in 1..=d_max {
        let mu = small.mobius(d)?;
        if mu == 0 || !excluded.is_coprime(d) {
            continue;
        }
        let count = limit / (d * d);
        let sum = dilated_sum(a, 1, d * d, count, Some(excluded), &ctx, horizon)?;
        rhs.add(sum.value() * (f64::from(mu) / ((d * d) as f64 * count as f64)));
    }
    Ok((lhs, rhs.value()))
}

/// Largest D_i allowed for a k-full truncation: D^{(k−1)(k+i)} ≤ N.
pub fn proposition5_range(k: u32, i: u32, limit: u64) -> u64 {
    iroot(limit, (k - 1) * (k + i))
}

/// |(1/N^{1/k})Σ_{k-full n ≤ N} a(n) − Σ_tuples (∏μ²(n_i)/∏n_i^{1+i/k})·𝔼_{m≤V_k} a(m^k ∏n_i^{k+i})|
/// over pairwise coprime squarefree n_i ≤ D_i, with V_k = (N/∏n_i^{k+i})^{1/k}.
pub fn proposition5_residual<O: Observable>(a: &O, k: u32, limit: u64, bounds: &[u64]) -> Result<f64> {
    let (lhs, rhs) = proposition5_sides(a, k, limit, bounds)?;
    Ok((lhs - rhs).norm())
}

/// Both sides of the truncated k-full decomposition; 𝔼 over m ≤ V_k
/// divides by ⌊V_k⌋.
pub fn proposition5_sides<O: Observable>(a: &O, k: u32, limit: u64, bounds: &[u64]) -> Result<(Complex64, Complex64)> {
    if k < 2 {
        return Err(Error::Argument(format!("k-full decomposition needs k >= 2, got {k}")));
    }
    if bounds.len() != (k - 1) as usize {
        return Err(Error::Argument(format!("expected {} truncation bounds, got {}", k - 1, bounds.len())));
    }
    for (i, &d) in bounds.iter().enumerate() {
        let top = proposition5_range(k, i as u32 + 1, limit);
        if d == 0 || d > top {
            return Err(Error::Argument(format!("D_{} must lie in [1, {top}], got {d}", i + 1)));
        }
    }
    let lhs = restricted_average_with(
        a,
        &Restriction::kfull(k, super::Normalization::PerRoot)?,
        &AverageOptions::new(vec![limit]),
    )?
    .final_value();
    let ctx = Context::new(a.max_argument(limit)?, a.needs_factorization())?;
    let small = FactorSieve::new(bounds.iter().copied().max().unwrap_or(2).max(2))?;
    let mut rhs = ComplexSum::new();
    let mut tuple = Vec::with_capacity(bounds.len());
    let mut visit = |parts: &[u64]| -> Result<()> {
        let mut p = 1u64;
        let mut weight = 1.0;
        for (i, &n) in parts.iter().enumerate() {
            let i = i as u32 + 1;
            p = match n.checked_pow(k + i).and_then(|v| v.checked_mul(p)) {
                Some(v) if v <= limit => v,
                _ => return Ok(()),
            };
            weight /= (n as f64).powf(1.0 + f64::from(i) / f64::from(k));
        }
        let count = iroot(limit / p, k);
        if count == 0 {
            return Ok(());
        }
        let sum = dilated_sum(a, k, p, count, None, &ctx, limit as f64)?;
        rhs.add(sum.value() * (weight / count as f64));
        Ok(())
    };
    walk_tuples(&small, bounds, 1, &mut tuple, &mut visit)?;
    Ok((lhs, rhs.value()))
}

/// Pairwise coprime squarefree tuples with n_i ≤ bounds[i].
fn walk_tuples<F: FnMut(&[u64]) -> Result<()>>(
    sieve: &FactorSieve,
    bounds: &[u64],
    used: u64,
    tuple: &mut Vec<u64>,
    visit: &mut F,
) -> Result<()> {
    let i = tuple.len();
    if i == bounds.len() {
        return visit(tuple);
    }
    for n in 1..=bounds[i] {
        if !sieve.is_squarefree(n)? || gcd(n, used) != 1 {
            continue;
        }
        tuple.push(n);
        walk_tuples(sieve, bounds, used.saturating_mul(n), tuple, visit)?;
        tuple.pop();
    }
    Ok(())
}

type Exponents = BTreeMap<u64, u64>;

fn exponents(f: &Factorization) -> Exponents {
    f.pairs().iter().map(|&(p, e)| (p, u64::from(e))).collect()
}

/// One step of φ (or of φ̃(x) = φ(x)·x when `tilde`) on an exponent map.
fn totient_step(x: &Exponents, tilde: bool, sieve: &FactorSieve) -> Result<Exponents> {
    let mut out = Exponents::new();
    for (&p, &e) in x {
        let own = e - 1 + if tilde { e } else { 0 };
        if own > 0 {
            *out.entry(p).or_default() += own;
        }
        if p > 2 {
            for &(q, f) in sieve.factorize_wide(p - 1)?.pairs() {
                *out.entry(q).or_default() += u64::from(f);
            }
        }
    }
    Ok(out)
}

/// Ω of the k-th iterate of φ (or φ̃), without forming the integer.
pub fn iterated_totient_omega(n: u64, k: u32, tilde: bool, sieve: &FactorSieve) -> Result<u64> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    let mut x = exponents(&sieve.factorize_wide(n)?);
    for _ in 0..k {
        x = totient_step(&x, tilde, sieve)?;
    }
    Ok(x.values().sum())
}

/// Whether 0 ≤ Ω(φ_k(mn)) − Ω(φ_k(n)) ≤ Ω(φ̃_k(m)).
pub fn totient_shift_bound_check(k: u32, m: u64, n: u64, sieve: &FactorSieve) -> Result<bool> {
    let mn = m.checked_mul(n).ok_or(Error::Overflow("mn"))?;
    let shifted = iterated_totient_omega(mn, k, false, sieve)?;
    let base = iterated_totient_omega(n, k, false, sieve)?;
    let bound = iterated_totient_omega(m, k, true, sieve)?;
    Ok(shifted >= base && shifted - base <= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::{Constant, RandomDisc};

    #[test]
    fn squarefree_residual_examples() {
        let one = Constant::real(1.0);
        let r = proposition3_residual(&one, &PrimeSet::empty(), 10_000, 100).unwrap();
        assert!(r <= 10.0 * (0.01 + 0.01), "{r}");
        let zero = Constant::real(0.0);
        assert_eq!(proposition3_residual(&zero, &PrimeSet::empty(), 10_000, 10).unwrap(), 0.0);
        assert!(proposition3_residual(&one, &PrimeSet::empty(), 10_000, 101).is_err());
        assert!(proposition3_residual(&one, &PrimeSet::empty(), 10_000, 0).is_err());
    }

    #[test]
    fn squarefree_residual_full_range() {
        let s = PrimeSet::new([3]).unwrap();
        for n in [10_000u64, 40_000] {
            let r = proposition3_residual(&RandomDisc::new(11), &s, n, iroot(n, 2)).unwrap();
            assert!(r <= 20.0 / (n as f64).sqrt(), "N={n}: {r}");
        }
    }

    #[test]
    fn kfull_residual_examples() {
        let one = Constant::real(1.0);
        let r = proposition5_residual(&one, 2, 1_000_000, &[10]).unwrap();
        assert!(r <= 10.0 * (10f64.powf(-0.5) + 0.1), "{r}");
        assert_eq!(proposition5_residual(&Constant::real(0.0), 2, 1_000_000, &[10]).unwrap(), 0.0);
        assert!(proposition5_residual(&one, 2, 1_000_000, &[101]).is_err());
        assert!(proposition5_residual(&one, 3, 1_000_000, &[2]).is_err());
        let r3 = proposition5_residual(&RandomDisc::new(3), 3, 1_000_000, &[2, 1]).unwrap();
        assert!(r3.is_finite());
    }

    #[test]
    fn totient_omega_matches_direct() {
        let s = FactorSieve::new(100_000).unwrap();
        for n in 1..3000u64 {
            for k in 0..4 {
                let direct = s.big_omega(s.iterated_totient(n, k).unwrap()).unwrap();
                assert_eq!(iterated_totient_omega(n, k, false, &s).unwrap(), u64::from(direct));
            }
        }
    }

    #[test]
    fn totient_shift_examples() {
        let s = FactorSieve::new(10_000).unwrap();
        for m in 1..40u64 {
            for n in 1..40u64 {
                let diff = s.big_omega(m * n).unwrap() - s.big_omega(n).unwrap();
                assert_eq!(diff, s.big_omega(m).unwrap());
                assert!(totient_shift_bound_check(0, m, n, &s).unwrap());
            }
        }
        assert!(totient_shift_bound_check(1, 6, 35, &s).unwrap());
        for n in 1..200 {
            assert!(totient_shift_bound_check(2, 1, n, &s).unwrap());
        }
    }
}
