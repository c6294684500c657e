use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{iroot, FactorSieve, Factorization};
use crate::error::{Error, Result};

/// Largest table the averaging context allocates for on-demand
/// factorization; larger arguments fall back to trial division by the
/// table's primes.
pub const DENSE_TABLE_CAP: u64 = 1 << 24;

/// Factorization backing for observables that look beyond Ω(n).
#[derive(Debug, Clone)]
pub struct Context {
    sieve: FactorSieve,
}

impl Context {
    /// A context able to factor every integer up to `max_argument`.
    ///
    /// With `dense` the table covers the arguments directly (up to
    /// [`DENSE_TABLE_CAP`]); otherwise it only reaches √max_argument.
    pub fn new(max_argument: u64, dense: bool) -> Result<Self> {
        let root = iroot(max_argument, 2) + 1;
        let limit = if dense { max_argument.min(DENSE_TABLE_CAP).max(root) } else { root };
        let sieve = FactorSieve::new(limit.max(2))?;
        if sieve.reach() < max_argument {
            return Err(Error::Capacity(format!("cannot factor arguments up to {max_argument}")));
        }
        Ok(Self { sieve })
    }

    pub fn from_sieve(sieve: FactorSieve) -> Self {
        Self { sieve }
    }

    pub fn sieve(&self) -> &FactorSieve {
        &self.sieve
    }

    /// A fully populated point for an arbitrary argument.
    pub fn point(&self, n: u64, horizon: f64) -> Result<Point<'_>> {
        if n == 0 {
            return Err(Error::Argument("observables are defined for n >= 1".into()));
        }
        let f = self.sieve.factorize_wide(n)?;
        Ok(Point { n, omega: f.big_omega(), largest_prime: f.largest_prime(), horizon, ctx: self })
    }
}

/// An integer n together with what the averaging loop already knows about
/// it, and the horizon N that normalized statistics are taken against.
#[derive(Debug, Clone, Copy)]
pub struct Point<'a> {
    pub n: u64,
    pub omega: u32,
    pub largest_prime: u64,
    pub horizon: f64,
    ctx: &'a Context,
}

impl<'a> Point<'a> {
    pub fn new(n: u64, omega: u32, largest_prime: u64, horizon: f64, ctx: &'a Context) -> Self {
        Self { n, omega, largest_prime, horizon, ctx }
    }

    pub fn context(&self) -> &'a Context {
        self.ctx
    }

    pub fn factorize(&self) -> Result<Factorization> {
        self.ctx.sieve.factorize_wide(self.n)
    }

    /// Point for another argument with the same horizon.
    pub fn at(&self, n: u64) -> Result<Point<'a>> {
        self.ctx.point(n, self.horizon)
    }
}

/// A bounded arithmetic function n ↦ a(n) ∈ C.
pub trait Observable: Send + Sync {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64>;

    /// Bound on |a(n)| over all n.
    fn sup_norm(&self) -> f64;

    /// Largest argument that evaluating n ≤ `n` may need factored.
    fn max_argument(&self, n: u64) -> Result<u64> {
        Ok(n)
    }

    /// Values depend on the point's horizon N (normalized statistics).
    fn horizon_dependent(&self) -> bool {
        false
    }

    /// Evaluation factors its argument, so a dense table pays off.
    fn needs_factorization(&self) -> bool {
        false
    }
}

impl<T: Observable + ?Sized> Observable for &T {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        (**self).eval(at)
    }
    fn sup_norm(&self) -> f64 {
        (**self).sup_norm()
    }
    fn max_argument(&self, n: u64) -> Result<u64> {
        (**self).max_argument(n)
    }
    fn horizon_dependent(&self) -> bool {
        (**self).horizon_dependent()
    }
    fn needs_factorization(&self) -> bool {
        (**self).needs_factorization()
    }
}

impl<T: Observable + ?Sized> Observable for Box<T> {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        (**self).eval(at)
    }
    fn sup_norm(&self) -> f64 {
        (**self).sup_norm()
    }
    fn max_argument(&self, n: u64) -> Result<u64> {
        (**self).max_argument(n)
    }
    fn horizon_dependent(&self) -> bool {
        (**self).horizon_dependent()
    }
    fn needs_factorization(&self) -> bool {
        (**self).needs_factorization()
    }
}

impl<T: Observable + ?Sized> Observable for Arc<T> {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        (**self).eval(at)
    }
    fn sup_norm(&self) -> f64 {
        (**self).sup_norm()
    }
    fn max_argument(&self, n: u64) -> Result<u64> {
        (**self).max_argument(n)
    }
    fn horizon_dependent(&self) -> bool {
        (**self).horizon_dependent()
    }
    fn needs_factorization(&self) -> bool {
        (**self).needs_factorization()
    }
}

/// a(n) = c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub Complex64);

impl Constant {
    pub fn real(c: f64) -> Self {
        Self(Complex64::new(c, 0.0))
    }
}

impl Observable for Constant {
    fn eval(&self, _: &Point<'_>) -> Result<Complex64> {
        Ok(self.0)
    }
    fn sup_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// An observable given by a closure over the point.
pub struct FnObservable<F> {
    f: F,
    sup: f64,
    factors: bool,
}

impl<F> FnObservable<F>
where
    F: Fn(&Point<'_>) -> Result<Complex64> + Send + Sync,
{
    /// `sup` must bound |f|; `factors` tells the averager whether f factors
    /// its argument.
    pub fn new(f: F, sup: f64, factors: bool) -> Self {
        Self { f, sup, factors }
    }
}

impl<F> Observable for FnObservable<F>
where
    F: Fn(&Point<'_>) -> Result<Complex64> + Send + Sync,
{
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        (self.f)(at)
    }
    fn sup_norm(&self) -> f64 {
        self.sup
    }
    fn needs_factorization(&self) -> bool {
        self.factors
    }
}

/// a(n^k · m) for a fixed inner observable.
///
/// Ω and p_max of the new argument come from those of n and m, so the
/// inner observable sees a complete point without any factoring.
pub struct Dilated<O> {
    inner: O,
    k: u32,
    m: u64,
    m_omega: u32,
    m_largest: u64,
}

impl<O: Observable> Dilated<O> {
    pub fn new(inner: O, k: u32, m: u64) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::Argument("dilation needs k >= 1 and m >= 1".into()));
        }
        let sieve = FactorSieve::new(iroot(m, 2).max(2) + 1)?;
        let f = sieve.factorize_wide(m)?;
        Ok(Self { inner, k, m, m_omega: f.big_omega(), m_largest: f.largest_prime() })
    }

    fn argument(&self, n: u64) -> Result<u64> {
        n.checked_pow(self.k).and_then(|v| v.checked_mul(self.m)).ok_or(Error::Overflow("dilated argument"))
    }
}

impl<O: Observable> Observable for Dilated<O> {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        let p = Point {
            n: self.argument(at.n)?,
            omega: self.k * at.omega + self.m_omega,
            largest_prime: at.largest_prime.max(self.m_largest),
            horizon: at.horizon,
            ctx: at.ctx,
        };
        self.inner.eval(&p)
    }
    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }
    fn max_argument(&self, n: u64) -> Result<u64> {
        self.inner.max_argument(self.argument(n)?)
    }
    fn horizon_dependent(&self) -> bool {
        self.inner.horizon_dependent()
    }
    fn needs_factorization(&self) -> bool {
        self.inner.needs_factorization()
    }
}

/// Seeded pseudo-random values in the closed unit disc, one per n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomDisc {
    seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomDisc {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn value(&self, n: u64) -> Complex64 {
        let a = splitmix64(self.seed ^ splitmix64(n));
        let b = splitmix64(a);
        let unit = |x: u64| (x >> 11) as f64 / (1u64 << 53) as f64;
        Complex64::from_polar(unit(a).sqrt(), std::f64::consts::TAU * unit(b))
    }
}

impl Observable for RandomDisc {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        Ok(self.value(at.n))
    }
    fn sup_norm(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_points_are_complete() {
        let ctx = Context::new(10_000, true).unwrap();
        let p = ctx.point(360, 1e4).unwrap();
        assert_eq!((p.omega, p.largest_prime), (6, 5));
        assert!(ctx.point(0, 1e4).is_err());
        let sparse = Context::new(1_000_000, false).unwrap();
        assert_eq!(sparse.point(999_983, 1e6).unwrap().omega, 1);
    }

    #[test]
    fn dilation_tracks_omega() {
        let ctx = Context::new(1_000_000, true).unwrap();
        let omega =
            FnObservable::new(|p: &Point<'_>| Ok(Complex64::new(p.omega as f64, p.largest_prime as f64)), 100.0, false);
        let d = Dilated::new(omega, 2, 12).unwrap();
        for n in 1..200u64 {
            let direct = ctx.point(n * n * 12, 1e6).unwrap();
            let got = d.eval(&ctx.point(n, 1e6).unwrap()).unwrap();
            assert_eq!(got, Complex64::new(direct.omega as f64, direct.largest_prime as f64), "n={n}");
        }
        assert_eq!(d.max_argument(100).unwrap(), 120_000);
    }

    #[test]
    fn random_disc_is_bounded_and_seeded() {
        let a = RandomDisc::new(7);
        let b = RandomDisc::new(8);
        assert!((1..10_000).all(|n| a.value(n).norm() <= 1.0));
        assert_eq!(a.value(5), RandomDisc::new(7).value(5));
        assert_ne!(a.value(5), b.value(5));
        let mean: Complex64 = (1..100_000).map(|n| a.value(n)).sum::<Complex64>() / 1e5;
        assert!(mean.norm() < 0.01);
    }
}
