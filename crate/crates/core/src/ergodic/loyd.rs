use num_complex::Complex64;

use super::normal::{CompactFunction, NormalizerParams};
use super::observable::{Observable, Point};
use crate::arith::PrimeFamily;
use crate::error::Result;

/// Which normalized statistic F is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// (Ω(n) − kL)/(k√L), k ≥ 1.
    ErdosKac { k: u32 },
    /// (Ω(φ_k(n)) − a_k L^{k+1})/(b_k L^{k+1/2}), k ≥ 0.
    Totient { k: u32 },
}

impl Statistic {
    fn k(self) -> u32 {
        match self {
            Self::ErdosKac { k } | Self::Totient { k } => k,
        }
    }

    /// Value of the statistic at a point under the given normalizers.
    pub fn value(self, at: &Point<'_>, params: &NormalizerParams) -> Result<f64> {
        match self {
            Self::ErdosKac { .. } => params.ek(at.omega),
            Self::Totient { k } => {
                let sieve = at.context().sieve();
                let phi = sieve.iterated_totient(at.n, k)?;
                Ok(params.bkw(sieve.big_omega(phi)?))
            }
        }
    }
}

/// n ↦ 1_{p_max(n) ∈ T} · F(statistic(n)) · a(n).
///
/// Normalizers follow the horizon carried by each point unless fixed.
#[derive(Debug, Clone)]
pub struct LoydObservable<O> {
    f: CompactFunction,
    statistic: Statistic,
    inner: O,
    family: Option<PrimeFamily>,
    fixed: Option<NormalizerParams>,
}

impl<O: Observable> LoydObservable<O> {
    pub fn new(f: CompactFunction, statistic: Statistic, inner: O) -> Result<Self> {
        if let Statistic::ErdosKac { k: 0 } = statistic {
            return Err(crate::Error::Argument("the k-full statistic needs k >= 1".into()));
        }
        Ok(Self { f, statistic, inner, family: None, fixed: None })
    }

    pub fn with_family(mut self, family: PrimeFamily) -> Self {
        self.family = Some(family);
        self
    }

    /// Pins the normalizers instead of reading the horizon from each point.
    pub fn with_params(mut self, params: NormalizerParams) -> Self {
        // the statistic decides k; only the horizon is taken from `params`
        self.fixed = NormalizerParams::with_loglog(self.statistic.k(), params.loglog)
            .ok()
            .map(|p| NormalizerParams { horizon: params.horizon, ..p });
        self
    }

    pub fn statistic(&self) -> Statistic {
        self.statistic
    }
}

impl<O: Observable> Observable for LoydObservable<O> {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        if let Some(t) = &self.family {
            if !t.admits(at.n, at.largest_prime) {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        let params = match self.fixed {
            Some(p) => p,
            None => NormalizerParams::new(self.statistic.k(), at.horizon)?,
        };
        let weight = self.f.eval(self.statistic.value(at, &params)?);
        if weight == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.inner.eval(at)? * weight)
    }
    fn sup_norm(&self) -> f64 {
        self.f.sup_norm() * self.inner.sup_norm()
    }
    fn max_argument(&self, n: u64) -> Result<u64> {
        Ok(self.inner.max_argument(n)?.max(n))
    }
    fn horizon_dependent(&self) -> bool {
        self.fixed.is_none() || self.inner.horizon_dependent()
    }
    fn needs_factorization(&self) -> bool {
        matches!(self.statistic, Statistic::Totient { .. }) || self.inner.needs_factorization()
    }
}

pub fn loyd_observable<O: Observable>(
    f: CompactFunction,
    statistic: Statistic,
    inner: O,
    family: Option<PrimeFamily>,
) -> Result<LoydObservable<O>> {
    let obs = LoydObservable::new(f, statistic, inner)?;
    Ok(match family {
        Some(t) => obs.with_family(t),
        None => obs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{br_observable, AdditiveSystem, State, StateFunction};
    use crate::ergodic::{Constant, Context};

    fn one() -> CompactFunction {
        CompactFunction::by_name("one").unwrap()
    }

    #[test]
    fn trivial_weight_leaves_inner_unchanged() {
        let ctx = Context::new(10_000, true).unwrap();
        let inner =
            br_observable(&AdditiveSystem::golden(), &State::point(0.0).unwrap(), &StateFunction::cos(1)).unwrap();
        let plain = loyd_observable(one(), Statistic::ErdosKac { k: 1 }, &inner, None).unwrap();
        let all = loyd_observable(one(), Statistic::ErdosKac { k: 1 }, &inner, Some(PrimeFamily::all())).unwrap();
        for n in 2..5000 {
            let p = ctx.point(n, 1e4).unwrap();
            assert_eq!(plain.eval(&p).unwrap(), inner.eval(&p).unwrap());
            assert_eq!(all.eval(&p).unwrap(), inner.eval(&p).unwrap());
        }
    }

    #[test]
    fn pure_erdos_kac_functional() {
        let ctx = Context::new(10_000, true).unwrap();
        let f = CompactFunction::unit_hat();
        let obs = loyd_observable(f.clone(), Statistic::ErdosKac { k: 1 }, Constant::real(1.0), None).unwrap();
        let params = NormalizerParams::new(1, 1e4).unwrap();
        for n in 1..2000 {
            let p = ctx.point(n, 1e4).unwrap();
            assert_eq!(obs.eval(&p).unwrap().re, f.eval(params.ek(p.omega).unwrap()));
        }
        assert!(obs.horizon_dependent());
        assert!(!obs.clone().with_params(params).horizon_dependent());
    }

    #[test]
    fn family_filter_drops_one_and_other_primes() {
        let ctx = Context::new(1000, true).unwrap();
        let t = PrimeFamily::one_mod_four();
        let obs = loyd_observable(one(), Statistic::ErdosKac { k: 1 }, Constant::real(1.0), Some(t)).unwrap();
        assert_eq!(obs.eval(&ctx.point(1, 1e3).unwrap()).unwrap().re, 0.0);
        assert_eq!(obs.eval(&ctx.point(15, 1e3).unwrap()).unwrap().re, 1.0);
        assert_eq!(obs.eval(&ctx.point(21, 1e3).unwrap()).unwrap().re, 0.0);
    }

    #[test]
    fn totient_statistic_factors() {
        let obs = loyd_observable(one(), Statistic::Totient { k: 1 }, Constant::real(1.0), None).unwrap();
        assert!(obs.needs_factorization());
        assert!(loyd_observable(one(), Statistic::ErdosKac { k: 0 }, Constant::real(1.0), None).is_err());
    }
}
