use std::collections::BTreeMap;

use super::Angle;
use crate::arith::{is_prime, FactorSieve, Factorization};
use crate::error::{Error, Result};

/// Torus action S_n y = y + Σ_p v_p(n)·θ_p mod 1.
///
/// Primes outside the explicit set P₀ rotate by `default`. With the default
/// at zero this is the finitely generated action with generators P₀.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicativeSystem {
    angles: BTreeMap<u64, Angle>,
    default: Angle,
}

impl MultiplicativeSystem {
    /// θ_p for the listed primes, identity on all others.
    pub fn new<I: IntoIterator<Item = (u64, Angle)>>(angles: I) -> Result<Self> {
        Self::with_default(angles, Angle::ZERO)
    }

    pub fn with_default<I: IntoIterator<Item = (u64, Angle)>>(angles: I, default: Angle) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, theta) in angles {
            if !is_prime(p) {
                return Err(Error::Argument(format!("{p} is not prime")));
            }
            if map.insert(p, theta).is_some() {
                return Err(Error::Argument(format!("angle for {p} given twice")));
            }
        }
        Ok(Self { angles: map, default })
    }

    pub fn angle_of(&self, p: u64) -> Angle {
        self.angles.get(&p).copied().unwrap_or(self.default)
    }

    pub fn default_angle(&self) -> Angle {
        self.default
    }

    /// Only finitely many generators act non-trivially.
    pub fn finitely_generated(&self) -> bool {
        self.default == Angle::ZERO
    }

    pub fn act_factored(&self, y: Angle, f: &Factorization) -> Angle {
        f.pairs().iter().fold(y, |acc, &(p, e)| acc.add(self.angle_of(p).times(e as u64)))
    }

    /// S_n y from n and Ω(n) alone: only the primes of P₀ are divided out.
    pub fn act_with_omega(&self, y: Angle, n: u64, omega: u32) -> Angle {
        let mut acc = y.add(self.default.times(omega as u64));
        for (&p, &theta) in &self.angles {
            let mut m = n;
            let mut e = 0u64;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            if e > 0 {
                acc = acc.add(theta.sub(self.default).times(e));
            }
        }
        acc
    }
}

/// S_n y for n ≥ 1.
pub fn mult_act(sys: &MultiplicativeSystem, y: Angle, n: u64, sieve: &FactorSieve) -> Result<Angle> {
    if n == 0 {
        return Err(Error::Argument("the action is defined for n >= 1".into()));
    }
    Ok(sys.act_factored(y, &sieve.factorize_wide(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_examples() {
        let s = FactorSieve::new(1000).unwrap();
        let a = Angle::GOLDEN;
        let y = Angle::from_f64(0.3).unwrap();
        let two = MultiplicativeSystem::new([(2, a)]).unwrap();
        assert_eq!(mult_act(&two, y, 12, &s).unwrap(), y.add(a.times(2)));
        assert_eq!(mult_act(&two, y, 1, &s).unwrap(), y);
        let both = MultiplicativeSystem::new([(2, a), (3, a)]).unwrap();
        assert_eq!(mult_act(&both, y, 6, &s).unwrap(), y.add(a.times(2)));
        assert!(MultiplicativeSystem::new([(4, a)]).is_err());
    }

    #[test]
    fn action_law() {
        let s = FactorSieve::new(1_000_000).unwrap();
        let sys = MultiplicativeSystem::with_default(
            [(2, Angle::SQRT2_MINUS_ONE), (5, Angle::from_f64(0.1).unwrap())],
            Angle::GOLDEN,
        )
        .unwrap();
        let y = Angle::from_f64(0.7).unwrap();
        for n in (1..=1000u64).step_by(7) {
            for m in (1..=1000u64).step_by(11) {
                let direct = mult_act(&sys, y, n * m, &s).unwrap();
                let composed = mult_act(&sys, mult_act(&sys, y, m, &s).unwrap(), n, &s).unwrap();
                assert_eq!(direct, composed);
            }
        }
    }

    #[test]
    fn omega_shortcut_agrees() {
        let s = FactorSieve::new(100_000).unwrap();
        let sys = MultiplicativeSystem::with_default([(2, Angle::SQRT2_MINUS_ONE)], Angle::GOLDEN).unwrap();
        let y = Angle::ZERO;
        for n in 1..5000u64 {
            let omega = s.big_omega(n).unwrap();
            assert_eq!(sys.act_with_omega(y, n, omega), mult_act(&sys, y, n, &s).unwrap());
        }
    }
}
