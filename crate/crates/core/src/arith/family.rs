use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Predicate = Arc<dyn Fn(u64) -> bool + Send + Sync>;

#[derive(Clone)]
enum Membership {
    All,
    Residue { modulus: u64, residue: u64 },
    Custom(Predicate),
}

/// A family of primes T with its claimed relative density δ(T) among primes.
///
/// The density is recorded as given; it is not measured. Filtering by
/// `p_max(n) ∈ T` is only meaningful for n ≥ 2, so [`PrimeFamily::admits`]
/// rejects n = 1 for every family.
#[derive(Clone)]
pub struct PrimeFamily {
    name: String,
    membership: Membership,
    density: f64,
}

impl PrimeFamily {
    /// Every prime, δ = 1.
    pub fn all() -> Self {
        Self { name: "all".into(), membership: Membership::All, density: 1.0 }
    }

    /// Primes p ≡ 1 (mod 4), δ = 1/2 by Dirichlet's theorem.
    pub fn one_mod_four() -> Self {
        Self { name: "1mod4".into(), membership: Membership::Residue { modulus: 4, residue: 1 }, density: 0.5 }
    }

    pub fn custom<F>(name: &str, density: f64, predicate: F) -> Result<Self>
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::Argument(format!("density {density} is outside [0, 1]")));
        }
        Ok(Self { name: name.into(), membership: Membership::Custom(Arc::new(predicate)), density })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "all" => Ok(Self::all()),
            "1mod4" => Ok(Self::one_mod_four()),
            other => Err(Error::Argument(format!("unknown prime family `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// Membership test; callers pass primes.
    pub fn contains(&self, p: u64) -> bool {
        match &self.membership {
            Membership::All => true,
            Membership::Residue { modulus, residue } => p % modulus == *residue,
            Membership::Custom(f) => f(p),
        }
    }

    /// Filter on n given its largest prime factor.
    pub fn admits(&self, n: u64, largest_prime: u64) -> bool {
        n >= 2 && self.contains(largest_prime)
    }
}

impl fmt::Debug for PrimeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeFamily").field("name", &self.name).field("density", &self.density).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let t = PrimeFamily::one_mod_four();
        assert!(t.contains(5) && t.contains(13) && !t.contains(3) && !t.contains(2));
        assert_eq!(t.density(), 0.5);
        assert!(!PrimeFamily::all().admits(1, 1));
        assert!(PrimeFamily::all().admits(2, 2));
        assert!(PrimeFamily::custom("bad", 1.5, |_| true).is_err());
    }
}
