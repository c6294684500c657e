use std::fmt;

use serde::{Deserialize, Serialize};

use super::is_prime;
use crate::error::{Error, Result};

/// Finite set of distinct primes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Errors when a member is not prime. Duplicates collapse.
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        if let Some(bad) = v.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Argument(format!("{bad} is not prime")));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self(v))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// `true` when no member divides n.
    pub fn is_coprime(&self, n: u64) -> bool {
        self.0.iter().all(|&p| !n.is_multiple_of(p))
    }

    /// Every subset, in binary-counter order; meant for small sets.
    pub fn subsets(&self) -> Vec<PrimeSet> {
        assert!(self.0.len() < 20, "too many primes to enumerate subsets");
        (0u32..1 << self.0.len())
            .map(|mask| {
                PrimeSet(self.0.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
            })
            .collect()
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(s: PrimeSet) -> Self {
        s.0
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
