use serde::{Deserialize, Serialize};

use crate::arith::{gcd, iroot, FactorSieve, Factorization};
use crate::error::{Error, Result};

/// Canonical form n = m^k · n₁^{k+1} ··· n_{k−1}^{2k−1} of a k-full integer,
/// with the n_i squarefree and pairwise coprime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KFullForm {
    pub k: u32,
    pub m: u64,
    /// n₁..n_{k−1}
    pub parts: Vec<u64>,
}

impl KFullForm {
    /// Checks the squarefree and coprimality invariants.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Argument(format!("k must be at least 2, got {}", self.k)));
        }
        if self.parts.len() != self.k as usize - 1 {
            return Err(Error::Argument(format!("expected {} parts, got {}", self.k - 1, self.parts.len())));
        }
        if self.m == 0 || self.parts.contains(&0) {
            return Err(Error::Argument("form entries must be positive".into()));
        }
        for (i, &a) in self.parts.iter().enumerate() {
            if !is_squarefree_trial(a) {
                return Err(Error::Argument(format!("n_{} = {a} is not squarefree", i + 1)));
            }
            for &b in &self.parts[i + 1..] {
                if gcd(a, b) != 1 {
                    return Err(Error::Argument(format!("parts {a} and {b} share a factor")));
                }
            }
        }
        Ok(())
    }
}

fn is_squarefree_trial(mut n: u64) -> bool {
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// The canonical form of a k-full n, read off its factorization.
///
/// An exponent e with r = e mod k ≠ 0 puts p into n_r and leaves
/// p^{e−k−r} for m^k; exponents divisible by k go entirely to m.
pub fn kfull_encode(n: u64, k: u32, sieve: &FactorSieve) -> Result<KFullForm> {
    if k < 2 {
        return Err(Error::Argument(format!("k must be at least 2, got {k}")));
    }
    if n == 0 {
        return Err(Error::Domain("0 is not k-full".into()));
    }
    let f = sieve.factorize_wide(n)?;
    encode_factorization(&f, k).ok_or_else(|| Error::Domain(format!("{n} is not {k}-full")))
}

pub(crate) fn encode_factorization(f: &Factorization, k: u32) -> Option<KFullForm> {
    let mut m = 1u64;
    let mut parts = vec![1u64; k as usize - 1];
    for &(p, e) in f.pairs() {
        if e < k {
            return None;
        }
        let r = e % k;
        let m_exp = if r == 0 { e / k } else { e / k - 1 };
        if r != 0 {
            parts[r as usize - 1] *= p;
        }
        m *= p.pow(m_exp);
    }
    Some(KFullForm { k, m, parts })
}

/// m^k · ∏ n_i^{k+i}, the inverse of [`kfull_encode`].
pub fn kfull_decode(form: &KFullForm) -> Result<u64> {
    form.validate()?;
    let k = form.k;
    let mut v = form.m.checked_pow(k).ok_or(Error::Overflow("k-full value"))?;
    for (i, &ni) in form.parts.iter().enumerate() {
        let term = ni.checked_pow(k + 1 + i as u32).ok_or(Error::Overflow("k-full value"))?;
        v = v.checked_mul(term).ok_or(Error::Overflow("k-full value"))?;
    }
    Ok(v)
}

/// Visits every tuple (n₁..n_{k−1}) of pairwise coprime squarefree integers
/// with ∏ n_i^{k+i} ≤ N, passing the tuple and that product.
fn for_each_tuple<F: FnMut(&[u64], u64)>(limit: u64, k: u32, mut visit: F) -> Result<()> {
    if k < 2 {
        return Err(Error::Argument(format!("k must be at least 2, got {k}")));
    }
    if limit == 0 {
        return Err(Error::Argument("N must be positive".into()));
    }
    let table = FactorSieve::new(iroot(limit, k + 1).max(2))?;
    let mut parts = vec![1u64; k as usize - 1];
    recurse(&table, limit, k, 0, 1, &mut parts, &mut visit)
}

fn recurse<F: FnMut(&[u64], u64)>(
    table: &FactorSieve,
    limit: u64,
    k: u32,
    index: usize,
    product: u64,
    parts: &mut Vec<u64>,
    visit: &mut F,
) -> Result<()> {
    if index == parts.len() {
        visit(parts, product);
        return Ok(());
    }
    let exp = k + 1 + index as u32;
    let top = iroot(limit / product, exp);
    for n in 1..=top {
        if !table.is_squarefree(n)? || parts[..index].iter().any(|&q| gcd(q, n) != 1) {
            continue;
        }
        parts[index] = n;
        let next = product * n.pow(exp);
        recurse(table, limit, k, index + 1, next, parts, visit)?;
    }
    parts[index] = 1;
    Ok(())
}

/// Every k-full n ≤ N with its canonical form, ascending by n.
///
/// Built from the forms directly: tuples first, then all m up to
/// (N / ∏ n_i^{k+i})^{1/k}.
pub fn enumerate_kfull_forms(limit: u64, k: u32) -> Result<Vec<(u64, KFullForm)>> {
    let mut out = Vec::new();
    for_each_tuple(limit, k, |parts, product| {
        let top = iroot(limit / product, k);
        for m in 1..=top {
            let form = KFullForm { k, m, parts: parts.to_vec() };
            out.push((m.pow(k) * product, form));
        }
    })?;
    out.sort_unstable_by_key(|(n, _)| *n);
    Ok(out)
}

/// All k-full n ≤ N (1 included), ascending.
pub fn enumerate_kfull(limit: u64, k: u32) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for_each_tuple(limit, k, |_, product| {
        let top = iroot(limit / product, k);
        out.extend((1..=top).map(|m| m.pow(k) * product));
    })?;
    out.sort_unstable();
    Ok(out)
}

/// Q_k(N) = #{n ≤ N : n k-full}, one k-th root per tuple.
pub fn count_kfull(limit: u64, k: u32) -> Result<u64> {
    let mut total = 0u64;
    for_each_tuple(limit, k, |_, product| total += iroot(limit / product, k))?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(k: u32, m: u64, parts: &[u64]) -> KFullForm {
        KFullForm { k, m, parts: parts.to_vec() }
    }

    #[test]
    fn encode_examples() {
        let s = FactorSieve::new(1000).unwrap();
        assert_eq!(kfull_encode(72, 2, &s).unwrap(), form(2, 3, &[2]));
        assert_eq!(kfull_encode(16, 2, &s).unwrap(), form(2, 4, &[1]));
        assert_eq!(kfull_encode(108, 2, &s).unwrap(), form(2, 2, &[3]));
        assert_eq!(kfull_encode(1, 3, &s).unwrap(), form(3, 1, &[1, 1]));
        assert!(matches!(kfull_encode(12, 2, &s), Err(Error::Domain(_))));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(kfull_decode(&form(2, 3, &[2])).unwrap(), 72);
        assert_eq!(kfull_decode(&form(2, 1, &[1])).unwrap(), 1);
        assert_eq!(kfull_decode(&form(3, 2, &[3, 5])).unwrap(), 2_025_000);
        assert!(kfull_decode(&form(2, 1, &[4])).is_err());
        assert!(kfull_decode(&form(3, 1, &[6, 3])).is_err());
    }

    #[test]
    fn decoded_value_is_kfull() {
        let s = FactorSieve::new(10_000).unwrap();
        let f = s.factorize_wide(2_025_000).unwrap();
        assert!(f.is_kfull(3));
        assert_eq!(kfull_encode(2_025_000, 3, &s).unwrap(), form(3, 2, &[3, 5]));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_kfull(100, 2).unwrap(), [1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]);
        assert_eq!(enumerate_kfull(100, 3).unwrap(), [1, 8, 16, 27, 32, 64, 81]);
        assert_eq!(enumerate_kfull(3, 2).unwrap(), [1]);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_kfull(100, 2).unwrap(), 14);
        assert_eq!(count_kfull(1, 2).unwrap(), 1);
        for k in 2..=4 {
            for n in [1u64, 10, 1000, 77_777] {
                assert_eq!(count_kfull(n, k).unwrap(), enumerate_kfull(n, k).unwrap().len() as u64);
            }
        }
    }

    #[test]
    fn forms_decode_to_their_values() {
        for (n, f) in enumerate_kfull_forms(100_000, 3).unwrap() {
            assert_eq!(kfull_decode(&f).unwrap(), n);
        }
    }

    proptest::proptest! {
        #[test]
        fn encode_decode_round_trip(k in 2u32..4, m in 1u64..16, a in 1u64..8, b in 1u64..4) {
            // reach 2^32 covers 15^3 · 7^4 · 3^5
            let f = FactorSieve::new(1 << 16).unwrap();
            // any m^k·a^{k+1}·b^{k+2} is k-full; its canonical form decodes back
            let n = m.pow(k) * a.pow(k + 1) * b.pow(k + 2);
            let form = kfull_encode(n, k, &f).unwrap();
            form.validate().unwrap();
            proptest::prop_assert_eq!(kfull_decode(&form).unwrap(), n);
        }
    }
}
