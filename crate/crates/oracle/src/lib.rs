//! Brute-force reference implementations.
//!
//! Everything here is deliberately slow and literal: trial division, direct
//! filters over every integer, nested loops for double sums. Nothing is shared
//! with `omega-ergodic`, so an agreement between the two is evidence rather
//! than a tautology.

use std::fmt;

use num_complex::Complex64;

/// Largest argument accepted by [`brute_factor`].
pub const FACTOR_LIMIT: u64 = 100_000_000;
/// Largest horizon accepted by the list/sum oracles.
pub const LIST_LIMIT: u64 = 10_000_000;
/// Largest horizon accepted by the decomposition oracles.
pub const DECOMPOSITION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeError {
    pub quantity: &'static str,
    pub value: u64,
    pub limit: u64,
}

impl fmt::Display for RangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: argument {} outside oracle range (limit {})", self.quantity, self.value, self.limit)
    }
}

impl std::error::Error for RangeError {}

fn check(quantity: &'static str, value: u64, limit: u64) -> Result<(), RangeError> {
    if value > limit {
        Err(RangeError { quantity, value, limit })
    } else {
        Ok(())
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn brute_factor(n: u64) -> Result<Vec<(u64, u32)>, RangeError> {
    check("factor", n, FACTOR_LIMIT)?;
    let mut out = Vec::new();
    let mut rest = n;
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            let mut e = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

pub fn brute_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn brute_omega(n: u64) -> u32 {
    let mut count = 0;
    let mut rest = n;
    let mut d = 2u64;
    while d * d <= rest {
        while rest.is_multiple_of(d) {
            rest /= d;
            count += 1;
        }
        d += 1;
    }
    if rest > 1 {
        count += 1;
    }
    count
}

/// Möbius function by trial division.
pub fn brute_mobius(n: u64) -> i64 {
    let mut rest = n;
    let mut sign = 1;
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            rest /= d;
            if rest.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if rest > 1 {
        sign = -sign;
    }
    sign
}

pub fn brute_totient(n: u64) -> u64 {
    (1..=n).filter(|&j| gcd(j, n) == 1).count() as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `true` when every prime dividing `n` divides it at least `k` times.
pub fn brute_is_kfull(n: u64, k: u32) -> bool {
    let mut rest = n;
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            let mut e = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            if e < k {
                return false;
            }
        }
        d += 1;
    }
    rest == 1
}

/// All k-full integers up to `limit`, found by testing every integer.
pub fn brute_kfull_list(limit: u64, k: u32) -> Result<Vec<u64>, RangeError> {
    check("kfull", limit, LIST_LIMIT)?;
    Ok((1..=limit).filter(|&n| brute_is_kfull(n, k)).collect())
}

/// Mertens function `sum_{n <= limit} mu(n)`.
pub fn brute_mertens(limit: u64) -> Result<i64, RangeError> {
    check("mertens", limit, LIST_LIMIT)?;
    Ok((1..=limit).map(brute_mobius).sum())
}

/// Number of primes up to `limit`, each tested by trial division.
pub fn brute_prime_count(limit: u64) -> Result<u64, RangeError> {
    check("prime_count", limit, LIST_LIMIT)?;
    Ok((2..=limit).filter(|&n| brute_is_prime(n)).count() as u64)
}

fn coprime_to_all(n: u64, primes: &[u64]) -> bool {
    primes.iter().all(|&p| !n.is_multiple_of(p))
}

/// Plain Kahan accumulator, local to the oracle.
#[derive(Default, Clone, Copy)]
struct Acc {
    sum: Complex64,
    c: Complex64,
}

impl Acc {
    fn add(&mut self, x: Complex64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Both sides of the squarefree decomposition with cutoff `d_max`:
///
/// lhs = (1/N) sum_{n<=N} mu^2(n) w_S(n) a(n)
/// rhs = sum_{d<=D} mu(d) w_S(d) / d^2 * mean_{n <= N/d^2} w_S(n) a(d^2 n)
pub fn brute_decomposition_squarefree<A>(
    a: A,
    excluded: &[u64],
    limit: u64,
    d_max: u64,
) -> Result<(Complex64, Complex64), RangeError>
where
    A: Fn(u64) -> Complex64,
{
    check("decomposition", limit, DECOMPOSITION_LIMIT)?;
    let mut lhs = Acc::default();
    for n in 1..=limit {
        if brute_mobius(n) != 0 && coprime_to_all(n, excluded) {
            lhs.add(a(n));
        }
    }
    let mut rhs = Acc::default();
    for d in 1..=d_max {
        let mu = brute_mobius(d);
        if mu == 0 || !coprime_to_all(d, excluded) {
            continue;
        }
        let len = limit / (d * d);
        if len == 0 {
            continue;
        }
        let mut inner = Acc::default();
        for n in 1..=len {
            if coprime_to_all(n, excluded) {
                inner.add(a(d * d * n));
            }
        }
        let mean = inner.sum / len as f64;
        rhs.add(mean * (mu as f64 / (d * d) as f64));
    }
    Ok((lhs.sum / limit as f64, rhs.sum))
}

fn ipow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Both sides of the k-full decomposition with cutoffs `d_max[i-1]` on n_i:
///
/// lhs = N^{-1/k} sum_{k-full n<=N} a(n)
/// rhs = sum over squarefree pairwise-coprime (n_1..n_{k-1}), n_i <= D_i, of
///       prod n_i^{-(1+i/k)} * mean_{m <= V} a(m^k prod n_i^{k+i})
/// with V = N^{1/k} / prod n_i^{1+i/k}.
pub fn brute_decomposition_kfull<A>(
    a: A,
    k: u32,
    limit: u64,
    d_max: &[u64],
) -> Result<(Complex64, Complex64), RangeError>
where
    A: Fn(u64) -> Complex64,
{
    check("decomposition", limit, DECOMPOSITION_LIMIT)?;
    assert!(k >= 2 && d_max.len() == (k - 1) as usize);
    let root = (limit as f64).powf(1.0 / k as f64);
    let mut lhs = Acc::default();
    for n in 1..=limit {
        if brute_is_kfull(n, k) {
            lhs.add(a(n));
        }
    }
    let mut rhs = Acc::default();
    let mut tuple = vec![1u64; d_max.len()];
    loop {
        let ok = tuple.iter().all(|&x| brute_mobius(x) != 0)
            && (0..tuple.len()).all(|i| (i + 1..tuple.len()).all(|j| gcd(tuple[i], tuple[j]) == 1));
        if ok {
            let mut base = 1u64;
            let mut weight = 1.0f64;
            for (i, &x) in tuple.iter().enumerate() {
                let idx = (i + 1) as u32;
                base *= ipow(x, k + idx).expect("tuple power overflow");
                weight *= (x as f64).powf(1.0 + idx as f64 / k as f64);
            }
            let mut count = 0u64;
            let mut inner = Acc::default();
            let mut m = 1u64;
            while let Some(v) = ipow(m, k).and_then(|mk| mk.checked_mul(base)) {
                if v > limit {
                    break;
                }
                inner.add(a(v));
                count += 1;
                m += 1;
            }
            if count > 0 {
                rhs.add(inner.sum / count as f64 / weight);
            }
        }
        // odometer over the box prod [1, D_i]
        let mut i = 0;
        loop {
            if i == tuple.len() {
                return Ok((lhs.sum / root, rhs.sum));
            }
            tuple[i] += 1;
            if tuple[i] <= d_max[i] {
                break;
            }
            tuple[i] = 1;
            i += 1;
        }
    }
}

/// Value minted by the oracle for fixture generation.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleValue {
    Integer(i64),
    Real(f64),
    Pair(f64, f64),
    List(Vec<u64>),
    Factorization(Vec<(u64, u32)>),
}

impl fmt::Display for OracleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleValue::Integer(v) => write!(f, "{v}"),
            OracleValue::Real(v) => write!(f, "{v:.17e}"),
            OracleValue::Pair(a, b) => write!(f, "{a:.17e} {b:.17e}"),
            OracleValue::List(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            OracleValue::Factorization(fs) => {
                let parts: Vec<String> = fs.iter().map(|(p, e)| format!("{p}^{e}")).collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub quantity: String,
    pub input: Vec<u64>,
    pub value: OracleValue,
}

#[derive(Debug)]
pub enum MintError {
    UnknownQuantity(String),
    Arguments(String),
    Range(RangeError),
}

impl fmt::Display for MintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MintError::UnknownQuantity(q) => write!(f, "unknown oracle quantity `{q}`"),
            MintError::Arguments(msg) => write!(f, "bad oracle arguments: {msg}"),
            MintError::Range(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for MintError {}

impl From<RangeError> for MintError {
    fn from(e: RangeError) -> Self {
        MintError::Range(e)
    }
}

fn want(args: &[u64], n: usize, usage: &str) -> Result<(), MintError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(MintError::Arguments(format!("expected {usage}")))
    }
}

/// Dispatch used by the hidden `oracle` CLI subcommand.
///
/// Quantities: `factor n`, `kfull N k`, `mertens N`, `prime-count N`,
/// `squarefree-ones N D [primes..]` (both sides of the squarefree
/// decomposition for a = 1), `kfull-ones N k D_1..D_{k-1}`.
pub fn mint(quantity: &str, args: &[u64]) -> Result<OracleResult, MintError> {
    let value = match quantity {
        "factor" => {
            want(args, 1, "factor <n>")?;
            OracleValue::Factorization(brute_factor(args[0])?)
        }
        "kfull" => {
            want(args, 2, "kfull <N> <k>")?;
            OracleValue::List(brute_kfull_list(args[0], args[1] as u32)?)
        }
        "mertens" => {
            want(args, 1, "mertens <N>")?;
            OracleValue::Integer(brute_mertens(args[0])?)
        }
        "prime-count" => {
            want(args, 1, "prime-count <N>")?;
            OracleValue::Integer(brute_prime_count(args[0])? as i64)
        }
        "squarefree-ones" => {
            if args.len() < 2 {
                return Err(MintError::Arguments("expected squarefree-ones <N> <D> [primes..]".into()));
            }
            let (l, r) = brute_decomposition_squarefree(|_| Complex64::new(1.0, 0.0), &args[2..], args[0], args[1])?;
            OracleValue::Pair(l.re, r.re)
        }
        "kfull-ones" => {
            if args.len() < 3 || args.len() != args[1] as usize + 1 {
                return Err(MintError::Arguments("expected kfull-ones <N> <k> <D_1..D_{k-1}>".into()));
            }
            let (l, r) = brute_decomposition_kfull(|_| Complex64::new(1.0, 0.0), args[1] as u32, args[0], &args[2..])?;
            OracleValue::Pair(l.re, r.re)
        }
        other => return Err(MintError::UnknownQuantity(other.to_string())),
    };
    Ok(OracleResult { quantity: quantity.to_string(), input: args.to_vec(), value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert_eq!(brute_factor(12).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(brute_factor(1).unwrap(), vec![]);
        assert_eq!(brute_factor(999_983).unwrap(), vec![(999_983, 1)]);
        assert!(brute_factor(FACTOR_LIMIT + 1).is_err());
    }

    #[test]
    fn kfull_examples() {
        assert_eq!(brute_kfull_list(100, 2).unwrap(), vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]);
        assert_eq!(brute_kfull_list(1, 2).unwrap(), vec![1]);
        assert_eq!(brute_kfull_list(7, 3).unwrap(), vec![1]);
    }

    #[test]
    fn mertens_examples() {
        assert_eq!(brute_mertens(1).unwrap(), 1);
        assert_eq!(brute_mertens(2).unwrap(), 0);
        assert_eq!(brute_mertens(100).unwrap(), 1);
    }

    #[test]
    fn decomposition_of_zero_is_zero() {
        let zero = |_| Complex64::new(0.0, 0.0);
        let (l, r) = brute_decomposition_squarefree(zero, &[], 1000, 10).unwrap();
        assert_eq!((l, r), (Complex64::default(), Complex64::default()));
        let (l, r) = brute_decomposition_kfull(zero, 2, 1000, &[3]).unwrap();
        assert_eq!((l, r), (Complex64::default(), Complex64::default()));
    }

    #[test]
    fn mint_dispatch() {
        let r = mint("mertens", &[100]).unwrap();
        assert_eq!(r.value, OracleValue::Integer(1));
        assert!(matches!(mint("nope", &[]), Err(MintError::UnknownQuantity(_))));
        assert!(matches!(mint("kfull", &[10]), Err(MintError::Arguments(_))));
    }
}
