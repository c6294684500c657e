//! Windowed sieving of Ω, μ and p_max for ranges that do not fit in core.
//!
//! A window `[start, end)` is processed with the primes up to √(end − 1):
//! every prime power p^e ≤ end bumps Ω and multiplies a running product of
//! the small part of n. Whatever is left (n / product) is 1 or a single prime
//! above √n. No per-entry division happens except for that last step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{iroot, FactorSieve};
use crate::error::{Error, Result};

/// Default number of entries per window.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 22;

/// Ω, μ and p_max for every n in `[start, start + len)`.
#[derive(Debug, Clone)]
pub struct Segment {
    start: u64,
    omega: Vec<u8>,
    mobius: Vec<i8>,
    largest: Vec<u64>,
}

impl Segment {
    pub fn start(&self) -> u64 {
        self.start
    }

    /// One past the last covered integer.
    pub fn end(&self) -> u64 {
        self.start + self.omega.len() as u64
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    #[inline]
    pub fn omega_at(&self, i: usize) -> u32 {
        self.omega[i] as u32
    }

    #[inline]
    pub fn mobius_at(&self, i: usize) -> i8 {
        self.mobius[i]
    }

    #[inline]
    pub fn largest_prime_at(&self, i: usize) -> u64 {
        self.largest[i]
    }

    pub fn omega(&self) -> &[u8] {
        &self.omega
    }

    pub fn mobius(&self) -> &[i8] {
        &self.mobius
    }
}

/// Sieves `[start, end)` with the given ascending primes, which must cover
/// every prime up to √(end − 1).
pub fn sieve_segment(primes: &[u32], start: u64, end: u64) -> Result<Segment> {
    if start == 0 || end < start {
        return Err(Error::Argument(format!("bad window [{start}, {end})")));
    }
    let len = (end - start) as usize;
    let need = if end > 1 { iroot(end - 1, 2) } else { 0 };
    if need >= 2 && !covers(primes, need) {
        return Err(Error::Capacity(format!("window ending at {end} needs primes up to {need}")));
    }
    let mut omega = vec![0u8; len];
    let mut mobius = vec![1i8; len];
    let mut largest = vec![1u64; len];
    let mut product = vec![1u64; len];
    for &p in primes {
        let p = p as u64;
        if p * p >= end {
            break;
        }
        let mut pe = p;
        let mut e = 1u32;
        loop {
            let first = start.div_ceil(pe) * pe;
            let mut i = (first - start) as usize;
            let step = pe as usize;
            while i < len {
                omega[i] += 1;
                product[i] *= p;
                match e {
                    1 => {
                        mobius[i] = -mobius[i];
                        largest[i] = p;
                    }
                    2 => mobius[i] = 0,
                    _ => {}
                }
                i += step;
            }
            match pe.checked_mul(p) {
                Some(next) if next < end => pe = next,
                _ => break,
            }
            e += 1;
        }
    }
    for i in 0..len {
        let n = start + i as u64;
        if product[i] != n {
            omega[i] += 1;
            mobius[i] = -mobius[i];
            largest[i] = n / product[i];
        }
    }
    Ok(Segment { start, omega, mobius, largest })
}

/// The list is assumed complete up to its last prime; it covers `need` when
/// no prime lies between that prime and `need`.
fn covers(primes: &[u32], need: u64) -> bool {
    match primes.last() {
        None => false,
        Some(&p) => {
            let p = p as u64;
            // Bertrand: some prime lies in (p, 2p]
            p >= need || (need < 2 * p && !(p + 1..=need).any(super::is_prime))
        }
    }
}

/// Splits `[1, limit]` into windows and sieves them on demand.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    limit: u64,
    segment_len: u64,
    primes: Vec<u32>,
}

impl SegmentedSieve {
    pub fn new(limit: u64, segment_len: u64) -> Result<Self> {
        if limit < 1 || segment_len < 1 {
            return Err(Error::Argument("limit and segment length must be positive".into()));
        }
        let root = iroot(limit, 2).max(2) + 1;
        let primes = FactorSieve::new(root)?.primes().to_vec();
        Ok(Self { limit, segment_len, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Window bounds `[start, end)` in order.
    pub fn windows(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut start = 1;
        while start <= self.limit {
            let end = (start + self.segment_len).min(self.limit + 1);
            out.push((start, end));
            start = end;
        }
        out
    }

    pub fn segment(&self, start: u64, end: u64) -> Result<Segment> {
        sieve_segment(&self.primes, start, end)
    }
}

/// Integer summaries of one pass over `[1, limit]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PassSummary {
    pub limit: u64,
    /// Σ μ(n).
    pub mertens: i64,
    /// Σ λ(n).
    pub liouville_sum: i64,
    /// Σ Ω(n).
    pub omega_total: u64,
    /// number of squarefree n.
    pub squarefree: u64,
}

impl PassSummary {
    fn merge(self, other: PassSummary) -> PassSummary {
        PassSummary {
            limit: self.limit.max(other.limit),
            mertens: self.mertens + other.mertens,
            liouville_sum: self.liouville_sum + other.liouville_sum,
            omega_total: self.omega_total + other.omega_total,
            squarefree: self.squarefree + other.squarefree,
        }
    }

    fn of_segment(seg: &Segment) -> PassSummary {
        let mut s = PassSummary { limit: seg.end() - 1, ..Default::default() };
        for i in 0..seg.len() {
            let mu = seg.mobius_at(i);
            let om = seg.omega_at(i);
            s.mertens += mu as i64;
            s.squarefree += u64::from(mu != 0);
            s.liouville_sum += if om.is_multiple_of(2) { 1 } else { -1 };
            s.omega_total += om as u64;
        }
        s
    }
}

/// Full sieve pass over `[1, limit]`, windows processed on `threads` workers.
pub fn sieve_pass(limit: u64, segment_len: u64, threads: usize) -> Result<PassSummary> {
    let sieve = SegmentedSieve::new(limit, segment_len)?;
    let windows = sieve.windows();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Argument(e.to_string()))?;
    let parts: Vec<Result<PassSummary>> = pool.install(|| {
        windows.par_iter().map(|&(a, b)| sieve.segment(a, b).map(|s| PassSummary::of_segment(&s))).collect()
    });
    parts.into_iter().try_fold(PassSummary::default(), |acc, p| Ok(acc.merge(p?)))
}
