//! Restricted Cesàro averages over checkpoint grids.
//!
//! Integers are visited in fixed blocks that never straddle a checkpoint.
//! Blocks run in parallel, but their partial sums are merged strictly in
//! block order, so results do not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::observable::{Context, Observable, Point};
use crate::arith::segment::sieve_segment;
use crate::arith::{iroot, FactorSieve, PrimeFamily, PrimeSet};
use crate::error::{Error, Result};
use crate::numeric::ComplexSum;
use crate::special_numbers::enumerate_kfull_forms;

/// Default number of integers per parallel block.
pub const DEFAULT_BLOCK_LEN: u64 = 1 << 16;

/// Which integers n ≤ N enter the sum.
#[derive(Debug, Clone)]
pub enum RestrictionKind {
    All,
    /// Squarefree n coprime to `excluded`; with a family T, additionally
    /// n ≥ 2 and p_max(n) ∈ T.
    Squarefree {
        excluded: PrimeSet,
        family: Option<PrimeFamily>,
    },
    KFull {
        k: u32,
    },
}

/// What the sum is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// 1/N
    PerN,
    /// 1/#{members ≤ N}
    PerCount,
    /// 1/N^{1/k}
    PerRoot,
}

#[derive(Debug, Clone)]
pub struct Restriction {
    kind: RestrictionKind,
    normalization: Normalization,
}

impl Restriction {
    pub fn new(kind: RestrictionKind, normalization: Normalization) -> Result<Self> {
        match (&kind, normalization) {
            (RestrictionKind::KFull { k }, _) if *k < 2 => {
                Err(Error::Argument(format!("k-full restriction needs k >= 2, got {k}")))
            }
            (RestrictionKind::KFull { .. }, Normalization::PerN) => {
                Err(Error::Argument("k-full averages are per_count or per_root".into()))
            }
            (RestrictionKind::All | RestrictionKind::Squarefree { .. }, n) if n != Normalization::PerN => {
                Err(Error::Argument("averages over all or squarefree n are per_N".into()))
            }
            _ => Ok(Self { kind, normalization }),
        }
    }

    pub fn all() -> Self {
        Self { kind: RestrictionKind::All, normalization: Normalization::PerN }
    }

    pub fn squarefree(excluded: PrimeSet, family: Option<PrimeFamily>) -> Self {
        Self { kind: RestrictionKind::Squarefree { excluded, family }, normalization: Normalization::PerN }
    }

    pub fn kfull(k: u32, normalization: Normalization) -> Result<Self> {
        Self::new(RestrictionKind::KFull { k }, normalization)
    }

    pub fn kind(&self) -> &RestrictionKind {
        &self.kind
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Divides a raw sum at horizon N.
    pub fn normalize(&self, sum: Complex64, members: u64, limit: u64) -> Complex64 {
        match self.normalization {
            Normalization::PerN => sum / limit as f64,
            Normalization::PerCount if members == 0 => Complex64::new(0.0, 0.0),
            Normalization::PerCount => sum / members as f64,
            Normalization::PerRoot => {
                let k = match self.kind {
                    RestrictionKind::KFull { k } => k,
                    _ => 1,
                };
                sum / (limit as f64).powf(1.0 / k as f64)
            }
        }
    }
}

/// round(10^3 · ratio^j) below N, then N itself. Just [N] when N ≤ 1000.
pub fn checkpoint_grid(limit: u64, ratio: f64) -> Result<Vec<u64>> {
    if limit == 0 {
        return Err(Error::Argument("N must be positive".into()));
    }
    if !(ratio > 1.0) {
        return Err(Error::Argument(format!("checkpoint ratio must exceed 1, got {ratio}")));
    }
    let mut out = Vec::new();
    let log_ratio = ratio.log10();
    for j in 0.. {
        let c = 10f64.powf(3.0 + j as f64 * log_ratio).round() as u64;
        if c >= limit {
            break;
        }
        if out.last() != Some(&c) {
            out.push(c);
        }
    }
    out.push(limit);
    Ok(out)
}

/// The default grid: ratio 10^{1/4}.
pub fn default_checkpoints(limit: u64) -> Vec<u64> {
    checkpoint_grid(limit, 10f64.powf(0.25)).expect("valid default grid")
}

/// One row of an [`AverageSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub value: Complex64,
    pub members: u64,
}

/// Partial averages at increasing N.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AverageSeries {
    pub checkpoints: Vec<Checkpoint>,
}

impl AverageSeries {
    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }

    pub fn final_value(&self) -> Complex64 {
        self.last().map_or(Complex64::new(0.0, 0.0), |c| c.value)
    }
}

/// Normalizers taken per checkpoint or at the final horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonMode {
    #[default]
    PerCheckpoint,
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageOptions {
    /// Ascending checkpoints; the last one is the horizon.
    pub checkpoints: Vec<u64>,
    pub threads: usize,
    pub horizon: HorizonMode,
    pub block_len: u64,
}

impl AverageOptions {
    pub fn new(checkpoints: Vec<u64>) -> Self {
        Self { checkpoints, threads: 1, horizon: HorizonMode::default(), block_len: DEFAULT_BLOCK_LEN }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn horizon(mut self, horizon: HorizonMode) -> Self {
        self.horizon = horizon;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.checkpoints.is_empty() || self.checkpoints[0] == 0 {
            return Err(Error::Argument("checkpoints must be positive and nonempty".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("checkpoints must be strictly increasing".into()));
        }
        if self.block_len == 0 {
            return Err(Error::Argument("block length must be positive".into()));
        }
        Ok(())
    }
}

/// A member of the restricted range: n, Ω(n), p_max(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub n: u64,
    pub omega: u32,
    pub largest_prime: u64,
}

/// Cumulative state merged in block order.
pub trait Accumulator: Clone + Default + Send {
    fn merge(&mut self, other: &Self);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SumCount {
    pub sum: ComplexSum,
    pub count: u64,
}

impl Accumulator for SumCount {
    fn merge(&mut self, other: &Self) {
        self.sum.merge(&other.sum);
        self.count += other.count;
    }
}

/// Walks the members of a restriction up to a fixed limit.
#[derive(Debug)]
pub struct Enumerator {
    restriction: Restriction,
    limit: u64,
    /// Primes up to √limit for windowed sieving.
    primes: Vec<u32>,
    /// Precomputed members for k-full restrictions.
    members: Vec<Member>,
}

impl Enumerator {
    pub fn new(restriction: &Restriction, limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Argument("N must be positive".into()));
        }
        let mut primes = Vec::new();
        let mut members = Vec::new();
        match restriction.kind {
            RestrictionKind::KFull { k } => {
                let forms = enumerate_kfull_forms(limit, k)?;
                let table = FactorSieve::new(iroot(limit, k).max(2))?;
                members.reserve(forms.len());
                for (n, form) in forms {
                    let fm = table.factorize(form.m)?;
                    let mut omega = k * fm.big_omega();
                    let mut largest = fm.largest_prime();
                    for (i, &ni) in form.parts.iter().enumerate() {
                        let fi = table.factorize(ni)?;
                        omega += (k + 1 + i as u32) * fi.big_omega();
                        largest = largest.max(fi.largest_prime());
                    }
                    members.push(Member { n, omega, largest_prime: largest });
                }
            }
            _ => {
                primes = FactorSieve::new(iroot(limit, 2).max(2) + 1)?.primes().to_vec();
            }
        }
        Ok(Self { restriction: restriction.clone(), limit, primes, members })
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    /// Calls `visit` on every member up to each bound and returns the
    /// cumulative accumulator at each bound.
    pub fn run<A, F>(&self, bounds: &[u64], block_len: u64, threads: usize, visit: F) -> Result<Vec<A>>
    where
        A: Accumulator,
        F: Fn(&mut A, &Member) -> Result<()> + Sync,
    {
        if bounds.last().is_some_and(|&b| b > self.limit) {
            return Err(Error::OutOfRange { value: *bounds.last().unwrap(), limit: self.limit });
        }
        let blocks = self.blocks(bounds, block_len.max(1));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Argument(e.to_string()))?;
        let parts: Vec<Result<A>> = pool.install(|| {
            blocks
                .par_iter()
                .map(|b| {
                    let mut acc = A::default();
                    self.visit_block(b, &mut acc, &visit)?;
                    Ok(acc)
                })
                .collect()
        });
        let mut out = Vec::with_capacity(bounds.len());
        let mut running = A::default();
        for (block, part) in blocks.iter().zip(parts) {
            running.merge(&part?);
            if block.closes_bound {
                out.push(running.clone());
            }
        }
        Ok(out)
    }

    fn blocks(&self, bounds: &[u64], block_len: u64) -> Vec<Block> {
        let mut out = Vec::new();
        match self.restriction.kind {
            RestrictionKind::KFull { .. } => {
                let mut start = 0usize;
                for &b in bounds {
                    let end = self.members.partition_point(|m| m.n <= b);
                    let mut s = start;
                    loop {
                        let e = (s + block_len as usize).min(end);
                        out.push(Block { lo: s as u64, hi: e as u64, closes_bound: e == end });
                        s = e;
                        if s >= end {
                            break;
                        }
                    }
                    start = end;
                }
            }
            _ => {
                let mut start = 1u64;
                for &b in bounds {
                    loop {
                        let e = (start + block_len).min(b + 1);
                        out.push(Block { lo: start, hi: e, closes_bound: e == b + 1 });
                        start = e;
                        if start > b {
                            break;
                        }
                    }
                }
            }
        }
        out
    }

    fn visit_block<A, F>(&self, block: &Block, acc: &mut A, visit: &F) -> Result<()>
    where
        F: Fn(&mut A, &Member) -> Result<()>,
    {
        if block.lo >= block.hi {
            return Ok(());
        }
        match &self.restriction.kind {
            RestrictionKind::KFull { .. } => {
                for m in &self.members[block.lo as usize..block.hi as usize] {
                    visit(acc, m)?;
                }
            }
            RestrictionKind::All => {
                let seg = sieve_segment(&self.primes, block.lo, block.hi)?;
                for i in 0..seg.len() {
                    let m = Member {
                        n: block.lo + i as u64,
                        omega: seg.omega_at(i),
                        largest_prime: seg.largest_prime_at(i),
                    };
                    visit(acc, &m)?;
                }
            }
            RestrictionKind::Squarefree { excluded, family } => {
                let seg = sieve_segment(&self.primes, block.lo, block.hi)?;
                for i in 0..seg.len() {
                    let n = block.lo + i as u64;
                    if seg.mobius_at(i) == 0 || !excluded.is_coprime(n) {
                        continue;
                    }
                    let largest = seg.largest_prime_at(i);
                    if let Some(t) = family {
                        if !t.admits(n, largest) {
                            continue;
                        }
                    }
                    visit(acc, &Member { n, omega: seg.omega_at(i), largest_prime: largest })?;
                }
            }
        }
        Ok(())
    }
}

/// Integer range `[lo, hi)`, or a member index range for k-full walks.
#[derive(Debug, Clone, Copy)]
struct Block {
    lo: u64,
    hi: u64,
    closes_bound: bool,
}

/// Partial averages of `obs` over the restriction at every checkpoint.
pub fn restricted_average_with<O: Observable>(
    obs: &O,
    restriction: &Restriction,
    options: &AverageOptions,
) -> Result<AverageSeries> {
    options.validate()?;
    let limit = *options.checkpoints.last().unwrap();
    let enumerator = Enumerator::new(restriction, limit)?;
    let ctx = Context::new(obs.max_argument(limit)?, obs.needs_factorization())?;
    let sum_pass = |bounds: &[u64], horizon: f64| -> Result<Vec<SumCount>> {
        enumerator.run(bounds, options.block_len, options.threads, |acc: &mut SumCount, m| {
            let p = Point::new(m.n, m.omega, m.largest_prime, horizon, &ctx);
            acc.sum.add(obs.eval(&p)?);
            acc.count += 1;
            Ok(())
        })
    };
    let sums: Vec<SumCount> = if obs.horizon_dependent() && options.horizon == HorizonMode::PerCheckpoint {
        let mut v = Vec::with_capacity(options.checkpoints.len());
        for &c in &options.checkpoints {
            v.push(sum_pass(&[c], c as f64)?.remove(0));
        }
        v
    } else {
        sum_pass(&options.checkpoints, limit as f64)?
    };
    let checkpoints = options
        .checkpoints
        .iter()
        .zip(sums)
        .map(|(&n, s)| Checkpoint { n, value: restriction.normalize(s.sum.value(), s.count, n), members: s.count })
        .collect();
    Ok(AverageSeries { checkpoints })
}

/// [`restricted_average_with`] on the default geometric grid, one thread.
pub fn restricted_average<O: Observable>(obs: &O, restriction: &Restriction, limit: u64) -> Result<AverageSeries> {
    restricted_average_with(obs, restriction, &AverageOptions::new(default_checkpoints(limit)))
}

/// Ω-histogram of the members up to a bound: `counts[j]` members with Ω = j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaHistogram {
    pub n: u64,
    pub counts: Vec<u64>,
    pub members: u64,
}

#[derive(Debug, Clone, Default)]
struct HistogramAcc {
    counts: Vec<u64>,
    members: u64,
}

impl Accumulator for HistogramAcc {
    fn merge(&mut self, other: &Self) {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.members += other.members;
    }
}

/// Ω-histograms at each checkpoint. Any statistic that depends on n only
/// through Ω(n) can be read off these exactly.
pub fn omega_histograms(restriction: &Restriction, checkpoints: &[u64], threads: usize) -> Result<Vec<OmegaHistogram>> {
    let options = AverageOptions::new(checkpoints.to_vec()).threads(threads);
    options.validate()?;
    let enumerator = Enumerator::new(restriction, *checkpoints.last().unwrap())?;
    let accs = enumerator.run(checkpoints, options.block_len, threads, |acc: &mut HistogramAcc, m| {
        let j = m.omega as usize;
        if acc.counts.len() <= j {
            acc.counts.resize(j + 1, 0);
        }
        acc.counts[j] += 1;
        acc.members += 1;
        Ok(())
    })?;
    Ok(checkpoints.iter().zip(accs).map(|(&n, a)| OmegaHistogram { n, counts: a.counts, members: a.members }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{br_observable, AdditiveSystem, State, StateFunction};
    use crate::ergodic::observable::Constant;
    use crate::special_numbers::squarefree_density_partial;

    #[test]
    fn grid_shape() {
        let g = default_checkpoints(10_000);
        assert_eq!(g, [1000, 1778, 3162, 5623, 10_000]);
        assert_eq!(default_checkpoints(50), [50]);
        assert_eq!(*default_checkpoints(123_456).last().unwrap(), 123_456);
        assert!(checkpoint_grid(100, 1.0).is_err());
    }

    #[test]
    fn restriction_validation() {
        assert!(Restriction::kfull(1, Normalization::PerCount).is_err());
        assert!(Restriction::kfull(2, Normalization::PerN).is_err());
        assert!(Restriction::new(RestrictionKind::All, Normalization::PerCount).is_err());
        assert!(Restriction::kfull(3, Normalization::PerRoot).is_ok());
    }

    #[test]
    fn constant_one_over_squarefree() {
        let s =
            restricted_average(&Constant::real(1.0), &Restriction::squarefree(PrimeSet::empty(), None), 100).unwrap();
        assert_eq!(s.final_value().re, 0.61);
        assert_eq!(s.last().unwrap().members, 61);
    }

    #[test]
    fn constant_one_over_kfull_per_count() {
        let r = Restriction::kfull(2, Normalization::PerCount).unwrap();
        let s = restricted_average(&Constant::real(1.0), &r, 100_000).unwrap();
        assert!(s.checkpoints.iter().all(|c| c.value.re == 1.0));
    }

    #[test]
    fn liouville_over_squarefree_is_mertens() {
        let obs =
            br_observable(&AdditiveSystem::cyclic(2).unwrap(), &State::Residue(0), &StateFunction::parity()).unwrap();
        let s = restricted_average(&obs, &Restriction::squarefree(PrimeSet::empty(), None), 100).unwrap();
        assert!((s.final_value().re - 0.01).abs() < 1e-15);
    }

    #[test]
    fn density_matches_exact_count() {
        for s in PrimeSet::new([2, 3]).unwrap().subsets() {
            let r = Restriction::squarefree(s.clone(), None);
            let series = restricted_average(&Constant::real(1.0), &r, 200_000).unwrap();
            for c in &series.checkpoints {
                assert_eq!(c.value.re, squarefree_density_partial(c.n, &s).unwrap());
            }
        }
    }

    #[test]
    fn threads_do_not_change_results() {
        let obs = br_observable(&AdditiveSystem::golden(), &State::point(0.0).unwrap(), &StateFunction::sin_squared())
            .unwrap();
        let r = Restriction::squarefree(PrimeSet::new([2]).unwrap(), None);
        let opts = AverageOptions { block_len: 1 << 12, ..AverageOptions::new(default_checkpoints(300_000)) };
        let one = restricted_average_with(&obs, &r, &opts).unwrap();
        let four = restricted_average_with(&obs, &r, &opts.clone().threads(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn histograms_count_members() {
        let h = omega_histograms(&Restriction::all(), &[10, 100], 2).unwrap();
        assert_eq!(h[0].members, 10);
        // Ω over 1..=10: 0,1,1,2,1,2,1,3,2,2
        assert_eq!(h[0].counts, [1, 4, 4, 1]);
        assert_eq!(h[1].members, 100);
        let k = omega_histograms(&Restriction::kfull(2, Normalization::PerRoot).unwrap(), &[100], 1).unwrap();
        assert_eq!(k[0].members, 14);
    }
}
