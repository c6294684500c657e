use super::average::{omega_histograms, OmegaHistogram, Restriction, RestrictionKind};
use crate::error::{Error, Result};
use crate::numeric::Compensated;

fn check_shift(restriction: &Restriction, shift: u32) -> Result<u32> {
    let expected = match restriction.kind() {
        RestrictionKind::KFull { k } => *k,
        _ => 1,
    };
    if shift != expected {
        return Err(Error::Argument(format!("this restriction pairs with shift {expected}, got {shift}")));
    }
    Ok(expected)
}

/// |Σ c_j (a(j) − a(j+shift))| over a histogram, divided by N (all and
/// squarefree) or N^{1/k} (k-full).
fn delta_at<A: Fn(u32) -> f64>(a: &A, hist: &OmegaHistogram, shift: u32, root: u32) -> f64 {
    let mut acc = Compensated::new();
    for (j, &c) in hist.counts.iter().enumerate() {
        if c > 0 {
            let j = j as u32;
            acc.add(c as f64 * (a(j) - a(j + shift)));
        }
    }
    let norm = if root == 1 { hist.n as f64 } else { (hist.n as f64).powf(1.0 / f64::from(root)) };
    acc.value().abs() / norm
}

/// A shift delta at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftDelta {
    pub n: u64,
    pub delta: f64,
    pub members: u64,
}

/// |avg a(Ω(n)) − avg a(Ω(n) + shift)| at each checkpoint.
pub fn richter_shift_deltas<A: Fn(u32) -> f64>(
    a: A,
    restriction: &Restriction,
    shift: u32,
    checkpoints: &[u64],
    threads: usize,
) -> Result<Vec<ShiftDelta>> {
    let root = check_shift(restriction, shift)?;
    let hists = omega_histograms(restriction, checkpoints, threads)?;
    Ok(hists.iter().map(|h| ShiftDelta { n: h.n, delta: delta_at(&a, h, shift, root), members: h.members }).collect())
}

/// The shift delta at a single horizon N.
pub fn richter_shift_delta<A: Fn(u32) -> f64>(a: A, restriction: &Restriction, shift: u32, limit: u64) -> Result<f64> {
    Ok(richter_shift_deltas(a, restriction, shift, &[limit], 1)?[0].delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{FactorSieve, PrimeSet};
    use crate::ergodic::Normalization;

    fn parity(j: u32) -> f64 {
        if j.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn squarefree_parity_is_twice_mertens() {
        let sq = Restriction::squarefree(PrimeSet::empty(), None);
        assert!((richter_shift_delta(parity, &sq, 1, 100).unwrap() - 0.02).abs() < 1e-15);
        let s = FactorSieve::new(20_000).unwrap();
        let mut mertens = 0i64;
        let checkpoints: Vec<u64> = (1..=20).map(|i| i * 1000).collect();
        let deltas = richter_shift_deltas(parity, &sq, 1, &checkpoints, 3).unwrap();
        let mut next = 0;
        for n in 1..=20_000u64 {
            mertens += s.mobius(n).unwrap() as i64;
            if n == checkpoints[next] {
                assert_eq!(deltas[next].delta, 2.0 * mertens.unsigned_abs() as f64 / n as f64, "n={n}");
                next += 1;
            }
        }
    }

    #[test]
    fn constant_sequence_has_no_delta() {
        let k3 = Restriction::kfull(3, Normalization::PerRoot).unwrap();
        assert_eq!(richter_shift_delta(|_| 0.7, &k3, 3, 1_000_000).unwrap(), 0.0);
        assert_eq!(richter_shift_delta(|_| 0.7, &Restriction::all(), 1, 1000).unwrap(), 0.0);
    }

    #[test]
    fn shift_must_match() {
        let k2 = Restriction::kfull(2, Normalization::PerRoot).unwrap();
        assert!(richter_shift_delta(parity, &k2, 1, 100).is_err());
        assert!(richter_shift_delta(parity, &Restriction::all(), 2, 100).is_err());
    }
}
