use super::average::{restricted_average_with, AverageOptions, Restriction};
use super::observable::{Dilated, Observable};
use crate::error::Result;

/// |avg_{n≤N} a(n^k·m) − avg_{n≤N} a(n^k)| over all n.
///
/// Near zero for large N when a has an average invariant under
/// multiplication (k = 1) or under multiplication of k-th powers.
pub fn multiplication_probe<O: Observable>(a: &O, k: u32, m: u64, limit: u64, threads: usize) -> Result<f64> {
    let options = AverageOptions::new(vec![limit]).threads(threads);
    let all = Restriction::all();
    let shifted = restricted_average_with(&Dilated::new(a, k, m)?, &all, &options)?.final_value();
    let base = restricted_average_with(&Dilated::new(a, k, 1)?, &all, &options)?.final_value();
    Ok((shifted - base).norm())
}
