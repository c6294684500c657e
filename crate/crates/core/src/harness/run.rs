use std::time::Instant;

use num_complex::Complex64;

use super::report::{Check, Environment, Row, RunReport};
use super::spec::{parse_alpha, parse_ffun, ExperimentId, ExperimentSpec};
use crate::arith::{iroot, FactorSieve, PrimeSet};
use crate::dynamics::{ap_observable, br_observable, integrate, Angle, MultObservable, MultiplicativeSystem, State};
use crate::ergodic::{
    gaussian_expectation, loyd_observable, proposition3_residual, restricted_average_with, richter_shift_deltas,
    AverageOptions, AverageSeries, Constant, Normalization, Observable, RandomDisc, Restriction, Statistic,
};
use crate::error::Result;
use crate::special_numbers::identities::{check_convolution, check_dirichlet_inverse, check_series};
use crate::special_numbers::{
    enumerate_kfull, erdos_szekeres_constant, sieve_constants, squarefree_count, zeta2_inverse, DEFAULT_PRIME_CUTOFF,
};

/// Allowed |value − predicted| at the final checkpoint of each experiment.
pub fn tolerance(spec: &ExperimentSpec) -> f64 {
    use ExperimentId::*;
    let n = spec.n as f64;
    match spec.experiment {
        ThmSquarefree | ThmMultiplicative | ThmAp => 0.01,
        ThmBkwLoyd | ThmKfullErgodic | ThmKfullEk | ThmKfullLoyd => 0.05,
        Richter if spec.k.is_some() => 0.05,
        Richter => 0.005,
        // the next term of Q_k(N) is of order N^{1/(k+1)}
        Counts => match spec.k {
            Some(k) => 3.0 * n.powf(1.0 / f64::from(k + 1) - 1.0 / f64::from(k)),
            None => 5.0 / n.sqrt(),
        },
        Identities => 0.0,
    }
}

/// The limit each experiment's rows converge to, from closed forms only.
pub fn predicted_limit(spec: &ExperimentSpec) -> Result<f64> {
    use ExperimentId::*;
    let density = || -> Result<f64> { Ok(sieve_constants(&spec.excluded()?)?.alpha * zeta2_inverse()) };
    let circle_integral = || -> Result<f64> {
        let (_, sys) = parse_alpha(&spec.alpha)?;
        integrate(&sys, &parse_ffun(&spec.ffun)?)
    };
    let big_f = || gaussian_expectation(&spec.compact_function()?);
    Ok(match spec.experiment {
        ThmSquarefree | ThmMultiplicative => density()? * circle_integral()?,
        ThmBkwLoyd => {
            let delta = spec.family()?.map_or(1.0, |t| t.density());
            density()? * delta * big_f()? * circle_integral()?
        }
        ThmAp => zeta2_inverse() * circle_integral()?,
        ThmKfullErgodic => circle_integral()?,
        ThmKfullEk => big_f()?,
        ThmKfullLoyd => big_f()? * circle_integral()?,
        Richter | Identities => 0.0,
        Counts => match spec.k {
            Some(k) => erdos_szekeres_constant(k, DEFAULT_PRIME_CUTOFF)?.value(),
            None => density()?,
        },
    })
}

fn row(n: u64, value: Complex64, predicted: f64, members: u64) -> Row {
    Row { n, value_re: value.re, value_im: value.im, predicted, abs_err: (value - predicted).norm(), members, ms: 0 }
}

fn series_rows(series: &AverageSeries, predicted: f64) -> Vec<Row> {
    series.checkpoints.iter().map(|c| row(c.n, c.value, predicted, c.members)).collect()
}

/// Validates, checks capacity, then runs the experiment.
pub fn run(spec: &ExperimentSpec) -> Result<RunReport> {
    spec.validate()?;
    spec.check_capacity()?;
    let start = Instant::now();
    let predicted = predicted_limit(spec)?;
    let tol = tolerance(spec);
    let mut checks = Vec::new();
    let mut rows = match spec.experiment {
        ExperimentId::Counts => counts_rows(spec, predicted)?,
        ExperimentId::Richter => richter_rows(spec)?,
        ExperimentId::Identities => identity_rows(spec, &mut checks)?,
        _ => series_rows(&average_series(spec)?, predicted),
    };
    if spec.timing {
        let ms = start.elapsed().as_millis() as u64;
        rows.iter_mut().for_each(|r| r.ms = ms);
    }
    let within_tolerance = rows.last().is_some_and(|r| r.abs_err <= tol);
    Ok(RunReport {
        spec: spec.clone(),
        rows,
        environment: Environment { version: env!("CARGO_PKG_VERSION").into(), threads: spec.threads },
        tolerance: tol,
        within_tolerance,
        checks,
    })
}

/// The averaging experiments: one restricted average each.
fn average_series(spec: &ExperimentSpec) -> Result<AverageSeries> {
    use ExperimentId::*;
    let options = AverageOptions::new(spec.checkpoint_list()?).threads(spec.threads).horizon(spec.horizon);
    let excluded = spec.excluded()?;
    let (angle, sys) = parse_alpha(&spec.alpha)?;
    let f = parse_ffun(&spec.ffun)?;
    let x = State::Point(Angle::ZERO);
    let k = spec.k_or_default();
    let orbit = br_observable(&sys, &x, &f)?;
    let squarefree = Restriction::squarefree(excluded, None);
    let kfull = || Restriction::kfull(k, Normalization::PerCount);
    let run = |obs: &dyn Observable, r: &Restriction| restricted_average_with(&obs, r, &options);
    match spec.experiment {
        ThmSquarefree => run(&orbit, &squarefree),
        ThmBkwLoyd => {
            let obs = loyd_observable(spec.compact_function()?, Statistic::Totient { k }, orbit, spec.family()?)?;
            run(&obs, &squarefree)
        }
        ThmMultiplicative => {
            // primes other than 2 rotate by α, and 2 by √2 − 1
            let msys = MultiplicativeSystem::with_default([(2, Angle::SQRT2_MINUS_ONE)], angle)?;
            run(&MultObservable::new(msys, Angle::ZERO, f)?, &squarefree)
        }
        ThmAp => {
            let obs = ap_observable(&sys, &x, &f, spec.m.unwrap_or(1), spec.r.unwrap_or(0))?;
            run(&obs, &squarefree)
        }
        ThmKfullErgodic => run(&orbit, &kfull()?),
        ThmKfullEk => {
            let obs = loyd_observable(spec.compact_function()?, Statistic::ErdosKac { k }, Constant::real(1.0), None)?;
            run(&obs, &kfull()?)
        }
        ThmKfullLoyd => {
            let obs = loyd_observable(spec.compact_function()?, Statistic::ErdosKac { k }, orbit, None)?;
            run(&obs, &kfull()?)
        }
        Richter | Counts | Identities => unreachable!("not an average experiment"),
    }
}

fn counts_rows(spec: &ExperimentSpec, predicted: f64) -> Result<Vec<Row>> {
    let checkpoints = spec.checkpoint_list()?;
    match spec.k {
        Some(k) => {
            let members = enumerate_kfull(spec.n, k)?;
            Ok(checkpoints
                .iter()
                .map(|&c| {
                    let q = members.partition_point(|&v| v <= c) as u64;
                    let value = q as f64 / (c as f64).powf(1.0 / f64::from(k));
                    row(c, Complex64::new(value, 0.0), predicted, q)
                })
                .collect())
        }
        None => {
            let excluded = spec.excluded()?;
            checkpoints
                .iter()
                .map(|&c| {
                    let q = squarefree_count(c, &excluded)?;
                    Ok(row(c, Complex64::new(q as f64 / c as f64, 0.0), predicted, q))
                })
                .collect()
        }
    }
}

/// a(j) = cos(πj/s), so that a(j + s) = −a(j); for s = 1 this is (−1)^j
/// exactly. A plain (−1)^j would make every even shift trivially zero.
pub fn alternating(shift: u32) -> impl Fn(u32) -> f64 {
    move |j| {
        let r = j % (2 * shift);
        (std::f64::consts::PI * f64::from(r) / f64::from(shift)).cos()
    }
}

/// Shift by 1 over squarefree n coprime to S, or by k over k-full n.
fn richter_rows(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    let (restriction, shift) = match spec.k {
        Some(k) => (Restriction::kfull(k, Normalization::PerRoot)?, k),
        None => (Restriction::squarefree(spec.excluded()?, None), 1),
    };
    let a = alternating(shift);
    let deltas = richter_shift_deltas(a, &restriction, shift, &spec.checkpoint_list()?, spec.threads)?;
    Ok(deltas.iter().map(|d| row(d.n, Complex64::new(d.delta, 0.0), 0.0, d.members)).collect())
}

/// Exact identity suites for every subset of S, plus the Dirichlet series
/// and a seeded decomposition residual as attached checks.
fn identity_rows(spec: &ExperimentSpec, checks: &mut Vec<Check>) -> Result<Vec<Row>> {
    let n = spec.n;
    let sieve = FactorSieve::new(n.max(2))?;
    let subsets = spec.excluded()?.subsets();
    let mut failures = 0u64;
    let mut checked = 0u64;
    for s in &subsets {
        for check in [check_convolution(&sieve, n, s)?, check_dirichlet_inverse(&sieve, n, s)?] {
            failures += check.failures;
            checked += check.checked;
            checks.push(Check {
                name: format!("{} S={}", check.name, s),
                passed: check.passed(),
                detail: format!(
                    "checked {}, failures {}, first {:?}",
                    check.checked, check.failures, check.first_failures
                ),
            });
        }
        let series = check_series(&sieve, n, s)?;
        let tol = 2.0 / n as f64;
        checks.push(Check {
            name: format!("dirichlet-series S={s}"),
            passed: series.within(tol),
            detail: format!(
                "w: {:.12} vs {:.12}, mu: {:.12} vs {:.12}, tol {tol:.3e}",
                series.w_sum, series.w_limit, series.mu_sum, series.mu_limit
            ),
        });
    }
    let small = n.min(100_000);
    if small >= 4 {
        let d = iroot(small, 2);
        let residual = proposition3_residual(&RandomDisc::new(spec.seed), &PrimeSet::empty(), small, d)?;
        let bound = 10.0 * (1.0 / d as f64 + 1.0 / (small as f64).sqrt());
        checks.push(Check {
            name: format!("squarefree-decomposition seed={}", spec.seed),
            passed: residual <= bound,
            detail: format!("N={small}, D={d}, residual {residual:.3e}, bound {bound:.3e}"),
        });
    }
    Ok(vec![row(n, Complex64::new(failures as f64, 0.0), 0.0, checked)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn counts_example() {
        let spec = ExperimentSpec { n: 100, k: Some(2), ..ExperimentSpec::new(ExperimentId::Counts) };
        let r = run(&spec).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].members, 14);
        assert_eq!(r.rows[0].value_re, 1.4);
    }

    #[test]
    fn identities_pass() {
        let spec =
            ExperimentSpec { n: 20_000, exclude_primes: vec![2, 3], ..ExperimentSpec::new(ExperimentId::Identities) };
        let r = run(&spec).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.checks.len(), 4 * 3 + 1);
        assert_eq!(r.rows[0].value_re, 0.0);
    }

    #[test]
    fn squarefree_cos_run() {
        let spec = ExperimentSpec {
            n: 200_000,
            exclude_primes: vec![2],
            ffun: "cos".into(),
            ..ExperimentSpec::new(ExperimentId::ThmSquarefree)
        };
        let r = run(&spec).unwrap();
        assert_eq!(r.rows[0].n, 1000);
        assert!(r.within_tolerance, "{:?}", r.final_row());
    }

    #[test]
    fn predicted_limits_use_closed_forms() {
        let mut spec = ExperimentSpec { exclude_primes: vec![2], ..ExperimentSpec::new(ExperimentId::ThmSquarefree) };
        let want = (2.0 / 3.0) * 6.0 / std::f64::consts::PI.powi(2) * 0.5;
        assert!((predicted_limit(&spec).unwrap() - want).abs() < 1e-15);
        spec.experiment = ExperimentId::ThmKfullEk;
        spec.exclude_primes.clear();
        assert!((predicted_limit(&spec).unwrap() - 0.368_746_380_372_507).abs() < 1e-10);
    }

    #[test]
    fn invalid_spec_stops_before_compute() {
        let spec = ExperimentSpec { n: 0, ..ExperimentSpec::new(ExperimentId::Richter) };
        assert!(matches!(run(&spec), Err(Error::Validation(_))));
        let big = ExperimentSpec { n: 1 << 50, memory_cap_mb: 1, ..ExperimentSpec::new(ExperimentId::Identities) };
        assert!(matches!(run(&big), Err(Error::Capacity(_))));
    }

    #[test]
    fn alternating_sequences() {
        let a1 = alternating(1);
        assert!((0..50).all(|j| a1(j) == if j % 2 == 0 { 1.0 } else { -1.0 }));
        for s in 2..5 {
            let a = alternating(s);
            assert!((0..50).all(|j| (a(j + s) + a(j)).abs() < 1e-15));
        }
    }

    #[test]
    fn richter_matches_mertens_at_100() {
        let spec = ExperimentSpec { n: 100, ..ExperimentSpec::new(ExperimentId::Richter) };
        assert!((run(&spec).unwrap().rows[0].value_re - 0.02).abs() < 1e-15);
    }

    #[test]
    fn thread_count_does_not_change_csv() {
        let base = ExperimentSpec { n: 300_000, k: Some(2), ..ExperimentSpec::new(ExperimentId::ThmKfullLoyd) };
        let one = run(&base).unwrap().to_csv();
        let four = run(&ExperimentSpec { threads: 4, ..base.clone() }).unwrap().to_csv();
        assert_eq!(one, four);
    }
}
