//! Erdős–Kac type normalizations, compactly supported test functions and
//! distances to the standard normal law.

use std::fmt;
use std::sync::Arc;

use libm::erfc;

use super::average::OmegaHistogram;
use crate::arith::FactorSieve;
use crate::error::{Error, Result};
use crate::numeric::integrate_adaptive;

/// Smallest horizon for which normalized statistics are defined.
pub const MIN_HORIZON: f64 = 100.0;

/// Centering and scaling for the totient-iterate statistic at horizon N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizerParams {
    pub k: u32,
    /// 1/(k+1)!
    pub a_k: f64,
    /// k!/√(2k+1)
    pub b_k: f64,
    pub horizon: f64,
    /// log log N
    pub loglog: f64,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

impl NormalizerParams {
    pub fn new(k: u32, horizon: f64) -> Result<Self> {
        if !(horizon >= MIN_HORIZON) {
            return Err(Error::Domain(format!("normalized statistics need N >= 100, got {horizon}")));
        }
        let mut p = Self::with_loglog(k, horizon.ln().ln())?;
        p.horizon = horizon;
        Ok(p)
    }

    /// Parameters for a given value of log log N directly.
    pub fn with_loglog(k: u32, loglog: f64) -> Result<Self> {
        if !(loglog > 0.0 && loglog.is_finite()) {
            return Err(Error::Domain(format!("log log N must be positive, got {loglog}")));
        }
        Ok(Self {
            k,
            a_k: 1.0 / factorial(k + 1),
            b_k: factorial(k) / f64::from(2 * k + 1).sqrt(),
            horizon: loglog.exp().exp(),
            loglog,
        })
    }

    /// (Ω − kL)/(k√L) for a known Ω.
    pub fn ek(&self, omega: u32) -> Result<f64> {
        if self.k == 0 {
            return Err(Error::Argument("the k-full statistic needs k >= 1".into()));
        }
        let k = f64::from(self.k);
        Ok((f64::from(omega) - k * self.loglog) / (k * self.loglog.sqrt()))
    }

    /// (Ω(φ_k) − a_k L^{k+1})/(b_k L^{k+1/2}) for a known Ω(φ_k(n)).
    pub fn bkw(&self, omega_phi: u32) -> f64 {
        let l = self.loglog;
        let k = f64::from(self.k);
        (f64::from(omega_phi) - self.a_k * l.powf(k + 1.0)) / (self.b_k * l.powf(k + 0.5))
    }
}

/// (Ω(n) − k log log N)/(k √(log log N)).
pub fn ek_normalized(n: u64, params: &NormalizerParams, sieve: &FactorSieve) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    params.ek(sieve.big_omega(n)?)
}

/// (Ω(φ_k(n)) − a_k (log log N)^{k+1})/(b_k (log log N)^{k+1/2}).
pub fn bkw_normalized(n: u64, params: &NormalizerParams, sieve: &FactorSieve) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    let phi = sieve.iterated_totient(n, params.k)?;
    Ok(params.bkw(sieve.big_omega(phi)?))
}

type CustomFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous function of compact support.
#[derive(Clone)]
pub enum CompactFunction {
    /// Triangle of the given height on [center − w, center + w].
    Hat {
        center: f64,
        half_width: f64,
        height: f64,
    },
    /// height·(1 + cos(π(t − center)/w))/2 on [center − w, center + w].
    RaisedCosine {
        center: f64,
        half_width: f64,
        height: f64,
    },
    /// 1 on [lo, hi], linear down to 0 over `ramp` on both sides.
    Plateau {
        lo: f64,
        hi: f64,
        ramp: f64,
    },
    Custom {
        f: CustomFn,
        lo: f64,
        hi: f64,
        sup: f64,
        breakpoints: Vec<f64>,
    },
    Combination(Vec<(f64, CompactFunction)>),
}

impl fmt::Debug for CompactFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hat { center, half_width, height } => {
                write!(f, "Hat({center}, {half_width}, {height})")
            }
            Self::RaisedCosine { center, half_width, height } => {
                write!(f, "RaisedCosine({center}, {half_width}, {height})")
            }
            Self::Plateau { lo, hi, ramp } => write!(f, "Plateau({lo}, {hi}, {ramp})"),
            Self::Custom { lo, hi, .. } => write!(f, "Custom[{lo}, {hi}]"),
            Self::Combination(parts) => f.debug_list().entries(parts).finish(),
        }
    }
}

fn positive_width(w: f64) -> Result<()> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("width must be positive and finite, got {w}")))
    }
}

impl CompactFunction {
    pub fn hat(center: f64, half_width: f64, height: f64) -> Result<Self> {
        positive_width(half_width)?;
        Ok(Self::Hat { center, half_width, height })
    }

    /// The triangle on [−1, 1] with peak 1.
    pub fn unit_hat() -> Self {
        Self::Hat { center: 0.0, half_width: 1.0, height: 1.0 }
    }

    pub fn raised_cosine(center: f64, half_width: f64, height: f64) -> Result<Self> {
        positive_width(half_width)?;
        Ok(Self::RaisedCosine { center, half_width, height })
    }

    pub fn plateau(lo: f64, hi: f64, ramp: f64) -> Result<Self> {
        positive_width(ramp)?;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!("plateau needs finite lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(Self::Plateau { lo, hi, ramp })
    }

    /// A user function; it must vanish outside [lo, hi] and be bounded by `sup`.
    pub fn custom<F>(f: F, lo: f64, hi: f64, sup: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::Custom { f: Arc::new(f), lo, hi, sup, breakpoints: Vec::new() }
    }

    /// Kinks inside the support that quadrature should split at.
    pub fn with_breakpoints(self, points: Vec<f64>) -> Self {
        match self {
            Self::Custom { f, lo, hi, sup, .. } => Self::Custom { f, lo, hi, sup, breakpoints: points },
            other => other,
        }
    }

    pub fn zero() -> Self {
        Self::Combination(Vec::new())
    }

    pub fn combine(terms: Vec<(f64, CompactFunction)>) -> Self {
        Self::Combination(terms)
    }

    /// Looks up a built-in by name: `hat`, `raised_cosine`, `plateau`, `one`.
    ///
    /// `one` is a plateau on [−50, 50], which equals 1 wherever a
    /// normalized statistic can land in practice.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "hat" => Ok(Self::unit_hat()),
            "raised_cosine" => Self::raised_cosine(0.0, 1.0, 1.0),
            "plateau" => Self::plateau(-1.0, 1.0, 0.5),
            "one" => Self::plateau(-50.0, 50.0, 1.0),
            _ => Err(Error::Argument(format!("unknown function {name:?}"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Hat { center, half_width, height } => height * (1.0 - (t - center).abs() / half_width).max(0.0),
            Self::RaisedCosine { center, half_width, height } => {
                let d = (t - center) / half_width;
                if d.abs() >= 1.0 {
                    0.0
                } else {
                    height * 0.5 * (1.0 + (std::f64::consts::PI * d).cos())
                }
            }
            Self::Plateau { lo, hi, ramp } => {
                let d = if t < *lo {
                    lo - t
                } else if t > *hi {
                    t - hi
                } else {
                    0.0
                };
                (1.0 - d / ramp).max(0.0)
            }
            Self::Custom { f, lo, hi, .. } => {
                if t < *lo || t > *hi {
                    0.0
                } else {
                    f(t)
                }
            }
            Self::Combination(parts) => parts.iter().map(|(c, g)| c * g.eval(t)).sum(),
        }
    }

    /// Closed support interval; (0, 0) for the zero function.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Hat { center, half_width, .. } | Self::RaisedCosine { center, half_width, .. } => {
                (center - half_width, center + half_width)
            }
            Self::Plateau { lo, hi, ramp } => (lo - ramp, hi + ramp),
            Self::Custom { lo, hi, .. } => (*lo, *hi),
            Self::Combination(parts) => {
                parts.iter().map(|(_, g)| g.support()).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1))).unwrap_or((0.0, 0.0))
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Hat { height, .. } | Self::RaisedCosine { height, .. } => height.abs(),
            Self::Plateau { .. } => 1.0,
            Self::Custom { sup, .. } => *sup,
            Self::Combination(parts) => parts.iter().map(|(c, g)| c.abs() * g.sup_norm()).sum(),
        }
    }

    /// Support ends and interior kinks, unsorted.
    fn breakpoints(&self, out: &mut Vec<f64>) {
        let (lo, hi) = self.support();
        out.extend([lo, hi]);
        match self {
            Self::Hat { center, .. } => out.push(*center),
            Self::Plateau { lo, hi, .. } => out.extend([*lo, *hi]),
            Self::Custom { breakpoints, .. } => out.extend(breakpoints),
            Self::Combination(parts) => parts.iter().for_each(|(_, g)| g.breakpoints(out)),
            Self::RaisedCosine { .. } => {}
        }
    }
}

/// Φ(x) = P(Z ≤ x) for a standard normal Z.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// (1/√(2π)) ∫ F(t) e^{−t²/2} dt, to absolute error 1e−10.
pub fn gaussian_expectation(f: &CompactFunction) -> Result<f64> {
    let (lo, hi) = f.support();
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Argument("gaussian_expectation needs bounded support".into()));
    }
    let mut cuts = Vec::new();
    f.breakpoints(&mut cuts);
    cuts.retain(|x| x.is_finite() && (lo..=hi).contains(x));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let density = |t: f64| f.eval(t) * (-0.5 * t * t).exp();
    let pieces = cuts.len().max(2) - 1;
    let tol = 1e-11 / pieces as f64;
    let total: f64 = cuts.windows(2).map(|w| integrate_adaptive(&density, w[0], w[1], tol)).sum();
    Ok(total / (2.0 * std::f64::consts::PI).sqrt())
}

/// sup over sample points x of |F_n(x) − Φ(x)| with F_n the
/// right-continuous empirical distribution function.
pub fn ks_distance_to_gaussian(samples: &[f64]) -> Result<f64> {
    let mut points: Vec<(f64, u64)> = samples.iter().map(|&x| (x, 1)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    ks_sorted_weighted(&points)
}

/// [`ks_distance_to_gaussian`] for samples given as (value, multiplicity).
pub fn ks_distance_weighted(points: &[(f64, u64)]) -> Result<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    ks_sorted_weighted(&sorted)
}

fn ks_sorted_weighted(points: &[(f64, u64)]) -> Result<f64> {
    let total: u64 = points.iter().map(|p| p.1).sum();
    if total == 0 {
        return Err(Error::Argument("KS distance needs at least one sample".into()));
    }
    if points.iter().any(|p| p.0.is_nan()) {
        return Err(Error::Argument("samples must not be NaN".into()));
    }
    let mut seen = 0u64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < points.len() {
        let x = points[i].0;
        while i < points.len() && points[i].0 == x {
            seen += points[i].1;
            i += 1;
        }
        if seen == 0 {
            continue;
        }
        best = best.max((seen as f64 / total as f64 - normal_cdf(x)).abs());
    }
    Ok(best)
}

/// KS distance of the (Ω − kL)/(k√L) samples recorded in a histogram.
pub fn ek_ks_distance(hist: &OmegaHistogram, params: &NormalizerParams) -> Result<f64> {
    let points =
        hist.counts.iter().enumerate().map(|(j, &c)| Ok((params.ek(j as u32)?, c))).collect::<Result<Vec<_>>>()?;
    ks_sorted_weighted(&points)
}
