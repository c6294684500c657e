use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, PrimeFamily, PrimeSet};
use crate::dynamics::{AdditiveSystem, Angle, StateFunction};
use crate::ergodic::{checkpoint_grid, CompactFunction, HorizonMode};
use crate::error::{Error, Result};

/// Environment variable read for the worker count unless overridden.
pub const DEFAULT_THREADS_ENV: &str = "OMEGA_THREADS";

/// Largest N any experiment accepts; the factor tables reach 2^56.
pub const MAX_N: u64 = 1 << 56;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    ThmSquarefree,
    ThmBkwLoyd,
    ThmMultiplicative,
    ThmAp,
    ThmKfullErgodic,
    ThmKfullEk,
    ThmKfullLoyd,
    Richter,
    Counts,
    Identities,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        Self::ThmSquarefree,
        Self::ThmBkwLoyd,
        Self::ThmMultiplicative,
        Self::ThmAp,
        Self::ThmKfullErgodic,
        Self::ThmKfullEk,
        Self::ThmKfullLoyd,
        Self::Richter,
        Self::Counts,
        Self::Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ThmSquarefree => "thm-squarefree",
            Self::ThmBkwLoyd => "thm-bkw-loyd",
            Self::ThmMultiplicative => "thm-multiplicative",
            Self::ThmAp => "thm-ap",
            Self::ThmKfullErgodic => "thm-kfull-ergodic",
            Self::ThmKfullEk => "thm-kfull-ek",
            Self::ThmKfullLoyd => "thm-kfull-loyd",
            Self::Richter => "richter",
            Self::Counts => "counts",
            Self::Identities => "identities",
        }
    }

    fn is_kfull(self) -> bool {
        matches!(self, Self::ThmKfullErgodic | Self::ThmKfullEk | Self::ThmKfullLoyd)
    }

    /// Uses a normalized statistic, so every checkpoint needs N ≥ 100.
    fn normalized(self) -> bool {
        matches!(self, Self::ThmBkwLoyd | Self::ThmKfullEk | Self::ThmKfullLoyd)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Argument(format!("unknown format `{s}`"))),
        }
    }
}

/// Where checkpoints fall. In config files: a ratio (`1.7783`), a list
/// (`[1000, 5000]`) or the CLI string form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CheckpointRepr", into = "CheckpointRepr")]
pub enum CheckpointPolicy {
    /// round(10^3·ratio^j) below N, then N.
    Geometric { ratio: f64 },
    /// Explicit ascending list; N is appended when missing.
    List { points: Vec<u64> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CheckpointRepr {
    Ratio(f64),
    Points(Vec<u64>),
    Text(String),
}

impl TryFrom<CheckpointRepr> for CheckpointPolicy {
    type Error = Error;
    fn try_from(r: CheckpointRepr) -> Result<Self> {
        match r {
            CheckpointRepr::Ratio(ratio) => Ok(Self::Geometric { ratio }),
            CheckpointRepr::Points(points) => Ok(Self::List { points }),
            CheckpointRepr::Text(s) => s.parse(),
        }
    }
}

impl From<CheckpointPolicy> for CheckpointRepr {
    fn from(p: CheckpointPolicy) -> Self {
        match p {
            CheckpointPolicy::Geometric { ratio } => Self::Ratio(ratio),
            CheckpointPolicy::List { points } => Self::Points(points),
        }
    }
}

impl Default for CheckpointPolicy {
    fn default() -> Self {
        Self::Geometric { ratio: 10f64.powf(0.25) }
    }
}

impl FromStr for CheckpointPolicy {
    type Err = Error;
    /// A ratio such as `1.7783`, or a comma list such as `1000,10000,`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("cannot read checkpoints from `{s}`"));
        if s.contains(',') {
            let points = s
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| p.replace('_', "").parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Self::List { points })
        } else {
            Ok(Self::Geometric { ratio: s.trim().parse().map_err(|_| bad())? })
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: ExperimentId,
    pub n: u64,
    pub k: Option<u32>,
    /// The finite prime set S.
    pub exclude_primes: Vec<u64>,
    /// The p_max family T: `all` or `1mod4`.
    pub prime_family: Option<String>,
    pub m: Option<u64>,
    pub r: Option<u64>,
    /// `golden`, `sqrt2` or `custom:<value in (0,1)>`.
    pub alpha: String,
    /// Circle function f: `sin2`, `cos`, `sin`, `cos2`, `tri`.
    pub ffun: String,
    /// Compact function F: `hat`, `raised_cosine`, `plateau`, `one`.
    pub bigf: String,
    pub seed: u64,
    pub checkpoints: CheckpointPolicy,
    pub horizon: HorizonMode,
    pub threads: usize,
    /// Record wall time in the `ms` column. Off by default so that output
    /// bytes depend on the spec alone.
    pub timing: bool,
    pub memory_cap_mb: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            experiment: ExperimentId::ThmSquarefree,
            n: 1_000_000,
            k: None,
            exclude_primes: Vec::new(),
            prime_family: None,
            m: None,
            r: None,
            alpha: "golden".into(),
            ffun: "sin2".into(),
            bigf: "hat".into(),
            seed: 0,
            checkpoints: CheckpointPolicy::default(),
            horizon: HorizonMode::default(),
            threads: 1,
            timing: false,
            memory_cap_mb: 4096,
            out: None,
            format: Format::Csv,
        }
    }
}

/// Rotation angle of a circle system.
pub fn parse_alpha(s: &str) -> Result<(Angle, AdditiveSystem)> {
    match s {
        "golden" => Ok((Angle::GOLDEN, AdditiveSystem::golden())),
        "sqrt2" => Ok((Angle::SQRT2_MINUS_ONE, AdditiveSystem::sqrt2())),
        _ => {
            let v = s
                .strip_prefix("custom:")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Argument(format!("alpha must be golden, sqrt2 or custom:<v>, got `{s}`")))?;
            // user-supplied values are taken to stand for irrationals
            let sys = AdditiveSystem::circle(v, true)?;
            Ok((Angle::from_f64(v)?, sys))
        }
    }
}

/// Circle functions by id.
pub fn parse_ffun(s: &str) -> Result<StateFunction> {
    match s {
        "sin2" => Ok(StateFunction::sin_squared()),
        "cos" => Ok(StateFunction::cos(1)),
        "sin" => Ok(StateFunction::sin(1)),
        "cos2" => Ok(StateFunction::cos(2)),
        "tri" => StateFunction::hat(0.0, 0.25, 1.0),
        _ => Err(Error::Argument(format!("unknown circle function `{s}`"))),
    }
}

pub fn parse_prime_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<u64>().map_err(|_| Error::Argument(format!("`{p}` is not an integer"))))
        .collect()
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentId) -> Self {
        Self { experiment, ..Self::default() }
    }

    /// Reads a spec from a TOML file; missing keys take their defaults.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn excluded(&self) -> Result<PrimeSet> {
        PrimeSet::new(self.exclude_primes.iter().copied())
    }

    pub fn family(&self) -> Result<Option<PrimeFamily>> {
        self.prime_family.as_deref().map(PrimeFamily::by_name).transpose()
    }

    pub fn compact_function(&self) -> Result<CompactFunction> {
        CompactFunction::by_name(&self.bigf)
    }

    /// k for experiments that need it, with defaults filled in.
    pub fn k_or_default(&self) -> u32 {
        match self.experiment {
            ExperimentId::ThmBkwLoyd => self.k.unwrap_or(1),
            _ => self.k.unwrap_or(2),
        }
    }

    /// The checkpoint grid for this spec, ending at N.
    pub fn checkpoint_list(&self) -> Result<Vec<u64>> {
        match &self.checkpoints {
            CheckpointPolicy::Geometric { ratio } => checkpoint_grid(self.n, *ratio),
            CheckpointPolicy::List { points } => {
                let mut v: Vec<u64> = points.iter().copied().filter(|&p| p < self.n).collect();
                v.push(self.n);
                Ok(v)
            }
        }
    }

    /// Checks every parameter against the experiment's preconditions and
    /// lists all offending fields at once.
    pub fn validate(&self) -> Result<()> {
        use ExperimentId::*;
        let e = self.experiment;
        let mut bad = Vec::new();
        if self.n == 0 {
            bad.push("n: must be at least 1".to_string());
        }
        if self.n > MAX_N {
            bad.push(format!("n: must not exceed 2^56 = {MAX_N}"));
        }
        if e.normalized() && self.n < 100 {
            bad.push("n: normalized statistics need N >= 100".into());
        }
        for &p in &self.exclude_primes {
            if !is_prime(p) {
                bad.push(format!("exclude-primes: {p} is not prime"));
            }
        }
        if PrimeSet::new(self.exclude_primes.iter().copied()).is_ok_and(|s| s.len() != self.exclude_primes.len()) {
            bad.push("exclude-primes: duplicate entries".into());
        }
        if !self.exclude_primes.is_empty() && (e.is_kfull() || e == ThmAp) {
            bad.push(format!("exclude-primes: {e} does not take an excluded prime set"));
        }
        if !self.exclude_primes.is_empty() && e == Richter && self.k.is_some() {
            bad.push("exclude-primes: the k-full shift check does not take an excluded prime set".into());
        }
        if let Some(t) = &self.prime_family {
            if e != ThmBkwLoyd {
                bad.push(format!("prime-family: only thm-bkw-loyd filters by p_max, not {e}"));
            } else if PrimeFamily::by_name(t).is_err() {
                bad.push(format!("prime-family: `{t}` is not one of all, 1mod4"));
            }
        }
        if let Some(k) = self.k {
            match e {
                ThmBkwLoyd if k > 4 => bad.push("k: totient iterates beyond 4 are not supported".into()),
                ThmBkwLoyd => {}
                _ if e.is_kfull() || matches!(e, Counts | Richter) => {
                    if !(2..=8).contains(&k) {
                        bad.push(format!("k: k-full restrictions need 2 <= k <= 8, got {k}"));
                    }
                }
                _ => bad.push(format!("k: {e} does not take k")),
            }
        }
        if e == ThmAp {
            let m = self.m.unwrap_or(1);
            let r = self.r.unwrap_or(0);
            if m == 0 || r >= m {
                bad.push(format!("m, r: need m >= 1 and 0 <= r < m, got m={m}, r={r}"));
            } else if self.n.checked_mul(m).and_then(|v| v.checked_add(r)).is_none_or(|v| v > MAX_N) {
                bad.push("m: mN + r exceeds the factorization range".into());
            }
        } else if self.m.is_some() || self.r.is_some() {
            bad.push(format!("m, r: only thm-ap takes a progression, not {e}"));
        }
        if parse_alpha(&self.alpha).is_err() {
            bad.push(format!("alpha: `{}` is not golden, sqrt2 or custom:<v> with v in (0,1)", self.alpha));
        }
        if parse_ffun(&self.ffun).is_err() {
            bad.push(format!("ffun: `{}` is not one of sin2, cos, sin, cos2, tri", self.ffun));
        }
        if CompactFunction::by_name(&self.bigf).is_err() {
            bad.push(format!("bigf: `{}` is not one of hat, raised_cosine, plateau, one", self.bigf));
        }
        match &self.checkpoints {
            CheckpointPolicy::Geometric { ratio } if !(*ratio > 1.0 && ratio.is_finite()) => {
                bad.push(format!("checkpoints: ratio must exceed 1, got {ratio}"));
            }
            CheckpointPolicy::List { points } => {
                if points.is_empty() {
                    bad.push("checkpoints: list is empty".into());
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    bad.push("checkpoints: list must be strictly increasing".into());
                }
                if points.first() == Some(&0) {
                    bad.push("checkpoints: must be positive".into());
                }
                if points.last().is_some_and(|&p| p > self.n) {
                    bad.push("checkpoints: must not exceed n".into());
                }
                if e.normalized()
                    && self.horizon == HorizonMode::PerCheckpoint
                    && points.first().is_some_and(|&p| p < 100)
                {
                    bad.push("checkpoints: normalized statistics need every checkpoint >= 100".into());
                }
            }
            _ => {}
        }
        if self.threads == 0 {
            bad.push("threads: must be at least 1".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Rough peak memory of a run in bytes.
    pub fn memory_estimate(&self) -> u64 {
        use ExperimentId::*;
        let n = self.n as f64;
        let threads = self.threads.max(1) as f64;
        // segment buffers per worker plus the primes up to √N
        let segmented = threads * 4.0 * 8.0 * 65_536.0 + 4.0 * n.sqrt();
        let dense_table = |limit: f64| 5.0 * limit.min((1u64 << 24) as f64).max(limit.sqrt());
        let kfull = || {
            // members with Ω, p_max and the canonical form, plus the small table
            let k = f64::from(self.k_or_default());
            96.0 * 3.0 * n.powf(1.0 / k) + 8.0 * n.powf(1.0 / (k + 1.0))
        };
        let bytes = match self.experiment {
            ThmSquarefree | ThmMultiplicative => segmented,
            Richter | Counts if self.k.is_none() => segmented,
            ThmBkwLoyd => segmented + dense_table(n),
            ThmAp => segmented + dense_table(n * self.m.unwrap_or(1) as f64),
            Identities => 20.0 * n,
            Richter | Counts | ThmKfullErgodic | ThmKfullEk | ThmKfullLoyd => kfull(),
        };
        bytes as u64
    }

    /// Capacity error when the estimate exceeds the cap.
    pub fn check_capacity(&self) -> Result<()> {
        let need = self.memory_estimate();
        let cap = self.memory_cap_mb.saturating_mul(1 << 20);
        if need > cap {
            return Err(Error::Capacity(format!(
                "{} at N={} needs about {} MiB, cap is {} MiB",
                self.experiment,
                self.n,
                need >> 20,
                self.memory_cap_mb
            )));
        }
        Ok(())
    }
}
