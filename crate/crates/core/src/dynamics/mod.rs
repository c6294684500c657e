//! Concrete additive and multiplicative systems with exact invariant
//! integrals.
//!
//! Circle states are fixed-point fractions of a turn with 128 fractional
//! bits, so T^n x = x + nα mod 1 is one wrapping multiply-add and stays exact
//! for every n < 2^64.

mod function;
mod multiplicative;
mod observables;

pub use function::{Harmonic, StateFunction};
pub use multiplicative::{mult_act, MultiplicativeSystem};
pub use observables::{ap_observable, br_observable, ApObservable, MultObservable, OrbitObservable};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};

/// A point of R/Z stored as floor(x · 2^128).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Angle(pub u128);

impl Angle {
    pub const ZERO: Angle = Angle(0);
    /// (√5 − 1)/2
    pub const GOLDEN: Angle = Angle(0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c834);
    /// √2 − 1
    pub const SQRT2_MINUS_ONE: Angle = Angle(0x6a09_e667_f3bc_c908_b2fb_1366_ea95_7d3e);

    /// Reduces x mod 1, truncating below 2^-128. Every double in [2^-75, 1)
    /// converts exactly.
    pub fn from_f64(x: f64) -> Result<Angle> {
        if !x.is_finite() {
            return Err(Error::Argument(format!("angle must be finite, got {x}")));
        }
        let frac = x - x.floor();
        let scaled = frac * 2f64.powi(64);
        let hi = scaled.floor();
        let lo = (scaled - hi) * 2f64.powi(64);
        // frac < 1 but may round up to 1.0 for tiny negative inputs
        let hi = if hi >= 2f64.powi(64) { 0 } else { hi as u64 };
        Ok(Angle(((hi as u128) << 64) | lo as u64 as u128))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2f64.powi(128)
    }

    #[inline]
    pub fn add(self, other: Angle) -> Angle {
        Angle(self.0.wrapping_add(other.0))
    }

    #[inline]
    pub fn sub(self, other: Angle) -> Angle {
        Angle(self.0.wrapping_sub(other.0))
    }

    /// n · self mod 1.
    #[inline]
    pub fn times(self, n: u64) -> Angle {
        Angle(self.0.wrapping_mul(n as u128))
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self.to_f64())
    }
}

/// State of an [`AdditiveSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    Residue(u64),
    Point(Angle),
    Pair(Box<State>, Box<State>),
}

impl State {
    pub fn point(x: f64) -> Result<State> {
        Ok(State::Point(Angle::from_f64(x)?))
    }

    pub fn pair(a: State, b: State) -> State {
        State::Pair(Box::new(a), Box::new(b))
    }
}

/// x ↦ x + step mod m, x ↦ x + α mod 1, or a product of two such maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdditiveSystem {
    Cyclic {
        modulus: u64,
        step: u64,
    },
    /// `irrational` is the caller's claim about α; it cannot be decided
    /// from a float.
    Circle {
        alpha: Angle,
        irrational: bool,
    },
    Product(Box<AdditiveSystem>, Box<AdditiveSystem>),
}

impl AdditiveSystem {
    /// x ↦ x + 1 mod m.
    pub fn cyclic(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Argument("modulus must be positive".into()));
        }
        Ok(Self::Cyclic { modulus, step: 1 % modulus })
    }

    pub fn circle(alpha: f64, irrational: bool) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Argument(format!("rotation must lie in (0, 1), got {alpha}")));
        }
        Ok(Self::Circle { alpha: Angle::from_f64(alpha)?, irrational })
    }

    /// Rotation by the golden-ratio conjugate, marked irrational.
    pub fn golden() -> Self {
        Self::Circle { alpha: Angle::GOLDEN, irrational: true }
    }

    /// Rotation by √2 − 1, marked irrational.
    pub fn sqrt2() -> Self {
        Self::Circle { alpha: Angle::SQRT2_MINUS_ONE, irrational: true }
    }

    pub fn product(a: AdditiveSystem, b: AdditiveSystem) -> Self {
        Self::Product(Box::new(a), Box::new(b))
    }

    /// Unique ergodicity as far as it can be read off the parameters.
    ///
    /// Products of two rotations are reported as not uniquely ergodic,
    /// since that hinges on rational independence of the angles.
    pub fn uniquely_ergodic(&self) -> bool {
        match self {
            Self::Cyclic { modulus, step } => gcd(*step, *modulus) == 1,
            Self::Circle { irrational, .. } => *irrational,
            Self::Product(a, b) => match (a.as_ref(), b.as_ref()) {
                (Self::Cyclic { modulus: m1, .. }, Self::Cyclic { modulus: m2, .. }) => {
                    a.uniquely_ergodic() && b.uniquely_ergodic() && gcd(*m1, *m2) == 1
                }
                (Self::Cyclic { .. }, Self::Circle { .. }) | (Self::Circle { .. }, Self::Cyclic { .. }) => {
                    a.uniquely_ergodic() && b.uniquely_ergodic()
                }
                _ => false,
            },
        }
    }

    /// Every power T^n uniquely ergodic.
    pub fn totally_uniquely_ergodic(&self) -> bool {
        match self {
            Self::Cyclic { modulus, .. } => *modulus == 1,
            Self::Circle { irrational, .. } => *irrational,
            Self::Product(a, b) => match (a.as_ref(), b.as_ref()) {
                (Self::Cyclic { modulus: 1, .. }, other) | (other, Self::Cyclic { modulus: 1, .. }) => {
                    other.totally_uniquely_ergodic()
                }
                _ => false,
            },
        }
    }

    /// Checks that `x` is a state of this system.
    pub fn check_state(&self, x: &State) -> Result<()> {
        match (self, x) {
            (Self::Cyclic { modulus, .. }, State::Residue(r)) if r < modulus => Ok(()),
            (Self::Circle { .. }, State::Point(_)) => Ok(()),
            (Self::Product(a, b), State::Pair(x, y)) => {
                a.check_state(x)?;
                b.check_state(y)
            }
            _ => Err(Error::Argument(format!("{x:?} is not a state of {self:?}"))),
        }
    }

    fn orbit_unchecked(&self, x: &State, n: u64) -> State {
        match (self, x) {
            (Self::Cyclic { modulus, step }, State::Residue(r)) => {
                let m = *modulus as u128;
                let shift = (n as u128 % m) * (*step as u128) % m;
                State::Residue(((*r as u128 + shift) % m) as u64)
            }
            (Self::Circle { alpha, .. }, State::Point(p)) => State::Point(p.add(alpha.times(n))),
            (Self::Product(a, b), State::Pair(x, y)) => State::pair(a.orbit_unchecked(x, n), b.orbit_unchecked(y, n)),
            _ => unreachable!("state checked by caller"),
        }
    }
}

/// T^n x, computed in one step.
pub fn orbit_value(sys: &AdditiveSystem, x: &State, n: u64) -> Result<State> {
    sys.check_state(x)?;
    Ok(sys.orbit_unchecked(x, n))
}

/// The system with transform T^k.
pub fn power_system(sys: &AdditiveSystem, k: u64) -> Result<AdditiveSystem> {
    if k == 0 {
        return Err(Error::Argument("power must be at least 1".into()));
    }
    Ok(match sys {
        AdditiveSystem::Cyclic { modulus, step } => {
            AdditiveSystem::Cyclic { modulus: *modulus, step: ((*step as u128 * k as u128) % *modulus as u128) as u64 }
        }
        AdditiveSystem::Circle { alpha, irrational } => {
            AdditiveSystem::Circle { alpha: alpha.times(k), irrational: *irrational }
        }
        AdditiveSystem::Product(a, b) => AdditiveSystem::product(power_system(a, k)?, power_system(b, k)?),
    })
}

/// ∫ f dμ for the system's invariant measure, in closed form.
pub fn integrate(sys: &AdditiveSystem, f: &StateFunction) -> Result<f64> {
    f.integral_on(sys)
}
