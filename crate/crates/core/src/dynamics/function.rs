use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{AdditiveSystem, State};
use crate::error::{Error, Result};

/// a·cos(2π·freq·x) + b·sin(2π·freq·x)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub freq: u32,
    pub cos: f64,
    pub sin: f64,
}

/// Continuous functions on a state space whose invariant integral is known
/// in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFunction {
    /// Trigonometric polynomial on the circle.
    Trig { constant: f64, harmonics: Vec<Harmonic> },
    /// Periodic triangle on the circle, peak `height` at `center`.
    Hat { center: f64, half_width: f64, height: f64 },
    /// Values on the residues of a cyclic system, one per residue.
    Table(Vec<f64>),
    /// f(x)·g(y) on a product system.
    Product(Box<StateFunction>, Box<StateFunction>),
}

impl StateFunction {
    pub fn trig(constant: f64, harmonics: Vec<Harmonic>) -> Result<Self> {
        if harmonics.iter().any(|h| h.freq == 0) {
            return Err(Error::Argument("harmonic frequencies must be positive".into()));
        }
        Ok(Self::Trig { constant, harmonics })
    }

    /// cos(2π·freq·x)
    pub fn cos(freq: u32) -> Self {
        Self::Trig { constant: 0.0, harmonics: vec![Harmonic { freq, cos: 1.0, sin: 0.0 }] }
    }

    /// sin(2π·freq·x)
    pub fn sin(freq: u32) -> Self {
        Self::Trig { constant: 0.0, harmonics: vec![Harmonic { freq, cos: 0.0, sin: 1.0 }] }
    }

    /// sin²(2πx) = 1/2 − cos(4πx)/2
    pub fn sin_squared() -> Self {
        Self::Trig { constant: 0.5, harmonics: vec![Harmonic { freq: 2, cos: -0.5, sin: 0.0 }] }
    }

    pub fn hat(center: f64, half_width: f64, height: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= 0.5) {
            return Err(Error::Argument(format!("hat half-width must be in (0, 1/2], got {half_width}")));
        }
        Ok(Self::Hat { center: center - center.floor(), half_width, height })
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("table needs at least one value".into()));
        }
        Ok(Self::Table(values))
    }

    /// +1 on residue 0, −1 on residue 1: with x ↦ x+1 mod 2 this turns
    /// f(T^{Ω(n)}0) into λ(n).
    pub fn parity() -> Self {
        Self::Table(vec![1.0, -1.0])
    }

    pub fn product(f: StateFunction, g: StateFunction) -> Self {
        Self::Product(Box::new(f), Box::new(g))
    }

    /// Upper bound on |f|.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Self::Trig { constant, harmonics } => {
                constant.abs() + harmonics.iter().map(|h| h.cos.hypot(h.sin)).sum::<f64>()
            }
            Self::Hat { height, .. } => height.abs(),
            Self::Table(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Self::Product(f, g) => f.sup_bound() * g.sup_bound(),
        }
    }

    /// Value at a point of the circle, given as a fraction of a turn.
    pub fn eval_circle(&self, x: f64) -> Result<f64> {
        match self {
            Self::Trig { constant, harmonics } => Ok(harmonics.iter().fold(*constant, |acc, h| {
                let t = TAU * (h.freq as f64 * x).fract();
                acc + h.cos * t.cos() + h.sin * t.sin()
            })),
            Self::Hat { center, half_width, height } => {
                let d = (x - center).rem_euclid(1.0);
                let d = d.min(1.0 - d);
                Ok(height * (1.0 - d / half_width).max(0.0))
            }
            _ => Err(Error::Unsupported(format!("{self:?} is not a function on the circle"))),
        }
    }

    pub fn eval(&self, x: &State) -> Result<f64> {
        match (self, x) {
            (Self::Trig { .. } | Self::Hat { .. }, State::Point(a)) => self.eval_circle(a.to_f64()),
            (Self::Table(v), State::Residue(r)) => v
                .get(*r as usize)
                .copied()
                .ok_or_else(|| Error::Argument(format!("residue {r} outside a table of {}", v.len()))),
            (Self::Product(f, g), State::Pair(x, y)) => Ok(f.eval(x)? * g.eval(y)?),
            _ => Err(Error::Unsupported(format!("{self:?} cannot be evaluated at {x:?}"))),
        }
    }

    pub(super) fn integral_on(&self, sys: &AdditiveSystem) -> Result<f64> {
        match (self, sys) {
            (Self::Trig { constant, .. }, AdditiveSystem::Circle { .. }) => Ok(*constant),
            (Self::Hat { half_width, height, .. }, AdditiveSystem::Circle { .. }) => Ok(height * half_width),
            (Self::Table(v), AdditiveSystem::Cyclic { modulus, .. }) if v.len() as u64 == *modulus => {
                Ok(v.iter().sum::<f64>() / v.len() as f64)
            }
            (Self::Product(f, g), AdditiveSystem::Product(a, b)) => Ok(f.integral_on(a)? * g.integral_on(b)?),
            _ => Err(Error::Unsupported(format!("no closed-form integral of {self:?} on {sys:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{integrate, orbit_value, Angle};
    use super::*;

    #[test]
    fn integral_examples() {
        let circle = AdditiveSystem::golden();
        assert_eq!(integrate(&circle, &StateFunction::cos(1)).unwrap(), 0.0);
        assert_eq!(integrate(&circle, &StateFunction::sin_squared()).unwrap(), 0.5);
        let two = AdditiveSystem::cyclic(2).unwrap();
        assert_eq!(integrate(&two, &StateFunction::parity()).unwrap(), 0.0);
        let hat = StateFunction::hat(0.3, 0.2, 2.0).unwrap();
        assert!((integrate(&circle, &hat).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn unsupported_pairs() {
        let two = AdditiveSystem::cyclic(2).unwrap();
        assert!(matches!(integrate(&two, &StateFunction::cos(1)), Err(Error::Unsupported(_))));
        let three = AdditiveSystem::cyclic(3).unwrap();
        assert!(matches!(integrate(&three, &StateFunction::parity()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sin_squared_matches_definition() {
        let f = StateFunction::sin_squared();
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert!((f.eval_circle(x).unwrap() - (TAU * x).sin().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn hat_wraps_around() {
        let f = StateFunction::hat(0.95, 0.1, 1.0).unwrap();
        assert!((f.eval_circle(0.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(f.eval_circle(0.5).unwrap(), 0.0);
        assert_eq!(f.sup_bound(), 1.0);
    }

    #[test]
    fn product_function_on_product_system() {
        let sys = AdditiveSystem::product(AdditiveSystem::cyclic(2).unwrap(), AdditiveSystem::golden());
        let f = StateFunction::product(StateFunction::parity(), StateFunction::sin_squared());
        assert_eq!(integrate(&sys, &f).unwrap(), 0.0);
        let x = State::pair(State::Residue(0), State::point(0.0).unwrap());
        let y = orbit_value(&sys, &x, 1).unwrap();
        let expected = -(TAU * Angle::GOLDEN.to_f64()).sin().powi(2);
        assert!((f.eval(&y).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn birkhoff_averages_converge() {
        let sys = AdditiveSystem::golden();
        let x = State::point(0.0).unwrap();
        let fs = [StateFunction::cos(1), StateFunction::sin(1), StateFunction::sin_squared()];
        for f in &fs {
            let n = 1_000_000u64;
            let mean: f64 =
                (1..=n).map(|i| f.eval(&orbit_value(&sys, &x, i).unwrap()).unwrap()).sum::<f64>() / n as f64;
            assert!((mean - integrate(&sys, f).unwrap()).abs() <= 0.01, "{f:?}");
        }
    }
}
