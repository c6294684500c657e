use num_complex::Complex64;

use super::{integrate, orbit_value, AdditiveSystem, Angle, MultiplicativeSystem, State, StateFunction};
use crate::ergodic::{Observable, Point};
use crate::error::{Error, Result};

/// Ω(n) < 64 for every u64, so the whole orbit segment that can be reached
/// fits in a table.
const ORBIT_TABLE: usize = 128;

/// n ↦ f(T^{Ω(n)} x).
#[derive(Debug, Clone)]
pub struct OrbitObservable {
    sys: AdditiveSystem,
    f: StateFunction,
    values: Vec<f64>,
}

impl OrbitObservable {
    pub fn new(sys: AdditiveSystem, x: State, f: StateFunction) -> Result<Self> {
        sys.check_state(&x)?;
        let values =
            (0..ORBIT_TABLE as u64).map(|j| f.eval(&orbit_value(&sys, &x, j)?)).collect::<Result<Vec<f64>>>()?;
        Ok(Self { sys, f, values })
    }

    /// f(T^j x)
    #[inline]
    pub fn value_at(&self, j: u32) -> f64 {
        self.values[j as usize]
    }

    /// ∫ f dμ.
    pub fn integral(&self) -> Result<f64> {
        integrate(&self.sys, &self.f)
    }

    pub fn system(&self) -> &AdditiveSystem {
        &self.sys
    }
}

impl Observable for OrbitObservable {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        Ok(Complex64::new(self.value_at(at.omega), 0.0))
    }
    fn sup_norm(&self) -> f64 {
        self.f.sup_bound()
    }
}

/// The Bergelson–Richter observable n ↦ f(T^{Ω(n)} x).
pub fn br_observable(sys: &AdditiveSystem, x: &State, f: &StateFunction) -> Result<OrbitObservable> {
    OrbitObservable::new(sys.clone(), x.clone(), f.clone())
}

/// n ↦ f(T^{Ω(mn + r)} x).
#[derive(Debug, Clone)]
pub struct ApObservable {
    orbit: OrbitObservable,
    m: u64,
    r: u64,
}

impl ApObservable {
    fn argument(&self, n: u64) -> Result<u64> {
        n.checked_mul(self.m).and_then(|v| v.checked_add(self.r)).ok_or(Error::Overflow("mn + r"))
    }

    pub fn integral(&self) -> Result<f64> {
        self.orbit.integral()
    }
}

impl Observable for ApObservable {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        let omega =
            if self.m == 1 && self.r == 0 { at.omega } else { at.context().sieve().big_omega(self.argument(at.n)?)? };
        Ok(Complex64::new(self.orbit.value_at(omega), 0.0))
    }
    fn sup_norm(&self) -> f64 {
        self.orbit.sup_norm()
    }
    fn max_argument(&self, n: u64) -> Result<u64> {
        self.argument(n)
    }
    fn needs_factorization(&self) -> bool {
        !(self.m == 1 && self.r == 0)
    }
}

pub fn ap_observable(sys: &AdditiveSystem, x: &State, f: &StateFunction, m: u64, r: u64) -> Result<ApObservable> {
    if m == 0 || r >= m {
        return Err(Error::Argument(format!("need m >= 1 and 0 <= r < m, got m={m}, r={r}")));
    }
    Ok(ApObservable { orbit: br_observable(sys, x, f)?, m, r })
}

/// n ↦ g(S_n y) for a torus action.
#[derive(Debug, Clone)]
pub struct MultObservable {
    sys: MultiplicativeSystem,
    y: Angle,
    g: StateFunction,
}

impl MultObservable {
    pub fn new(sys: MultiplicativeSystem, y: Angle, g: StateFunction) -> Result<Self> {
        g.eval_circle(y.to_f64())?;
        Ok(Self { sys, y, g })
    }

    /// ∫ g dν with ν Lebesgue measure.
    pub fn integral(&self) -> Result<f64> {
        integrate(&AdditiveSystem::golden(), &self.g)
    }
}

impl Observable for MultObservable {
    fn eval(&self, at: &Point<'_>) -> Result<Complex64> {
        let s = self.sys.act_with_omega(self.y, at.n, at.omega);
        Ok(Complex64::new(self.g.eval_circle(s.to_f64())?, 0.0))
    }
    fn sup_norm(&self) -> f64 {
        self.g.sup_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::Context;

    #[test]
    fn parity_orbit_is_liouville() {
        let ctx = Context::new(10_000, true).unwrap();
        let sys = AdditiveSystem::cyclic(2).unwrap();
        let obs = br_observable(&sys, &State::Residue(0), &StateFunction::parity()).unwrap();
        for n in 1..10_000 {
            let p = ctx.point(n, 1e4).unwrap();
            let lambda = ctx.sieve().liouville(n).unwrap() as f64;
            assert_eq!(obs.eval(&p).unwrap().re, lambda);
        }
        assert_eq!(obs.eval(&ctx.point(12, 1e4).unwrap()).unwrap().re, -1.0);
        assert_eq!(obs.eval(&ctx.point(1, 1e4).unwrap()).unwrap().re, 1.0);
    }

    #[test]
    fn golden_orbit_example() {
        let ctx = Context::new(100, true).unwrap();
        let obs =
            br_observable(&AdditiveSystem::golden(), &State::point(0.0).unwrap(), &StateFunction::cos(1)).unwrap();
        let expected = (std::f64::consts::TAU * (2.0 * Angle::GOLDEN.to_f64()).fract()).cos();
        assert!((obs.eval(&ctx.point(4, 100.0).unwrap()).unwrap().re - expected).abs() < 1e-12);
    }

    #[test]
    fn progression_examples() {
        let ctx = Context::new(1000, true).unwrap();
        let sys = AdditiveSystem::cyclic(2).unwrap();
        let x = State::Residue(0);
        let f = StateFunction::parity();
        let ap = ap_observable(&sys, &x, &f, 2, 1).unwrap();
        assert_eq!(ap.eval(&ctx.point(4, 1e3).unwrap()).unwrap().re, 1.0);
        let plain = br_observable(&sys, &x, &f).unwrap();
        let trivial = ap_observable(&sys, &x, &f, 1, 0).unwrap();
        for n in 1..500 {
            let p = ctx.point(n, 1e3).unwrap();
            assert_eq!(trivial.eval(&p).unwrap(), plain.eval(&p).unwrap());
        }
        let g = ap_observable(&AdditiveSystem::golden(), &State::point(0.0).unwrap(), &StateFunction::cos(1), 3, 2)
            .unwrap();
        let p1 = ctx.point(1, 1e3).unwrap();
        assert_eq!(g.eval(&p1).unwrap().re, g.orbit.value_at(1));
        assert!(ap_observable(&sys, &x, &f, 3, 3).is_err());
        assert!(ap_observable(&sys, &x, &f, 0, 0).is_err());
    }

    #[test]
    fn multiplicative_observable_uses_valuations() {
        let ctx = Context::new(1000, true).unwrap();
        let a = Angle::GOLDEN;
        let sys = MultiplicativeSystem::new([(2, a)]).unwrap();
        let obs = MultObservable::new(sys, Angle::ZERO, StateFunction::cos(1)).unwrap();
        let got = obs.eval(&ctx.point(12, 1e3).unwrap()).unwrap().re;
        let expected = (std::f64::consts::TAU * a.times(2).to_f64()).cos();
        assert!((got - expected).abs() < 1e-12);
    }
}
