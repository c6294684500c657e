//! Small numerical kernels: compensated sums, ζ on the real line, E1 and
//! adaptive Gauss–Legendre quadrature.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, keeping both compensation terms.
    pub fn merge(&mut self, other: &Compensated) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Compensated {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Compensated::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of complex values, real and imaginary parts separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexSum {
    re: Compensated,
    im: Compensated,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_{2j}/(2j)! for j = 1..=10.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

/// ζ(s) for real s ≠ 1 by Euler–Maclaurin summation.
///
/// The formula is the analytic continuation, so it is valid for s < 1 as
/// well (the defining series is never used there).
pub fn zeta(s: f64) -> f64 {
    assert!(s != 1.0, "zeta has a pole at s = 1");
    let n = 20.0f64;
    let head: Compensated = (1..20).map(|k| (k as f64).powf(-s)).collect();
    let mut acc = head;
    acc.add(n.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * n.powf(-s));
    // rising factorial s(s+1)...(s+2j-2), times n^{-s-2j+1}
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let a = s + (2 * j - 1) as f64;
            rising *= a * (a + 1.0);
            power /= n * n;
        }
        acc.add(c * rising * power);
    }
    acc.value()
}

/// ζ(s) through the alternating η series, η(s) = (1 − 2^{1−s}) ζ(s),
/// accelerated with the Cohen–Villegas–Zagier weights.
pub fn zeta_via_eta(s: f64) -> f64 {
    assert!(s != 1.0, "zeta has a pole at s = 1");
    let terms = 40;
    let mut d = (3.0 + 8f64.sqrt()).powi(terms);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c = -d;
    let mut eta = Compensated::new();
    for k in 0..terms {
        let kf = k as f64;
        let nf = terms as f64;
        c = b - c;
        eta.add(c * (kf + 1.0).powf(-s));
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    eta.value() / d / (1.0 - 2f64.powf(1.0 - s))
}

/// The exponential integral E1(x) for x > 0.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 is only defined here for positive arguments");
    if x < 1.0 {
        let mut term = 1.0;
        let mut acc = Compensated::new();
        for k in 1..60 {
            term *= -x / k as f64;
            acc.add(-term / k as f64);
            if term.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + acc.value()
    } else {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

const GL_ORDER: usize = 20;

fn gauss_legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / deriv;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * deriv * deriv)));
        }
        rule
    })
}

fn gl_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let acc: Compensated = gauss_legendre_rule().iter().map(|&(x, w)| w * f(mid + half * x)).collect();
    half * acc.value()
}

/// Adaptive Gauss–Legendre integral of `f` over `[a, b]`.
///
/// Intervals are bisected until the two halves agree with the whole to
/// within the share of `tol` allotted to that interval.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let left = gl_fixed(f, a, mid);
        let right = gl_fixed(f, mid, b);
        if depth == 0 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        step(f, a, mid, left, 0.5 * tol, depth - 1) + step(f, mid, b, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    step(f, a, b, gl_fixed(f, a, b), tol, 40)
}
