//! Closed-form exponents, constants and explicit solutions.
//!
//! Nothing here integrates an ODE; every value is a formula in `n`, `p`, `q`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{ProblemSpec, Variant};

/// Amplitude constant of the singular Lane-Emden solution
/// `w0(r) = B^{1/(power-1)} r^{-2/(power-1)}` of `w'' + (n-1)/r w' + w^power = 0`.
///
/// Positive iff `power > n/(n-2)`.
pub fn b_constant(n: f64, power: f64) -> f64 {
    let pm1 = power - 1.0;
    2.0 / (pm1 * pm1) * (-2.0 + pm1 * (n - 2.0))
}

/// Roots `(p1, p2)` of `(n-2)^2 - 4 p B(p) = 0`.
///
/// For `n = 10` the quadratic degenerates: its leading coefficient
/// `(n-2)(n-10)` vanishes, the remaining linear equation gives `p1 = 4/3`
/// and `p2` escapes to infinity.
pub fn critical_curves(n: u32) -> (f64, f64) {
    if n == 10 {
        return (4.0 / 3.0, f64::INFINITY);
    }
    let nf = f64::from(n);
    let root = (nf - 1.0).sqrt();
    let den = nf * nf - 12.0 * nf + 20.0;
    let p1 = (nf * nf - 8.0 * nf - 8.0 * root + 4.0) / den;
    let p2 = (nf * nf - 8.0 * nf + 8.0 * root + 4.0) / den;
    (p1, p2)
}

/// Joseph-Lundgren exponent; infinite for `n <= 10`.
pub fn joseph_lundgren(n: u32) -> f64 {
    if n <= 10 {
        return f64::INFINITY;
    }
    let nf = f64::from(n);
    1.0 + 4.0 / (nf - 2.0 * (nf - 1.0).sqrt() - 4.0)
}

/// Roots of the characteristic equation `s^2 + (n-2) s + c = 0` of the Euler
/// equation `z'' + (n-1)/r z' + c/r^2 z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerRoots {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub discriminant: f64,
}

impl EulerRoots {
    pub fn new(n: f64, c: f64) -> Self {
        let b = n - 2.0;
        let discriminant = b * b - 4.0 * c;
        if discriminant < 0.0 {
            let im = (-discriminant).sqrt() / 2.0;
            Self { re: [-b / 2.0; 2], im: [im, -im], discriminant }
        } else {
            let sq = discriminant.sqrt();
            // the smaller-magnitude root via Vieta avoids cancellation
            let big = -(b + sq) / 2.0;
            let small = if big != 0.0 { c / big } else { (-b + sq) / 2.0 };
            Self { re: [small, big], im: [0.0, 0.0], discriminant }
        }
    }

    pub fn is_oscillatory(&self) -> bool {
        self.discriminant < 0.0
    }
}

/// General solution of the Euler equation, in a printable form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneralSolution {
    /// `r^decay (c1 cos(frequency ln r) + c2 sin(frequency ln r))`
    Oscillatory { decay: f64, frequency: f64 },
    /// `c1 r^s1 + c2 r^s2`
    DistinctReal { s1: f64, s2: f64 },
    /// `r^s (c1 + c2 ln r)`
    Repeated { s: f64 },
}

impl fmt::Display for GeneralSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneralSolution::Oscillatory { decay, frequency } => write!(
                f,
                "z = r^({decay}) * (c1 cos({frequency} ln r) + c2 sin({frequency} ln r))"
            ),
            GeneralSolution::DistinctReal { s1, s2 } => write!(f, "z = c1 r^({s1}) + c2 r^({s2})"),
            GeneralSolution::Repeated { s } => write!(f, "z = r^({s}) * (c1 + c2 ln r)"),
        }
    }
}

/// Where the `c/r^2` coefficient of the Euler equation comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EulerCoefficient {
    /// Linearization around the singular Lane-Emden solution of the upper
    /// power: `c = q B(q)`.
    LaneEmden,
    /// Large-`r` limit of the linearization around the explicit Lin-Ni
    /// ground state: `r^2 (p u^{p-1} + (2p-1) u^{2p-2}) -> p B(p)`.
    LinNiTail,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerLinearization {
    pub coefficient: f64,
    pub roots: EulerRoots,
    pub solution: GeneralSolution,
}

pub fn euler_roots(n: f64, c: f64) -> EulerLinearization {
    let roots = EulerRoots::new(n, c);
    let solution = if roots.discriminant < 0.0 {
        GeneralSolution::Oscillatory { decay: roots.re[0], frequency: roots.im[0] }
    } else if roots.discriminant == 0.0 {
        GeneralSolution::Repeated { s: roots.re[0] }
    } else {
        GeneralSolution::DistinctReal { s1: roots.re[0], s2: roots.re[1] }
    };
    EulerLinearization { coefficient: c, roots, solution }
}

pub fn euler_linearization(spec: &ProblemSpec, source: EulerCoefficient) -> Result<EulerLinearization> {
    spec.validate()?;
    let n = spec.dim();
    let c = match source {
        EulerCoefficient::LaneEmden => spec.q * b_constant(n, spec.q),
        EulerCoefficient::LinNiTail => {
            if !spec.is_lin_ni() {
                return Err(Error::LinNiConditionViolated(format!(
                    "q = {} must equal 2p - 1 = {} with p > {}",
                    spec.q,
                    2.0 * spec.p - 1.0,
                    spec.serrin()
                )));
            }
            spec.p * b_constant(n, spec.p)
        }
        EulerCoefficient::Explicit(c) => c,
    };
    Ok(euler_roots(n, c))
}

/// Every closed-form exponent for a problem, with `B` and the Euler roots
/// evaluated at the upper power `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport {
    pub critical: f64,
    pub serrin: f64,
    pub lin_ni_q: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
    pub p_jl: f64,
    pub supercritical: bool,
    pub lin_ni: bool,
    pub oscillatory: bool,
    pub euler_roots: EulerRoots,
}

pub fn compute_exponents(spec: &ProblemSpec) -> Result<ExponentReport> {
    spec.validate()?;
    let n = spec.dim();
    let (p1, p2) = critical_curves(spec.n);
    let euler = EulerRoots::new(n, spec.q * b_constant(n, spec.q));
    let lin_ni_q = match spec.variant {
        Variant::PowerSum => 2.0 * spec.p - 1.0,
        _ => f64::NAN,
    };
    Ok(ExponentReport {
        critical: spec.critical(),
        serrin: spec.serrin(),
        lin_ni_q,
        b: b_constant(n, spec.q),
        p1,
        p2,
        p_jl: joseph_lundgren(spec.n),
        supercritical: spec.is_supercritical(),
        lin_ni: spec.is_lin_ni(),
        oscillatory: euler.is_oscillatory(),
        euler_roots: euler,
    })
}

/// The explicit slow-decay ground state of `u'' + (n-1)/r u' + u^p + u^{2p-1} = 0`,
///
/// `u(r) = ((A n - 1) / (1 + p A^2 r^2))^{1/(p-1)}`, `A = (p-1)/(np - n - 2p)`,
///
/// which also solves the first-order equation `u' = -A r u^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinNiClosedForm {
    pub n: u32,
    pub p: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub u0: f64,
}

impl LinNiClosedForm {
    pub fn value(&self, r: f64) -> f64 {
        let n = f64::from(self.n);
        let p = self.p;
        let k = n * p - n - 2.0 * p;
        let base = 2.0 * p * k / (k * k + p * (p - 1.0) * (p - 1.0) * r * r);
        base.powf(1.0 / (p - 1.0))
    }

    /// `u'(r) = -A r u(r)^p`.
    pub fn derivative(&self, r: f64) -> f64 {
        -self.a * r * self.value(r).powf(self.p)
    }

    /// Potential `p u^{p-1} + (2p-1) u^{2p-2}` of the linearized equation.
    pub fn linearized_potential(&self, r: f64) -> f64 {
        let u = self.value(r);
        let p = self.p;
        p * u.powf(p - 1.0) + (2.0 * p - 1.0) * u.powf(2.0 * p - 2.0)
    }

    /// Slope of `ln u` against `ln r` at infinity.
    pub fn decay_exponent(&self) -> f64 {
        2.0 / (self.p - 1.0)
    }
}

pub fn lin_ni_ground_state(spec: &ProblemSpec) -> Result<LinNiClosedForm> {
    spec.validate()?;
    if !spec.is_lin_ni() {
        return Err(Error::LinNiConditionViolated(format!(
            "need q = 2p - 1 and p > n/(n-2); got n = {}, p = {}, q = {}",
            spec.n, spec.p, spec.q
        )));
    }
    let n = spec.dim();
    let p = spec.p;
    let a = (p - 1.0) / (n * p - n - 2.0 * p);
    let u0 = (a * n - 1.0).powf(1.0 / (p - 1.0));
    Ok(LinNiClosedForm { n: spec.n, p, a, u0 })
}
