use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Relative tolerance used to decide whether `q = 2p - 1` holds.
pub const LIN_NI_REL_TOL: f64 = 1e-12;

/// Shape of the nonlinearity `f(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `u^p + u^q`
    PowerSum,
    /// `u^q`
    PurePower,
    /// `(1 + u)^q`
    GelfandType,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::PowerSum => "power-sum",
            Variant::PurePower => "pure-power",
            Variant::GelfandType => "gelfand",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-sum" | "power_sum" | "powersum" => Ok(Variant::PowerSum),
            "pure-power" | "pure_power" | "purepower" => Ok(Variant::PurePower),
            "gelfand" | "gelfand-type" | "gelfand_type" => Ok(Variant::GelfandType),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}`"))),
        }
    }
}

/// The equation `u'' + (n-1)/r u' + f(u) = 0` in dimension `n`.
///
/// `p` is only meaningful for [`Variant::PowerSum`]; the other variants use
/// `q` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub variant: Variant,
}

impl ProblemSpec {
    pub fn new(n: u32, p: f64, q: f64, variant: Variant) -> Result<Self> {
        let spec = Self { n, p, q, variant };
        spec.validate()?;
        Ok(spec)
    }

    pub fn power_sum(n: u32, p: f64, q: f64) -> Result<Self> {
        Self::new(n, p, q, Variant::PowerSum)
    }

    pub fn pure_power(n: u32, q: f64) -> Result<Self> {
        Self::new(n, q, q, Variant::PurePower)
    }

    pub fn gelfand(n: u32, q: f64) -> Result<Self> {
        Self::new(n, q, q, Variant::GelfandType)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidProblem(format!("dimension n = {} must be at least 3", self.n)));
        }
        if !self.q.is_finite() || self.q <= 1.0 {
            return Err(Error::InvalidProblem(format!("q = {} must be a finite number above 1", self.q)));
        }
        if self.variant == Variant::PowerSum && !(self.p.is_finite() && self.p >= 1.0 && self.p < self.q) {
            return Err(Error::InvalidProblem(format!(
                "power sum needs 1 <= p < q, got p = {}, q = {}",
                self.p, self.q
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    /// Sobolev critical exponent `(n+2)/(n-2)`.
    pub fn critical(&self) -> f64 {
        let n = self.dim();
        (n + 2.0) / (n - 2.0)
    }

    /// Serrin exponent `n/(n-2)`.
    pub fn serrin(&self) -> f64 {
        let n = self.dim();
        n / (n - 2.0)
    }

    pub fn is_supercritical(&self) -> bool {
        self.q > self.critical()
    }

    pub fn is_lin_ni(&self) -> bool {
        self.variant == Variant::PowerSum
            && (self.q - (2.0 * self.p - 1.0)).abs() <= LIN_NI_REL_TOL * (2.0 * self.p - 1.0).abs()
            && self.p > self.serrin()
    }

    /// Power that governs the behaviour of small positive solutions, i.e.
    /// the slow-decay tail of a ground state.
    pub fn tail_power(&self) -> Option<f64> {
        match self.variant {
            Variant::PowerSum => Some(self.p),
            Variant::PurePower => Some(self.q),
            Variant::GelfandType => None,
        }
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        Nonlinearity::new(self.variant, self.p, self.q)
    }
}

/// An exponent, kept as an integer when it is one so that powers can be
/// evaluated by repeated multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i32),
    Real(f64),
}

impl Exponent {
    pub fn new(e: f64) -> Self {
        if e.fract() == 0.0 && e.abs() <= 64.0 {
            Exponent::Int(e as i32)
        } else {
            Exponent::Real(e)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Int(k) => f64::from(k),
            Exponent::Real(e) => e,
        }
    }
}

/// Evaluable form of `f(u)` and `f'(u)`.
///
/// Powers are extended to negative arguments as odd functions so that a
/// trial step overshooting the first root still sees a smooth right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    pub variant: Variant,
    pub p: Exponent,
    pub q: Exponent,
}

impl Nonlinearity {
    pub fn new(variant: Variant, p: f64, q: f64) -> Self {
        Self { variant, p: Exponent::new(p), q: Exponent::new(q) }
    }
}

/// The right-hand side `f(u)` of the radial equation, as seen by the
/// integrator.
pub trait Forcing: Sync {
    fn eval<T: Real>(&self, u: &T) -> T;
    fn derivative<T: Real>(&self, u: &T) -> T;
    /// Whether `f(u) > 0` for every `u > 0`, which forces `u' < 0`.
    fn is_positive(&self) -> bool {
        true
    }
}

pub(crate) fn pow_odd<T: Real>(u: &T, e: Exponent) -> T {
    let zero = u.lift(0.0);
    if *u == zero {
        return zero;
    }
    let a = u.abs();
    let m = match e {
        Exponent::Int(k) => a.powi(k),
        Exponent::Real(x) => a.powf(x),
    };
    if *u > zero {
        m
    } else {
        -m
    }
}

fn pow_odd_derivative<T: Real>(u: &T, e: Exponent) -> T {
    let zero = u.lift(0.0);
    let a = u.abs();
    match e {
        Exponent::Int(1) => u.lift(1.0),
        _ if a == zero => zero,
        Exponent::Int(k) => a.powi(k - 1) * u.lift(f64::from(k)),
        Exponent::Real(x) => a.powf(x - 1.0) * u.lift(x),
    }
}

impl Forcing for Nonlinearity {
    fn eval<T: Real>(&self, u: &T) -> T {
        match self.variant {
            Variant::PowerSum => pow_odd(u, self.p) + pow_odd(u, self.q),
            Variant::PurePower => pow_odd(u, self.q),
            Variant::GelfandType => pow_odd(&(u.clone() + u.lift(1.0)), self.q),
        }
    }

    fn derivative<T: Real>(&self, u: &T) -> T {
        match self.variant {
            Variant::PowerSum => pow_odd_derivative(u, self.p) + pow_odd_derivative(u, self.q),
            Variant::PurePower => pow_odd_derivative(u, self.q),
            Variant::GelfandType => pow_odd_derivative(&(u.clone() + u.lift(1.0)), self.q),
        }
    }
}
