//! Radial initial-value problem `u'' + (n-1)/r u' + f(u) = 0`.
//!
//! The removable singularity at the origin is handled by starting from the
//! series expansion at a small radius; the first zero of `u` stops the
//! integration.

pub(crate) mod dopri;

use serde::{Deserialize, Serialize};

pub use dopri::DivergenceReason;

use crate::error::{Error, Result};
use crate::problem::Forcing;
use crate::real::{Precision, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialIvp<F: Forcing> {
    pub n: u32,
    pub forcing: F,
    pub u0: f64,
    pub du0: f64,
    /// Radius at which `(u0, du0)` is imposed. Zero means the data sit at
    /// the origin and the integration starts from the series expansion.
    pub start_offset: f64,
    pub r_max: f64,
    pub precision: Precision,
}

impl<F: Forcing> RadialIvp<F> {
    /// Data at the origin with `u'(0) = 0`.
    pub fn from_center(n: u32, forcing: F, u0: f64, r_max: f64, precision: Precision) -> Self {
        Self { n, forcing, u0, du0: 0.0, start_offset: 0.0, r_max, precision }
    }

    /// Length scale `sqrt(u0 / f(u0))` on which `u` changes near the origin.
    pub fn characteristic_scale(&self) -> f64 {
        let f0 = self.forcing.eval(&self.u0).abs();
        if f0 > 0.0 && f0.is_finite() {
            (self.u0 / f0).sqrt()
        } else {
            self.r_max
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidProblem(format!("dimension must be at least 3, got {}", self.n)));
        }
        if !(self.u0 > 0.0 && self.u0.is_finite()) {
            return Err(Error::InvalidArgument(format!("u0 must be positive and finite, got {}", self.u0)));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("r_max must be positive, got {}", self.r_max)));
        }
        if !(self.start_offset >= 0.0 && self.start_offset < self.r_max) {
            return Err(Error::InvalidArgument(format!("start offset {} outside [0, r_max)", self.start_offset)));
        }
        if self.start_offset == 0.0 && self.du0 != 0.0 {
            return Err(Error::InvalidArgument("a regular start at the origin needs u'(0) = 0".into()));
        }
        if !self.du0.is_finite() {
            return Err(Error::InvalidArgument("u'(0) must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub root_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-20, root_tol: 1e-12 }
    }
}

impl Tolerances {
    pub fn new(rel_tol: f64, abs_tol: f64, root_tol: f64) -> Result<Self> {
        let t = Self { rel_tol, abs_tol, root_tol };
        t.validate()?;
        Ok(t)
    }

    pub fn with_rel(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: (rel_tol * 1e-10).max(1e-300), root_tol: rel_tol.min(1e-12) }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol), ("root_tol", self.root_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IntegrationStatus {
    RootFound { r_root: f64 },
    ReachedRMax,
    Diverged(DivergenceReason),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult {
    pub status: IntegrationStatus,
    /// Samples on the requested output grid, clipped to the integrated range.
    pub trajectory: Vec<Sample>,
    pub stats: StepStats,
    /// State where the integration stopped.
    pub terminal: Sample,
    pub r_start: f64,
}

impl IntegrationResult {
    pub fn root(&self) -> Option<f64> {
        match self.status {
            IntegrationStatus::RootFound { r_root } => Some(r_root),
            _ => None,
        }
    }
}

pub(crate) const MAX_STEPS: usize = 5_000_000;

/// Series start `(u, u')` at radius `r` for data `u(0) = u0`, `u'(0) = 0`.
///
/// Keeps terms through `r^4` in `u`:
/// `u = u0 - f r^2/(2n) + f f' r^4/(8n(n+2))`.
pub fn taylor_start<F: Forcing>(n: u32, forcing: &F, u0: f64, r: f64) -> (f64, f64) {
    taylor_start_in(n, forcing, &u0, &r)
}

pub fn taylor_start_in<T: Real, F: Forcing>(n: u32, forcing: &F, u0: &T, r: &T) -> (T, T) {
    let nf = f64::from(n);
    let f0 = forcing.eval(u0);
    let f1 = forcing.derivative(u0);
    let r2 = r.clone() * r;
    let c2 = f0.clone() / u0.lift(2.0 * nf);
    let c4 = f0.clone() * &f1 / u0.lift(8.0 * nf * (nf + 2.0));
    let u = u0.clone() - c2.clone() * &r2 + c4.clone() * &(r2.clone() * &r2);
    let du = (c4 * u0.lift(4.0) * &r2 - c2 * u0.lift(2.0)) * r;
    (u, du)
}

/// Radius at which a regular integration leaves the series expansion.
pub fn default_r_start<F: Forcing>(ivp: &RadialIvp<F>) -> f64 {
    (1e-4 * ivp.characteristic_scale()).min(1e-6 * ivp.r_max.max(1.0)).min(1e-4 * ivp.r_max)
}

/// Integrates the radial problem to its first zero or to `r_max`.
///
/// `output_grid` need not be sorted; samples are returned in increasing `r`
/// and only for radii that were actually reached.
pub fn integrate<F: Forcing>(ivp: &RadialIvp<F>, tol: &Tolerances, output_grid: &[f64]) -> Result<IntegrationResult> {
    ivp.validate()?;
    tol.validate()?;
    let mut grid: Vec<f64> = output_grid.iter().copied().filter(|r| r.is_finite() && *r >= 0.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    match ivp.precision {
        Precision::Double => Ok(run::<f64, F>(ivp, tol, &grid, ())),
        #[cfg(feature = "extended")]
        Precision::Extended(bits) => Ok(run::<crate::real::Mp, F>(ivp, tol, &grid, bits)),
        #[cfg(not(feature = "extended"))]
        Precision::Extended(_) => Err(Error::ExtendedUnavailable),
    }
}

fn run<T: Real, F: Forcing>(ivp: &RadialIvp<F>, tol: &Tolerances, grid: &[f64], ctx: T::Ctx) -> IntegrationResult {
    let nm1 = T::from_f64(f64::from(ivp.n) - 1.0, ctx);
    let forcing = &ivp.forcing;
    let rhs = |r: &T, y: &[T; 2]| -> [T; 2] {
        let friction = nm1.clone() * &y[1] / r;
        [y[1].clone(), -(friction + forcing.eval(&y[0]))]
    };

    let u0 = T::from_f64(ivp.u0, ctx);
    let (r_start, y_start) = if ivp.start_offset > 0.0 {
        (ivp.start_offset, [u0.clone(), T::from_f64(ivp.du0, ctx)])
    } else {
        let rs = default_r_start(ivp);
        let (u, du) = taylor_start_in(ivp.n, forcing, &u0, &T::from_f64(rs, ctx));
        (rs, [u, du])
    };

    let mut trajectory = Vec::with_capacity(grid.len());
    let split = grid.partition_point(|r| *r < r_start);
    if ivp.start_offset == 0.0 {
        for &r in &grid[..split] {
            let (u, du) = taylor_start(ivp.n, forcing, ivp.u0, r);
            trajectory.push(Sample { r, u, du });
        }
    }
    let inner: Vec<T> = grid[split..].iter().map(|r| T::from_f64(*r, ctx)).collect();

    let opts = dopri::Options {
        rel_tol: tol.rel_tol,
        abs_tol: tol.abs_tol,
        root_tol: tol.root_tol * ivp.u0.max(1.0),
        blowup: Some(1e12 * ivp.u0),
        require_decreasing: forcing.is_positive(),
        max_steps: MAX_STEPS,
    };
    let out = dopri::integrate(&rhs, T::from_f64(r_start, ctx), y_start, T::from_f64(ivp.r_max, ctx), &inner, &opts);

    let sample = |x: &T, y: &[T; 2]| Sample { r: x.to_f64(), u: y[0].to_f64(), du: y[1].to_f64() };
    trajectory.extend(out.samples.iter().map(|(x, y)| sample(x, y)));
    let status = match &out.status {
        dopri::Status::Root(r) => IntegrationStatus::RootFound { r_root: r.to_f64() },
        dopri::Status::ReachedEnd => IntegrationStatus::ReachedRMax,
        dopri::Status::Diverged(reason) => IntegrationStatus::Diverged(*reason),
    };
    IntegrationResult {
        status,
        trajectory,
        stats: StepStats { accepted: out.accepted, rejected: out.rejected },
        terminal: sample(&out.last.0, &out.last.1),
        r_start,
    }
}
