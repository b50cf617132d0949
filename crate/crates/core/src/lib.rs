//! Shooting, bifurcation and singular-solution computations for the radial
//! problem `u'' + (n-1)/r u' + lambda f(u) = 0` on the unit ball.

pub mod bifurcation;
pub mod error;
pub mod exponents;
pub mod integrator;
pub mod problem;
pub mod real;
pub mod shooting;
pub mod singular;

pub use error::{Error, Result};
pub use exponents::{
    b_constant, compute_exponents, critical_curves, euler_linearization, euler_roots, joseph_lundgren,
    lin_ni_ground_state, EulerCoefficient, EulerLinearization, EulerRoots, ExponentReport, GeneralSolution,
    LinNiClosedForm,
};
pub use integrator::{
    integrate, taylor_start, taylor_start_in, DivergenceReason, IntegrationResult, IntegrationStatus, RadialIvp, Sample, StepStats,
    Tolerances,
};
pub use problem::{Forcing, Nonlinearity, ProblemSpec, Variant};
pub use real::{Precision, Real};
#[cfg(feature = "extended")]
pub use real::Mp;
pub use shooting::{
    find_ground_state_level, shoot, verify_dirichlet, Classification, DecayClass, DirichletCheck, ShotDiagnostics,
    ShotOutcome, ShotParams,
};
pub use bifurcation::{
    count_asymptote_crossings, sweep, turning_points, BifurcationDiagram, Curve, CurvePoint, GridSpec, SweepOptions,
    TurningPoint,
};
pub use singular::{
    gelfand_lambda_inf, gelfand_verify, singular_ratio_check, singular_setup, solve_singular, GelfandCheck,
    SingularCase, SingularSetup, SingularSolution, SingularTolerances,
};
