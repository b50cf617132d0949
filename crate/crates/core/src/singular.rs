//! Singular solutions `u(r) = r^alpha v(r)` with `u(0) = infinity`, the
//! asymptote `lambda_inf = xi^2` they define, and the Gelfand-type limit.
//!
//! With `alpha = -2/(q-1)` the power-sum equation becomes
//! `r^2 v'' + alpha1 r v' + alpha2 v + r^gamma v^p + v^q = 0`.
//! It is integrated in a logarithmic variable, which turns the `1/r` and
//! `1/r^2` coefficients into constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{b_constant, joseph_lundgren};
use crate::integrator::dopri::{self, Options, Status};
use crate::integrator::{self, IntegrationStatus, RadialIvp, Sample, Tolerances, MAX_STEPS};
use crate::problem::{pow_odd, Exponent, Forcing, Nonlinearity, ProblemSpec, Variant};
use crate::real::{Precision, Real};

/// Largest value of the independent variable searched for the first root.
pub const SEARCH_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularCase {
    /// `gamma = 1`: analytic in `r`.
    LinNi,
    /// `gamma > 1`: expansion in powers of `r^gamma`.
    BelowLinNi,
    /// `gamma < 1`: analytic in `z = r^gamma`.
    AboveLinNi,
}

impl SingularCase {
    pub fn name(self) -> &'static str {
        match self {
            SingularCase::LinNi => "lin_ni",
            SingularCase::BelowLinNi => "below_lin_ni",
            SingularCase::AboveLinNi => "above_lin_ni",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularSetup {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub gamma: f64,
    pub case: SingularCase,
    pub a0: f64,
    /// Linear coefficient in `r` (Lin-Ni) or `z` (above Lin-Ni).
    pub a1: Option<f64>,
}

impl SingularSetup {
    /// Coefficient `c` of the leading correction `v = a0 + c x^e`, where `x`
    /// is the integration variable and `e` is `1` for the analytic cases and
    /// `gamma` otherwise.
    fn leading_correction(&self) -> f64 {
        let denom = self.alpha3 + (1.0 - self.q) * self.alpha2;
        self.a1.unwrap_or(-self.a0.powf(self.p) / denom)
    }

    /// `(c2, c1, e, g)` for `c2 v_ss + (c1 - c2) v_s + alpha2 v + e^(e s) v^p + v^q = 0`
    /// in `s = ln x`, with `g = d ln x / d ln r`.
    fn log_form(&self) -> (f64, f64, f64, f64) {
        match self.case {
            SingularCase::LinNi => (1.0, self.alpha1, 1.0, 1.0),
            SingularCase::BelowLinNi => (1.0, self.alpha1, self.gamma, 1.0),
            SingularCase::AboveLinNi => (self.gamma * self.gamma, self.alpha3, 1.0, self.gamma),
        }
    }

    /// `B^(1/(q-1))`, the amplitude of the pure-power singular solution.
    pub fn lane_emden_amplitude(&self) -> f64 {
        b_constant(f64::from(self.n), self.q).powf(1.0 / (self.q - 1.0))
    }
}

/// Exponents and series coefficients of the singular solution.
///
/// Requires `1 <= p < (n+2)/(n-2) < q`. The lower power `p = 1` is accepted;
/// the construction then follows the same formulas.
pub fn singular_setup(spec: &ProblemSpec) -> Result<SingularSetup> {
    spec.validate()?;
    if spec.variant != Variant::PowerSum {
        return Err(Error::InvalidProblem(format!(
            "singular construction needs the power-sum nonlinearity, got {}",
            spec.variant.name()
        )));
    }
    let crit = spec.critical();
    if spec.q <= crit {
        return Err(Error::NotSupercritical { q: spec.q, critical: crit });
    }
    if spec.p >= crit {
        return Err(Error::RegimeViolation(format!("p = {} must lie below the critical exponent {crit}", spec.p)));
    }
    let (n, p, q) = (spec.dim(), spec.p, spec.q);
    let alpha = -2.0 / (q - 1.0);
    let alpha1 = 2.0 * alpha + n - 1.0;
    let alpha2 = alpha * (alpha + n - 2.0);
    let gamma = 2.0 * (q - p) / (q - 1.0);
    let alpha3 = gamma * (gamma - 1.0) + alpha1 * gamma;
    let case = if spec.is_lin_ni() {
        SingularCase::LinNi
    } else if gamma > 1.0 {
        SingularCase::BelowLinNi
    } else {
        SingularCase::AboveLinNi
    };
    let a0 = match case {
        SingularCase::LinNi => (-alpha2).powf(1.0 / (2.0 * p - 2.0)),
        _ => (-alpha2).powf(1.0 / (q - 1.0)),
    };
    let a1 = match case {
        SingularCase::LinNi => Some(-a0.powf(p) / (alpha1 - 2.0 * (p - 1.0) * alpha2)),
        SingularCase::AboveLinNi => Some(-a0.powf(p) / (alpha3 + (1.0 - q) * alpha2)),
        SingularCase::BelowLinNi => None,
    };
    Ok(SingularSetup { n: spec.n, p, q, alpha, alpha1, alpha2, alpha3, gamma, case, a0, a1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularTolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub precision: Precision,
}

impl Default for SingularTolerances {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-20, precision: Precision::Double }
    }
}

impl SingularTolerances {
    /// Start offset of the integration variable.
    pub fn start_offset(&self) -> f64 {
        match self.precision {
            Precision::Double => 1e-12,
            Precision::Extended(_) => 1e-30,
        }
    }
}

/// `(x, v, dv/dx)` in the native variable of the case (`r`, or `z = r^gamma`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub x: f64,
    pub v: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSolution {
    pub setup: SingularSetup,
    pub xi: f64,
    pub lambda_inf: f64,
    pub ln_lambda_inf: f64,
    /// First root in `z = r^gamma` when the case is integrated in `z`.
    pub eta: Option<f64>,
    pub v_profile: Vec<ProfileSample>,
    pub tolerances: SingularTolerances,
}

/// Raw integration in `s = ln x`; returns root (in `s`) and samples on `grid_s`.
struct LogRun {
    root_s: Option<f64>,
    status: Status<f64>,
    samples: Vec<(f64, [f64; 2])>,
    last_s: f64,
}

fn run_log<T: Real>(setup: &SingularSetup, tol: &SingularTolerances, grid_s: &[f64], ctx: T::Ctx) -> LogRun {
    let (c2, c1, e, _) = setup.log_form();
    let h = tol.start_offset();
    let s0 = h.ln();
    let c = setup.leading_correction();
    let ex = if setup.case == SingularCase::BelowLinNi { setup.gamma } else { 1.0 };

    let lift = |x: f64| T::from_f64(x, ctx);
    let damp = lift((c1 - c2) / c2);
    let a2 = lift(setup.alpha2 / c2);
    let inv_c2 = lift(1.0 / c2);
    let ee = lift(e);
    let (ep, eq) = (Exponent::new(setup.p), Exponent::new(setup.q));
    let rhs = |s: &T, y: &[T; 2]| -> [T; 2] {
        let weight = (ee.clone() * s).exp();
        let forcing = weight * pow_odd(&y[0], ep) + pow_odd(&y[0], eq);
        [y[1].clone(), -(damp.clone() * &y[1] + a2.clone() * &y[0] + inv_c2.clone() * forcing)]
    };

    let s0t = lift(s0);
    let hx = (lift(ex) * &s0t).exp();
    let a0 = lift(setup.a0);
    let ct = lift(c);
    let y0 = [a0 + ct.clone() * &hx, ct * lift(ex) * hx];
    let grid: Vec<T> = grid_s.iter().map(|s| lift(*s)).collect();
    let opts = Options {
        rel_tol: tol.rel_tol,
        abs_tol: tol.abs_tol,
        root_tol: tol.rel_tol * 1e-2,
        blowup: Some(1e12 * setup.a0.max(1.0)),
        require_decreasing: false,
        max_steps: MAX_STEPS,
    };
    let out = dopri::integrate(&rhs, s0t, y0, lift(SEARCH_LIMIT.ln()), &grid, &opts);
    let status = match &out.status {
        Status::Root(r) => Status::Root(r.to_f64()),
        Status::ReachedEnd => Status::ReachedEnd,
        Status::Diverged(d) => Status::Diverged(*d),
    };
    LogRun {
        root_s: match &out.status {
            Status::Root(r) => Some(r.to_f64()),
            _ => None,
        },
        status,
        samples: out.samples.iter().map(|(s, y)| (s.to_f64(), [y[0].to_f64(), y[1].to_f64()])).collect(),
        last_s: out.last.0.to_f64(),
    }
}

fn dispatch(setup: &SingularSetup, tol: &SingularTolerances, grid_s: &[f64]) -> Result<LogRun> {
    if !(tol.rel_tol > 0.0 && tol.rel_tol < 1.0 && tol.abs_tol > 0.0 && tol.abs_tol < 1.0) {
        return Err(Error::InvalidArgument("tolerances must lie in (0, 1)".into()));
    }
    let mut grid: Vec<f64> = grid_s.to_vec();
    grid.sort_by(f64::total_cmp);
    match tol.precision {
        Precision::Double => Ok(run_log::<f64>(setup, tol, &grid, ())),
        #[cfg(feature = "extended")]
        Precision::Extended(bits) => Ok(run_log::<crate::real::Mp>(setup, tol, &grid, bits)),
        #[cfg(not(feature = "extended"))]
        Precision::Extended(_) => Err(Error::ExtendedUnavailable),
    }
}

const PROFILE_POINTS: usize = 200;

/// Integrates the transformed equation from the series start to its first
/// root and returns `lambda_inf = xi^2`.
pub fn solve_singular(setup: &SingularSetup, tol: &SingularTolerances) -> Result<SingularSolution> {
    let probe = dispatch(setup, tol, &[])?;
    let root_s = match (probe.root_s, probe.status) {
        (Some(s), _) => s,
        (None, Status::Diverged(d)) => {
            return Err(Error::Diverged(format!("singular profile: {} at s = {:.6}", d.as_str(), probe.last_s)))
        }
        _ => return Err(Error::NoRootFound { limit: SEARCH_LIMIT }),
    };
    let (_, _, _, g) = setup.log_form();
    let s0 = tol.start_offset().ln();
    let grid: Vec<f64> =
        (0..PROFILE_POINTS).map(|i| s0 + (root_s - s0) * i as f64 / (PROFILE_POINTS - 1) as f64).collect();
    let full = dispatch(setup, tol, &grid[..PROFILE_POINTS - 1])?;
    let mut v_profile: Vec<ProfileSample> =
        full.samples.iter().map(|(s, y)| ProfileSample { x: s.exp(), v: y[0], dv: y[1] / s.exp() }).collect();
    v_profile.push(ProfileSample { x: root_s.exp(), v: 0.0, dv: f64::NAN });

    let ln_xi = root_s / g;
    let xi = ln_xi.exp();
    let eta = (setup.case == SingularCase::AboveLinNi).then(|| root_s.exp());
    Ok(SingularSolution {
        setup: *setup,
        xi,
        lambda_inf: xi * xi,
        ln_lambda_inf: 2.0 * ln_xi,
        eta,
        v_profile,
        tolerances: *tol,
    })
}

impl SingularSolution {
    /// The singular solution of the unit-ball problem at `lambda_inf`,
    /// `u(x) = (xi x)^alpha v(xi x)`, with its derivative, for `x` in `(0, 1]`.
    pub fn unit_ball_profile(&self, xs: &[f64]) -> Result<Vec<Sample>> {
        let st = &self.setup;
        let (_, _, _, g) = st.log_form();
        let ln_xi = self.ln_lambda_inf / 2.0;
        for &x in xs {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::InvalidArgument(format!("profile radius {x} outside (0, 1]")));
            }
        }
        let s_of = |x: f64| g * (ln_xi + x.ln());
        let interior: Vec<f64> = xs.iter().filter(|x| **x < 1.0).map(|x| s_of(*x)).collect();
        let run = dispatch(st, &self.tolerances, &interior)?;
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            let t = self.xi * x;
            let (v, vs) = if x >= 1.0 {
                (0.0, None)
            } else {
                let s = s_of(x);
                let i = run
                    .samples
                    .binary_search_by(|(si, _)| si.total_cmp(&s))
                    .map_err(|_| Error::Diverged(format!("profile not reached at x = {x}")))?;
                (run.samples[i].1[0], Some(run.samples[i].1[1]))
            };
            let vs = match vs {
                Some(d) => d,
                None => self.root_slope()?,
            };
            let u = t.powf(st.alpha) * v;
            let du = self.xi * t.powf(st.alpha - 1.0) * (st.alpha * v + g * vs);
            out.push(Sample { r: x, u, du });
        }
        Ok(out)
    }

    fn root_slope(&self) -> Result<f64> {
        let s = self.ln_lambda_inf / 2.0 * self.setup.log_form().3;
        let run = dispatch(&self.setup, &self.tolerances, &[s - 1e-9])?;
        run.samples.first().map(|(_, y)| y[1]).ok_or(Error::NoRootFound { limit: SEARCH_LIMIT })
    }

    /// Largest residual of `u'' + (n-1)/x u' + lambda_inf f(u)` over `xs`,
    /// relative to the largest of the three terms, with `u''` from a
    /// fourth-order central difference of `u'`.
    pub fn reconstruction_residual(&self, xs: &[f64]) -> Result<f64> {
        let st = &self.setup;
        let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let mut pts = Vec::with_capacity(xs.len() * 5);
        for &x in xs {
            let h = 1e-3 * x.min(1.0 - x);
            pts.extend(offsets.iter().map(|k| x + k * h));
        }
        let prof = self.unit_ball_profile(&pts)?;
        let f = Nonlinearity::new(Variant::PowerSum, st.p, st.q);
        let nm1 = f64::from(st.n) - 1.0;
        let mut worst = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let d = &prof[5 * i..5 * i + 5];
            let h = 1e-3 * x.min(1.0 - x);
            let upp = (-d[4].du + 8.0 * d[3].du - 8.0 * d[1].du + d[0].du) / (12.0 * h);
            let forcing = self.lambda_inf * f.eval(&d[2].u);
            let friction = nm1 / x * d[2].du;
            let scale = upp.abs().max(friction.abs()).max(forcing.abs());
            worst = worst.max(((upp + friction + forcing) / scale).abs());
        }
        Ok(worst)
    }
}

/// `lambda_inf = B(q)` for `(1 + u)^q`, valid for `(n+2)/(n-2) < q < p_JL`.
pub fn gelfand_lambda_inf(n: u32, q: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidProblem(format!("dimension must be at least 3, got {n}")));
    }
    let nf = f64::from(n);
    let crit = (nf + 2.0) / (nf - 2.0);
    let jl = joseph_lundgren(n);
    if !(q > crit && q < jl) {
        return Err(Error::RegimeViolation(format!("q = {q} must lie in ({crit}, {jl})")));
    }
    Ok(b_constant(nf, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GelfandCheck {
    pub t: f64,
    pub b: f64,
    /// `t^2 w(t)^(q-1)` for the solution with `w(0) = 1`.
    pub lambda_at_t: f64,
    pub relative_error: f64,
    /// `t^2 w^(q-1)` averaged in `ln t` over one oscillation period ending at `t`.
    pub period_averaged: f64,
    pub period_averaged_error: f64,
}

/// Integrates `w'' + (n-1)/r w' + w^q = 0`, `w(0) = 1`, and compares
/// `t^2 w(t)^(q-1)` with `B`.
pub fn gelfand_verify(n: u32, q: f64, t: f64, rel_tol: f64) -> Result<GelfandCheck> {
    let b = gelfand_lambda_inf(n, q)?;
    if !(t > 1.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("verification radius must exceed 1, got {t}")));
    }
    let nf = f64::from(n);
    let beta = (4.0 * q * b - (nf - 2.0).powi(2)).sqrt() / 2.0;
    let period = 2.0 * PI / beta;
    let lo = (t.ln() - period).max(0.0);
    const M: usize = 64;
    let grid: Vec<f64> = (0..=M).map(|i| (lo + (t.ln() - lo) * i as f64 / M as f64).exp()).collect();
    let spec = ProblemSpec::pure_power(n, q)?;
    let ivp = RadialIvp::from_center(n, spec.nonlinearity(), 1.0, t * (1.0 + 1e-9), Precision::Double);
    let res = integrator::integrate(&ivp, &Tolerances::with_rel(rel_tol), &grid)?;
    match res.status {
        IntegrationStatus::ReachedRMax => {}
        IntegrationStatus::RootFound { r_root } => {
            return Err(Error::Diverged(format!("pure-power solution vanished at r = {r_root}")))
        }
        IntegrationStatus::Diverged(d) => return Err(Error::Diverged(d.as_str().into())),
    }
    let value = |s: &Sample| s.r * s.r * s.u.powf(q - 1.0);
    let last = res.trajectory.last().ok_or_else(|| Error::Diverged("no samples".into()))?;
    let lambda_at_t = value(last);
    // trapezoid rule on ln(value) against ln r
    let logs: Vec<(f64, f64)> = res.trajectory.iter().map(|s| (s.r.ln(), value(s).ln())).collect();
    let span = logs[logs.len() - 1].0 - logs[0].0;
    let integral: f64 = logs.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    let period_averaged = if span > 0.0 { (integral / span).exp() } else { lambda_at_t };
    Ok(GelfandCheck {
        t,
        b,
        lambda_at_t,
        relative_error: (lambda_at_t - b) / b,
        period_averaged,
        period_averaged_error: (period_averaged - b) / b,
    })
}

/// Points `(lambda, u(0)) = (t^2 w(t)^(q-1), 1/w(t) - 1)` on the solution
/// curve of the Gelfand-type problem, one per radius in `ts`.
pub fn gelfand_curve(n: u32, q: f64, ts: &[f64], rel_tol: f64) -> Result<Vec<(f64, f64)>> {
    let spec = ProblemSpec::pure_power(n, q)?;
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    if t_max <= 0.0 {
        return Ok(Vec::new());
    }
    let ivp = RadialIvp::from_center(n, spec.nonlinearity(), 1.0, t_max * (1.0 + 1e-9), Precision::Double);
    let res = integrator::integrate(&ivp, &Tolerances::with_rel(rel_tol), ts)?;
    Ok(res.trajectory.iter().map(|s| (s.r * s.r * s.u.powf(q - 1.0), 1.0 / s.u - 1.0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub r: f64,
    pub ratio: f64,
}

pub const RATIO_RADII: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Ratio of the singular solution to `B^(1/(q-1)) r^alpha` at small `r`,
/// which equals `v / a0`. The first sample is `r = 0`, where it is exactly 1.
pub fn singular_ratio_check(spec: &ProblemSpec, tol: &SingularTolerances) -> Result<Vec<RatioSample>> {
    let setup = singular_setup(spec)?;
    let (_, _, _, g) = setup.log_form();
    let amp = setup.lane_emden_amplitude();
    let s_values: Vec<f64> = RATIO_RADII.iter().map(|r| g * r.ln()).collect();
    let run = dispatch(&setup, tol, &s_values)?;
    let mut out = vec![RatioSample { r: 0.0, ratio: setup.a0 / amp }];
    for &r in &RATIO_RADII {
        let s = g * r.ln();
        let v = run
            .samples
            .iter()
            .find(|(si, _)| *si == s)
            .map(|(_, y)| y[0])
            .ok_or_else(|| Error::Diverged(format!("ratio sample at r = {r} not reached")))?;
        out.push(RatioSample { r, ratio: v / amp });
    }
    Ok(out)
}
