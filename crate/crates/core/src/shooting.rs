//! The shooting map `u(0) -> lambda = omega^2`, where `omega` is the first
//! zero of the solution of the rescaled problem `u'' + (n-1)/r u' + f(u) = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, IntegrationStatus, RadialIvp, Sample, StepStats, Tolerances};
use crate::problem::{Forcing, ProblemSpec};
use crate::real::Precision;

/// Classification radius used for Lin-Ni pairs. Near the slow-decay ground
/// state a perturbation grows only like `r^(1/6)` relative to `u`, so roots
/// can sit many decades out.
pub const R_CLASSIFY_LIN_NI: f64 = 1e12;
pub const R_CLASSIFY_DEFAULT: f64 = 1e3;
/// Relative half-width of the decay-exponent bands.
pub const DECAY_BAND: f64 = 0.2;
const DECAY_FIT_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotParams {
    pub r_classify: f64,
    pub tol: Tolerances,
    pub precision: Precision,
}

impl ShotParams {
    pub fn for_spec(spec: &ProblemSpec) -> Self {
        let r_classify = if spec.is_lin_ni() { R_CLASSIFY_LIN_NI } else { R_CLASSIFY_DEFAULT };
        Self { r_classify, tol: Tolerances::default(), precision: Precision::Double }
    }

    pub fn with_r_classify(mut self, r: f64) -> Self {
        self.r_classify = r;
        self
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    Slow,
    Fast,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Dirichlet { omega: f64, lambda: f64, log_lambda: f64 },
    GroundState { decay: DecayClass },
    Diverged { reason: integrator::DivergenceReason },
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Dirichlet { .. } => "dirichlet",
            Classification::GroundState { .. } => "ground_state",
            Classification::Diverged { .. } => "diverged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotDiagnostics {
    pub terminal: Sample,
    /// `-d ln u / d ln r` fitted over the last decade before `r_classify`.
    pub decay_exponent: Option<f64>,
    pub stats: StepStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotOutcome {
    pub u0: f64,
    pub classification: Classification,
    pub diagnostics: ShotDiagnostics,
}

impl ShotOutcome {
    pub fn omega(&self) -> Option<f64> {
        match self.classification {
            Classification::Dirichlet { omega, .. } => Some(omega),
            _ => None,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.classification {
            Classification::Dirichlet { lambda, .. } => Some(lambda),
            _ => None,
        }
    }

    pub fn log_lambda(&self) -> Option<f64> {
        match self.classification {
            Classification::Dirichlet { log_lambda, .. } => Some(log_lambda),
            _ => None,
        }
    }

    pub fn is_ground_state(&self) -> bool {
        matches!(self.classification, Classification::GroundState { .. })
    }
}

/// Reference decay exponents `(slow, fast)` for ground states of `spec`.
///
/// At large `r` only the lowest power of `f` matters, so the slow rate is
/// `2/(p-1)` for the power sum and `2/(q-1)` for the pure power.
pub fn decay_references(spec: &ProblemSpec) -> (f64, f64) {
    let tail = spec.tail_power().unwrap_or(spec.q);
    (2.0 / (tail - 1.0), spec.dim() - 2.0)
}

pub fn classify_decay(spec: &ProblemSpec, exponent: f64) -> DecayClass {
    let (slow, fast) = decay_references(spec);
    let d_slow = ((exponent - slow) / slow).abs();
    let d_fast = ((exponent - fast) / fast).abs();
    match (d_slow <= DECAY_BAND, d_fast <= DECAY_BAND) {
        (true, true) => {
            if d_slow <= d_fast {
                DecayClass::Slow
            } else {
                DecayClass::Fast
            }
        }
        (true, false) => DecayClass::Slow,
        (false, true) => DecayClass::Fast,
        (false, false) => DecayClass::Undetermined,
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Least-squares slope of `ln u` against `ln r`, negated.
pub fn fit_decay_exponent(samples: &[Sample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        samples.iter().filter(|s| s.u > 0.0 && s.r > 0.0).map(|s| (s.r.ln(), s.u.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Integrates from the center with `u(0) = u0` and classifies the result.
pub fn shoot(spec: &ProblemSpec, u0: f64, params: &ShotParams) -> Result<ShotOutcome> {
    spec.validate()?;
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(Error::InvalidArgument(format!("u0 must be positive, got {u0}")));
    }
    if !(params.r_classify >= 1e3 && params.r_classify.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "classification radius must be at least 1e3, got {}",
            params.r_classify
        )));
    }
    let ivp = RadialIvp::from_center(spec.n, spec.nonlinearity(), u0, params.r_classify, params.precision);
    let grid = log_grid(params.r_classify / 10.0, params.r_classify, DECAY_FIT_POINTS);
    let res = integrator::integrate(&ivp, &params.tol, &grid)?;

    let mut decay_exponent = None;
    let classification = match res.status {
        IntegrationStatus::RootFound { r_root } => Classification::Dirichlet {
            omega: r_root,
            lambda: r_root * r_root,
            log_lambda: 2.0 * r_root.ln(),
        },
        IntegrationStatus::ReachedRMax => {
            decay_exponent = fit_decay_exponent(&res.trajectory);
            let decay = decay_exponent.map_or(DecayClass::Undetermined, |e| classify_decay(spec, e));
            Classification::GroundState { decay }
        }
        IntegrationStatus::Diverged(reason) => Classification::Diverged { reason },
    };
    Ok(ShotOutcome {
        u0,
        classification,
        diagnostics: ShotDiagnostics { terminal: res.terminal, decay_exponent, stats: res.stats },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletCheck {
    /// Largest `|U'' + (n-1)/x U' + lambda f(U)|` over the samples, divided
    /// by `lambda f(U(0))`.
    pub max_relative_residual: f64,
    /// Value of the reconstructed solution at `x = 1`.
    pub boundary_value: f64,
    pub samples: usize,
}

/// Rebuilds `U(x) = u(omega x)` on the unit ball and evaluates the residual
/// of the boundary-value problem, with `U''` from central differences.
pub fn verify_dirichlet(spec: &ProblemSpec, outcome: &ShotOutcome, params: &ShotParams) -> Result<DirichletCheck> {
    let Classification::Dirichlet { omega, .. } = outcome.classification else {
        return Err(Error::NotDirichlet);
    };
    let f = spec.nonlinearity();
    let u0 = outcome.u0;
    let rel = (params.tol.rel_tol * 1e-2).max(1e-13);
    let tol = Tolerances { rel_tol: rel, abs_tol: params.tol.abs_tol.min(rel * 1e-10), root_tol: params.tol.root_tol };
    let ivp = RadialIvp::from_center(spec.n, f, u0, omega * 1.5, params.precision);
    let scale = ivp.characteristic_scale();

    let xs: Vec<f64> = (1..50).map(|i| f64::from(i) / 50.0).collect();
    let mut grid = Vec::with_capacity(xs.len() * 5 + 1);
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    for x in &xs {
        let r = omega * x;
        let h = 1e-2 * r.min(scale);
        grid.extend(offsets.iter().map(|k| r + k * h));
    }
    grid.push(omega);
    let res = integrator::integrate(&ivp, &tol, &grid)?;
    let lookup = |r: f64| {
        res.trajectory
            .binary_search_by(|s| s.r.total_cmp(&r))
            .map(|i| res.trajectory[i])
            .map_err(|_| Error::Diverged(format!("reconstruction stopped before r = {r}")))
    };

    let nm1 = f64::from(spec.n) - 1.0;
    let f0 = f.eval(&u0);
    let mut worst = 0.0f64;
    for x in &xs {
        let r = omega * x;
        let h = 1e-2 * r.min(scale);
        let d: Vec<Sample> = offsets.iter().map(|k| lookup(r + k * h)).collect::<Result<_>>()?;
        let upp = (-d[4].du + 8.0 * d[3].du - 8.0 * d[1].du + d[0].du) / (12.0 * h);
        let c = d[2];
        let resid = upp + nm1 / c.r * c.du + f.eval(&c.u);
        worst = worst.max((resid / f0).abs());
    }
    let boundary_value = lookup(omega).map(|s| s.u).unwrap_or(res.terminal.u);
    Ok(DirichletCheck { max_relative_residual: worst, boundary_value: boundary_value / u0.max(1.0), samples: xs.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Dirichlet,
    Ground(DecayClass),
}

fn kind_of(outcome: &ShotOutcome) -> Result<Kind> {
    match outcome.classification {
        Classification::Dirichlet { .. } => Ok(Kind::Dirichlet),
        Classification::GroundState { decay } => Ok(Kind::Ground(decay)),
        Classification::Diverged { reason } => {
            Err(Error::Diverged(format!("shot at u0 = {} diverged: {}", outcome.u0, reason.as_str())))
        }
    }
}

/// Threshold on `ln lambda` separating two solution curves.
pub const JUMP_THRESHOLD: f64 = 1.0;
const SCAN_INTERIOR: usize = 9;
const MAX_BISECTIONS: usize = 200;

/// Bisects on `u0` between shots of different kind until the bracket is
/// narrower than `tol`; returns the last bracket.
fn bisect_kind(
    spec: &ProblemSpec,
    mut a: f64,
    mut b: f64,
    kind_a: Kind,
    tol: f64,
    params: &ShotParams,
) -> Result<(f64, f64)> {
    for _ in 0..MAX_BISECTIONS {
        if (b - a).abs() <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if kind_of(&shoot(spec, mid, params)?)? == kind_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

fn scan(spec: &ProblemSpec, lo: f64, hi: f64, params: &ShotParams) -> Result<Vec<ShotOutcome>> {
    let m = SCAN_INTERIOR + 1;
    (0..=m)
        .into_par_iter()
        .map(|i| {
            let u = if i == m { hi } else { lo + (hi - lo) * i as f64 / m as f64 };
            shoot(spec, u, params)
        })
        .collect()
}

/// Locates a ground-state level separating the behaviour at `u0_lo` and
/// `u0_hi`.
///
/// Shots of different kind (Dirichlet, or ground states with different
/// decay) are bisected directly. If every shot is Dirichlet, the maximum of
/// `omega` is zoomed in on until a ground state appears or the bracket
/// shrinks below `tol`; a peak that does not rise [`JUMP_THRESHOLD`] above
/// both ends in `ln lambda` is a smooth maximum, not a separator.
pub fn find_ground_state_level(spec: &ProblemSpec, u0_lo: f64, u0_hi: f64, tol: f64, params: &ShotParams) -> Result<f64> {
    if !(u0_lo.is_finite() && u0_hi.is_finite()) || u0_lo <= 0.0 {
        return Err(Error::InvalidArgument(format!("invalid bracket [{u0_lo}, {u0_hi}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if u0_lo == u0_hi {
        return Err(Error::SameBehavior(format!("empty bracket at u0 = {u0_lo}")));
    }
    if u0_lo > u0_hi {
        return Err(Error::InvalidArgument(format!("bracket is reversed: [{u0_lo}, {u0_hi}]")));
    }

    let (mut lo, mut hi) = (u0_lo, u0_hi);
    let mut end_log_lambda: Option<f64> = None;
    loop {
        let shots = scan(spec, lo, hi, params)?;
        let kinds: Vec<Kind> = shots.iter().map(kind_of).collect::<Result<_>>()?;
        if let Some(i) = kinds.iter().position(|k| *k != kinds[0]) {
            let first = kinds[0];
            let left = (shots[i - 1].u0, shots[i].u0);
            let right_edge = (first == Kind::Dirichlet)
                .then(|| kinds[i..].iter().position(|k| *k == Kind::Dirichlet).map(|j| i + j))
                .flatten();
            return match right_edge {
                Some(j) => {
                    let inside = kinds[j - 1];
                    let (l, r) = rayon::join(
                        || bisect_kind(spec, left.0, left.1, first, tol, params),
                        || bisect_kind(spec, shots[j - 1].u0, shots[j].u0, inside, tol, params),
                    );
                    let (l, r) = (l?, r?);
                    Ok(0.25 * (l.0 + l.1 + r.0 + r.1))
                }
                None => {
                    let (a, b) = bisect_kind(spec, left.0, left.1, first, tol, params)?;
                    Ok(0.5 * (a + b))
                }
            };
        }
        if kinds[0] != Kind::Dirichlet {
            return Err(Error::SameBehavior(format!("all shots in [{lo}, {hi}] are ground states of one kind")));
        }

        let logs: Vec<f64> = shots.iter().map(|s| s.log_lambda().unwrap_or(f64::NAN)).collect();
        let ends = *end_log_lambda.get_or_insert(logs[0].max(logs[logs.len() - 1]));
        let (imax, peak) = logs
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if imax == 0 || imax == logs.len() - 1 {
            return Err(Error::SameBehavior(format!("ln lambda has no interior peak in [{lo}, {hi}]")));
        }
        let (nlo, nhi) = (shots[imax - 1].u0, shots[imax + 1].u0);
        if nhi - nlo <= tol || nlo == lo && nhi == hi {
            if peak - ends > JUMP_THRESHOLD {
                return Ok(shots[imax].u0);
            }
            return Err(Error::SameBehavior(format!("smooth maximum of lambda near u0 = {}", shots[imax].u0)));
        }
        lo = nlo;
        hi = nhi;
    }
}
