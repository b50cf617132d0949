//! Sweeps of the shooting map over `u(0)`, segmented into solution curves
//! separated by ground-state levels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::shooting::{self, Classification, ShotOutcome, ShotParams, JUMP_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// `steps` equally spaced points including both ends.
    Linear { min: f64, max: f64, steps: usize },
    /// `steps` geometrically spaced points including both ends.
    Log { min: f64, max: f64, steps: usize },
    /// `center ± offset * ratio^k` for `k = 0..count`.
    GeometricZoom { center: f64, offset: f64, ratio: f64, count: usize },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let mut pts = match *self {
            GridSpec::Linear { min, max, steps } | GridSpec::Log { min, max, steps } => {
                if !(min.is_finite() && max.is_finite()) || min > max {
                    return bad(format!("grid range [{min}, {max}] is empty"));
                }
                if steps == 0 {
                    return bad("grid needs at least one point".into());
                }
                let log = matches!(self, GridSpec::Log { .. });
                if log && min <= 0.0 {
                    return bad(format!("log grid needs a positive lower end, got {min}"));
                }
                if steps == 1 {
                    return Ok(vec![min]);
                }
                let (a, b) = if log { (min.ln(), max.ln()) } else { (min, max) };
                (0..steps)
                    .map(|i| {
                        let t = a + (b - a) * i as f64 / (steps - 1) as f64;
                        if log {
                            t.exp()
                        } else {
                            t
                        }
                    })
                    .collect::<Vec<_>>()
            }
            GridSpec::GeometricZoom { center, offset, ratio, count } => {
                if !(offset > 0.0 && ratio > 0.0 && ratio < 1.0 && center.is_finite()) {
                    return bad(format!("zoom needs offset > 0 and ratio in (0, 1), got {offset}, {ratio}"));
                }
                if count == 0 {
                    return bad("zoom needs at least one level".into());
                }
                let mut v = Vec::with_capacity(2 * count);
                let mut d = offset;
                for _ in 0..count {
                    v.push(center - d);
                    v.push(center + d);
                    d *= ratio;
                }
                v
            }
        };
        pts.retain(|u| *u > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.is_empty() {
            return bad("grid has no positive points".into());
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub shot: ShotParams,
    /// Upper bound on concurrently running shots.
    pub workers: usize,
    pub jump_threshold: f64,
    pub separator_tol: f64,
}

impl SweepOptions {
    pub fn for_spec(spec: &ProblemSpec) -> Self {
        Self {
            shot: ShotParams::for_spec(spec),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            jump_threshold: JUMP_THRESHOLD,
            separator_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub u0: f64,
    pub lambda: f64,
    pub log_lambda: f64,
    pub omega: f64,
    pub curve_id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub id: usize,
    pub u0_min: f64,
    pub u0_max: f64,
    /// Index range into [`BifurcationDiagram::points`].
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub curve_id: usize,
    pub point: CurvePoint,
    /// The minimum sits at an end of the swept range, so the fold itself
    /// lies outside the window.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub points: Vec<CurvePoint>,
    pub curves: Vec<Curve>,
    /// `separators[i]` lies between curve `i` and curve `i + 1`.
    pub separators: Vec<f64>,
    pub ground_state_points: Vec<ShotOutcome>,
    pub diverged_points: Vec<f64>,
    pub turning_points: Vec<TurningPoint>,
    pub asymptote_estimate: Option<f64>,
}

impl BifurcationDiagram {
    pub fn curve_points(&self, id: usize) -> &[CurvePoint] {
        let c = &self.curves[id];
        &self.points[c.start..c.end]
    }

    pub fn top_curve(&self) -> Option<&[CurvePoint]> {
        self.curves.last().map(|c| &self.points[c.start..c.end])
    }

    pub fn min_lambda(&self) -> f64 {
        self.points.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min)
    }

    pub fn max_lambda(&self) -> f64 {
        self.points.iter().map(|p| p.lambda).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Shoots every grid point, in parallel up to `opts.workers`, and returns
/// the outcomes sorted by `u0`.
pub fn shoot_grid(spec: &ProblemSpec, grid: &[f64], opts: &SweepOptions) -> Result<Vec<ShotOutcome>> {
    if opts.workers == 0 {
        return Err(Error::InvalidArgument("worker budget must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    let mut out: Vec<ShotOutcome> =
        pool.install(|| grid.par_iter().map(|u0| shooting::shoot(spec, *u0, &opts.shot)).collect::<Result<_>>())?;
    out.sort_by(|a, b| a.u0.total_cmp(&b.u0));
    Ok(out)
}

pub fn sweep(spec: &ProblemSpec, grid: &GridSpec, opts: &SweepOptions) -> Result<BifurcationDiagram> {
    spec.validate()?;
    let pts = grid.points()?;
    let outcomes = shoot_grid(spec, &pts, opts)?;
    segment(spec, outcomes, opts)
}

/// Splits sorted shot outcomes into curves.
///
/// A new curve starts after a run of ground-state shots, where `ln lambda`
/// jumps by more than the threshold, or at an interior local maximum of
/// `ln lambda`, provided a ground-state level can be located between the
/// shots. Solution curves are U-shaped in `u0`, and `lambda` grows without
/// bound on both sides of a level, so two shots straddling a level can
/// have similar `lambda`.
pub fn segment(spec: &ProblemSpec, outcomes: Vec<ShotOutcome>, opts: &SweepOptions) -> Result<BifurcationDiagram> {
    let mut dirichlet: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut gap_before: Vec<bool> = Vec::new();
    let mut ground_state_points = Vec::new();
    let mut diverged_points = Vec::new();
    let mut gap = false;
    for o in outcomes {
        match o.classification {
            Classification::Dirichlet { omega, lambda, log_lambda } => {
                dirichlet.push((o.u0, omega, lambda, log_lambda));
                gap_before.push(gap);
                gap = false;
            }
            Classification::GroundState { .. } => {
                ground_state_points.push(o);
                gap = true;
            }
            Classification::Diverged { .. } => diverged_points.push(o.u0),
        }
    }

    let search = |lo: f64, hi: f64| -> Result<Option<f64>> {
        match shooting::find_ground_state_level(spec, lo, hi, opts.separator_tol, &opts.shot) {
            Ok(level) => Ok(Some(level)),
            Err(Error::SameBehavior(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let place = |level: f64, lo: f64, hi: f64| if level > lo && level < hi { level } else { 0.5 * (lo + hi) };

    // splits[k] holds the level between dirichlet[k - 1] and dirichlet[k].
    let mut splits: Vec<Option<f64>> = vec![None; dirichlet.len()];
    for k in 1..dirichlet.len() {
        let (lo, hi) = (dirichlet[k - 1].0, dirichlet[k].0);
        if gap_before[k] {
            let level = search(lo, hi)?.unwrap_or_else(|| midpoint_of_gap(&ground_state_points, lo, hi));
            splits[k] = Some(place(level, lo, hi));
        } else if (dirichlet[k].3 - dirichlet[k - 1].3).abs() > opts.jump_threshold {
            splits[k] = search(lo, hi)?.map(|level| place(level, lo, hi));
        }
    }
    for k in 1..dirichlet.len().saturating_sub(1) {
        let (left, mid, right) = (dirichlet[k - 1], dirichlet[k], dirichlet[k + 1]);
        let is_peak = mid.3 > left.3 && mid.3 > right.3;
        if !is_peak || gap_before[k] || gap_before[k + 1] || splits[k].is_some() || splits[k + 1].is_some() {
            continue;
        }
        if let Some(level) = search(left.0, right.0)? {
            if level < mid.0 {
                splits[k] = Some(place(level, left.0, mid.0));
            } else {
                splits[k + 1] = Some(place(level, mid.0, right.0));
            }
        }
    }

    let mut points: Vec<CurvePoint> = Vec::with_capacity(dirichlet.len());
    let mut separators = Vec::new();
    let mut curve_id = 0usize;
    for (k, &(u0, omega, lambda, log_lambda)) in dirichlet.iter().enumerate() {
        if let Some(level) = splits[k] {
            separators.push(level);
            curve_id += 1;
        }
        points.push(CurvePoint { u0, lambda, log_lambda, omega, curve_id });
    }
    if points.is_empty() {
        return Err(Error::EmptyDiagram);
    }

    let mut curves = Vec::new();
    let mut start = 0;
    for i in 1..=points.len() {
        if i == points.len() || points[i].curve_id != points[start].curve_id {
            curves.push(Curve {
                id: points[start].curve_id,
                u0_min: points[start].u0,
                u0_max: points[i - 1].u0,
                start,
                end: i,
            });
            start = i;
        }
    }
    let mut diagram = BifurcationDiagram {
        points,
        curves,
        separators,
        ground_state_points,
        diverged_points,
        turning_points: Vec::new(),
        asymptote_estimate: None,
    };
    diagram.turning_points = turning_points(&diagram);
    diagram.asymptote_estimate = asymptote_estimate(&diagram);
    Ok(diagram)
}

fn midpoint_of_gap(ground_states: &[ShotOutcome], lo: f64, hi: f64) -> f64 {
    let inside: Vec<f64> = ground_states.iter().map(|g| g.u0).filter(|u| *u > lo && *u < hi).collect();
    if inside.is_empty() {
        0.5 * (lo + hi)
    } else {
        0.5 * (inside[0] + inside[inside.len() - 1])
    }
}

/// The point of minimal `lambda` on each curve.
pub fn turning_points(diagram: &BifurcationDiagram) -> Vec<TurningPoint> {
    diagram
        .curves
        .iter()
        .map(|c| {
            let pts = &diagram.points[c.start..c.end];
            let (i, p) = pts
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.lambda.total_cmp(&b.1.lambda))
                .expect("curves are never empty");
            TurningPoint { curve_id: c.id, point: *p, at_boundary: i == 0 || i + 1 == pts.len() }
        })
        .collect()
}

/// Estimate of the asymptote `lambda_inf` from the top curve.
///
/// The top curve oscillates about `lambda_inf` with slowly decaying
/// amplitude. With at least three interior extrema, the estimate is
/// `exp((l1 + 2 l2 + l3) / 4)` over the last three extrema `l_i` of
/// `ln lambda`, which cancels a linearly decaying amplitude. Otherwise it is
/// the median of `lambda` over the last decade in `u0`.
pub fn asymptote_estimate(diagram: &BifurcationDiagram) -> Option<f64> {
    let top = diagram.top_curve()?;
    let extrema: Vec<f64> = top
        .windows(3)
        .filter(|w| (w[1].log_lambda - w[0].log_lambda) * (w[2].log_lambda - w[1].log_lambda) < 0.0)
        .map(|w| w[1].log_lambda)
        .collect();
    if let [.., a, b, c] = extrema[..] {
        return Some(((a + 2.0 * b + c) / 4.0).exp());
    }
    let u_max = top.last()?.u0;
    let mut lambdas: Vec<f64> = top.iter().filter(|p| p.u0 >= u_max / 10.0).map(|p| p.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    let m = lambdas.len();
    if m == 0 {
        return None;
    }
    Some(if m % 2 == 1 { lambdas[m / 2] } else { 0.5 * (lambdas[m / 2 - 1] + lambdas[m / 2]) })
}

/// Sign changes of `lambda - lambda_inf` along the top curve for `u0 >= u0_min`.
pub fn count_asymptote_crossings(diagram: &BifurcationDiagram, lambda_inf: f64, u0_min: f64) -> usize {
    let Some(top) = diagram.top_curve() else { return 0 };
    let signs: Vec<bool> =
        top.iter().filter(|p| p.u0 >= u0_min && p.lambda != lambda_inf).map(|p| p.lambda > lambda_inf).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
