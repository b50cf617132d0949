use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde::Serialize;
use supercrit::bifurcation::{segment, shoot_grid};
use supercrit::shooting::ShotParams;
use supercrit::{
    b_constant, compute_exponents, gelfand_lambda_inf, gelfand_verify, integrate, shoot, singular_setup,
    solve_singular, BifurcationDiagram, Classification, DecayClass, Error, GridSpec, ProblemSpec, RadialIvp,
    SingularTolerances, SweepOptions, Variant,
};

use crate::args::{Cli, Command, GlobalArgs, GridKind, ProblemArgs};
use crate::config::RunConfig;
use crate::output::{field, nums, print_json, write_csv, write_json, Num};
use crate::{repro, UsageError};

const DEFAULT_REL_TOL: f64 = 1e-10;
const DEFAULT_ABS_TOL: f64 = 1e-20;
const DEFAULT_ROOT_TOL: f64 = 1e-12;
const SINGULAR_REL_TOL: f64 = 1e-12;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub struct Problem {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub variant: Variant,
}

impl Problem {
    fn from_args(a: &ProblemArgs) -> Result<Self> {
        let p = match (a.variant, a.p) {
            (Variant::PowerSum, Some(p)) => p,
            (Variant::PowerSum, None) => return Err(usage("--p is required for the power-sum variant")),
            (_, _) => a.q,
        };
        Ok(Self { n: a.n, p, q: a.q, variant: a.variant })
    }
}

/// Merges command-line settings with per-command defaults and validates them.
pub fn build_config(
    command: &str,
    g: &GlobalArgs,
    env_bits: Option<u32>,
    problem: Problem,
    rel_tol_default: f64,
    r_classify: Option<f64>,
) -> Result<RunConfig> {
    let spec = ProblemSpec::new(problem.n, problem.p, problem.q, problem.variant)?;
    let cfg = RunConfig {
        command: command.to_string(),
        n: problem.n,
        p: problem.p,
        q: problem.q,
        variant: problem.variant,
        precision_bits: g.precision.or(env_bits).unwrap_or(64),
        rel_tol: g.rel_tol.unwrap_or(rel_tol_default),
        abs_tol: g.abs_tol.unwrap_or(DEFAULT_ABS_TOL),
        root_tol: g.root_tol.unwrap_or(DEFAULT_ROOT_TOL),
        r_classify: r_classify.unwrap_or_else(|| ShotParams::for_spec(&spec).r_classify),
        workers: g.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        out: None,
        meta: None,
        params: BTreeMap::new(),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep_options(cfg: &RunConfig) -> Result<SweepOptions> {
    let spec = cfg.spec()?;
    let mut opts = SweepOptions::for_spec(&spec);
    opts.shot = ShotParams { r_classify: cfg.r_classify, tol: cfg.tolerances(), precision: cfg.precision() };
    opts.workers = cfg.workers;
    Ok(opts)
}

pub fn run(cli: &Cli, env_bits: Option<u32>) -> Result<()> {
    let g = &cli.global;
    let name = cli.command.name();
    match &cli.command {
        Command::Exponents(pa) => {
            let cfg = build_config(name, g, env_bits, Problem::from_args(pa)?, DEFAULT_REL_TOL, None)?;
            exponents(&cfg)
        }
        Command::Shoot { problem, u0, r_classify, out, samples } => {
            let mut cfg = build_config(name, g, env_bits, Problem::from_args(problem)?, DEFAULT_REL_TOL, *r_classify)?;
            cfg.out = out.clone();
            cfg.param("u0", field(*u0));
            cfg.param("samples", samples);
            shoot_cmd(&cfg, *u0, *samples)
        }
        Command::Curve {
            problem,
            grid,
            u0_min,
            u0_max,
            steps,
            zoom_center,
            zoom_ratio,
            zoom_count,
            r_classify,
            out,
            meta,
        } => {
            if u0_min > u0_max {
                return Err(usage(format!("--u0-min {u0_min} exceeds --u0-max {u0_max}")));
            }
            let mut cfg = build_config(name, g, env_bits, Problem::from_args(problem)?, DEFAULT_REL_TOL, *r_classify)?;
            let spec = grid_spec(*grid, *u0_min, *u0_max, *steps, *zoom_center, *zoom_ratio, *zoom_count)?;
            cfg.out = Some(out.clone());
            cfg.meta = meta.clone();
            cfg.param("grid", serde_json::to_string(&grid_json(&spec))?);
            let points = spec.points()?;
            let diagram = diagram_for(&cfg, &points)?;
            let report = DiagramReport::new(&cfg, &diagram, None);
            write_diagram_csv(out, &cfg, &diagram)?;
            if let Some(meta) = meta {
                write_json(meta, &report)?;
            }
            print_json(&report)
        }
        Command::Groundstates { problem, u0_min, u0_max, tol, steps, grid, r_classify } => {
            if u0_min > u0_max {
                return Err(usage(format!("--u0-min {u0_min} exceeds --u0-max {u0_max}")));
            }
            let cfg = build_config(name, g, env_bits, Problem::from_args(problem)?, DEFAULT_REL_TOL, *r_classify)?;
            if !(*tol > 0.0 && *tol < 1.0) {
                return Err(Error::InvalidArgument(format!("--tol must lie in (0, 1), got {tol}")).into());
            }
            let spec = grid_spec(*grid, *u0_min, *u0_max, *steps, None, 0.5, 12)?;
            let mut opts = sweep_options(&cfg)?;
            opts.separator_tol = *tol;
            let outcomes = shoot_grid(&cfg.spec()?, &spec.points()?, &opts)?;
            let diagram = segment(&cfg.spec()?, outcomes, &opts)?;
            print_json(&nums(&diagram.separators))
        }
        Command::Singular { n, p, q, out, points } => {
            let problem = Problem { n: *n, p: *p, q: *q, variant: Variant::PowerSum };
            let mut cfg = build_config(name, g, env_bits, problem, SINGULAR_REL_TOL, None)?;
            cfg.out = out.clone();
            cfg.param("points", points);
            singular_cmd(&cfg, *points)
        }
        Command::Gelfand { n, q, t, tolerance } => {
            let problem = Problem { n: *n, p: *q, q: *q, variant: Variant::GelfandType };
            let mut cfg = build_config(name, g, env_bits, problem, DEFAULT_REL_TOL, None)?;
            cfg.param("t", field(*t));
            cfg.param("tolerance", field(*tolerance));
            gelfand_cmd(&cfg, *t, *tolerance)
        }
        Command::Repro { figure, out_dir } => repro::run(*figure, out_dir, g, env_bits),
    }
}

#[derive(Serialize)]
struct ExponentsJson {
    critical: Num,
    serrin: Num,
    lin_ni_q: Num,
    #[serde(rename = "B")]
    b: Num,
    p1: Num,
    p2: Num,
    p_jl: Num,
    supercritical: bool,
    lin_ni: bool,
    oscillatory: bool,
    euler_root_re: Vec<Num>,
    euler_root_im: Vec<Num>,
}

fn exponents(cfg: &RunConfig) -> Result<()> {
    let r = compute_exponents(&cfg.spec()?)?;
    print_json(&ExponentsJson {
        critical: Num(r.critical),
        serrin: Num(r.serrin),
        lin_ni_q: Num(r.lin_ni_q),
        b: Num(r.b),
        p1: Num(r.p1),
        p2: Num(r.p2),
        p_jl: Num(r.p_jl),
        supercritical: r.supercritical,
        lin_ni: r.lin_ni,
        oscillatory: r.oscillatory,
        euler_root_re: nums(&r.euler_roots.re),
        euler_root_im: nums(&r.euler_roots.im),
    })
}

fn decay_name(d: DecayClass) -> &'static str {
    match d {
        DecayClass::Slow => "slow",
        DecayClass::Fast => "fast",
        DecayClass::Undetermined => "undetermined",
    }
}

#[derive(Serialize)]
struct ShotJson {
    u0: Num,
    classification: &'static str,
    decay: Option<&'static str>,
    divergence: Option<&'static str>,
    omega: Num,
    lambda: Num,
    log_lambda: Num,
    decay_exponent: Num,
    steps_accepted: usize,
    steps_rejected: usize,
}

fn shoot_cmd(cfg: &RunConfig, u0: f64, samples: usize) -> Result<()> {
    let spec = cfg.spec()?;
    let params = ShotParams { r_classify: cfg.r_classify, tol: cfg.tolerances(), precision: cfg.precision() };
    let shot = shoot(&spec, u0, &params)?;
    let nan = f64::NAN;
    let (decay, divergence) = match shot.classification {
        Classification::GroundState { decay } => (Some(decay_name(decay)), None),
        Classification::Diverged { reason } => (None, Some(reason.as_str())),
        Classification::Dirichlet { .. } => (None, None),
    };
    print_json(&ShotJson {
        u0: Num(u0),
        classification: shot.classification.name(),
        decay,
        divergence,
        omega: Num(shot.omega().unwrap_or(nan)),
        lambda: Num(shot.lambda().unwrap_or(nan)),
        log_lambda: Num(shot.log_lambda().unwrap_or(nan)),
        decay_exponent: Num(shot.diagnostics.decay_exponent.unwrap_or(nan)),
        steps_accepted: shot.diagnostics.stats.accepted,
        steps_rejected: shot.diagnostics.stats.rejected,
    })?;
    if let Some(out) = &cfg.out {
        if samples < 2 {
            return Err(Error::InvalidArgument("--samples must be at least 2".into()).into());
        }
        let r_end = shot.omega().unwrap_or(cfg.r_classify);
        let ivp = RadialIvp::from_center(spec.n, spec.nonlinearity(), u0, cfg.r_classify, cfg.precision());
        let lo = (r_end * 1e-8).ln();
        let hi = r_end.ln();
        let mut grid = vec![0.0];
        grid.extend((0..samples - 1).map(|i| (lo + (hi - lo) * i as f64 / (samples - 2).max(1) as f64).exp()));
        let res = integrate(&ivp, &cfg.tolerances(), &grid)?;
        let mut traj = res.trajectory.clone();
        if let Some(root) = res.root() {
            if !traj.last().is_some_and(|s| s.r >= root) {
                traj.push(supercrit::Sample { r: root, u: 0.0, du: res.terminal.du });
            }
        }
        let rows: Vec<Vec<String>> = traj.iter().map(|s| vec![field(s.r), field(s.u), field(s.du)]).collect();
        write_csv(out, cfg, &["r", "u", "du"], &rows)?;
    }
    if let Classification::Diverged { reason } = shot.classification {
        return Err(Error::Diverged(format!("shot from u0 = {u0}: {}", reason.as_str())).into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn grid_spec(
    kind: GridKind,
    min: f64,
    max: f64,
    steps: usize,
    center: Option<f64>,
    ratio: f64,
    count: usize,
) -> Result<GridSpec> {
    Ok(match kind {
        GridKind::Linear => GridSpec::Linear { min, max, steps },
        GridKind::Log => GridSpec::Log { min, max, steps },
        GridKind::Zoom => {
            let center = center.unwrap_or(0.5 * (min + max));
            let offset = (center - min).min(max - center);
            if offset.is_nan() || offset <= 0.0 {
                return Err(usage(format!("--zoom-center {center} must lie strictly inside [{min}, {max}]")));
            }
            GridSpec::GeometricZoom { center, offset, ratio, count }
        }
    })
}

pub fn grid_json(g: &GridSpec) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::new();
    match *g {
        GridSpec::Linear { min, max, steps } | GridSpec::Log { min, max, steps } => {
            m.insert("kind", if matches!(g, GridSpec::Linear { .. }) { "linear" } else { "log" }.to_string());
            m.insert("min", field(min));
            m.insert("max", field(max));
            m.insert("steps", steps.to_string());
        }
        GridSpec::GeometricZoom { center, offset, ratio, count } => {
            m.insert("kind", "zoom".to_string());
            m.insert("center", field(center));
            m.insert("offset", field(offset));
            m.insert("ratio", field(ratio));
            m.insert("count", count.to_string());
        }
    }
    m
}

pub fn diagram_for(cfg: &RunConfig, points: &[f64]) -> Result<BifurcationDiagram> {
    let spec = cfg.spec()?;
    let opts = sweep_options(cfg)?;
    let outcomes = shoot_grid(&spec, points, &opts)?;
    Ok(segment(&spec, outcomes, &opts)?)
}

pub fn write_diagram_csv(path: &Path, cfg: &RunConfig, d: &BifurcationDiagram) -> Result<()> {
    let rows: Vec<Vec<String>> = d
        .points
        .iter()
        .map(|p| vec![field(p.u0), field(p.omega), field(p.lambda), field(p.log_lambda), p.curve_id.to_string()])
        .collect();
    write_csv(path, cfg, &["u0", "omega", "lambda", "log_lambda", "curve_id"], &rows)
}

#[derive(Serialize)]
struct CurveJson {
    id: usize,
    u0_min: Num,
    u0_max: Num,
    points: usize,
}

#[derive(Serialize)]
struct TurningJson {
    curve_id: usize,
    u0: Num,
    lambda: Num,
    log_lambda: Num,
    at_boundary: bool,
}

#[derive(Serialize)]
struct GroundStateJson {
    u0: Num,
    decay: &'static str,
    decay_exponent: Num,
}

#[derive(Serialize)]
pub struct AsymptoteJson {
    pub lambda_inf: Num,
    pub ln_lambda_inf: Num,
    pub crossings: usize,
}

/// Sidecar contents of a diagram: everything except the point list.
#[derive(Serialize)]
pub struct DiagramReport<'a> {
    config: &'a RunConfig,
    points: usize,
    curves: Vec<CurveJson>,
    separators: Vec<Num>,
    turning_points: Vec<TurningJson>,
    ground_states: Vec<GroundStateJson>,
    diverged: Vec<Num>,
    asymptote_estimate: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular: Option<AsymptoteJson>,
}

impl<'a> DiagramReport<'a> {
    pub fn new(cfg: &'a RunConfig, d: &BifurcationDiagram, singular: Option<AsymptoteJson>) -> Self {
        Self {
            config: cfg,
            points: d.points.len(),
            curves: d
                .curves
                .iter()
                .map(|c| CurveJson { id: c.id, u0_min: Num(c.u0_min), u0_max: Num(c.u0_max), points: c.end - c.start })
                .collect(),
            separators: nums(&d.separators),
            turning_points: d
                .turning_points
                .iter()
                .map(|t| TurningJson {
                    curve_id: t.curve_id,
                    u0: Num(t.point.u0),
                    lambda: Num(t.point.lambda),
                    log_lambda: Num(t.point.log_lambda),
                    at_boundary: t.at_boundary,
                })
                .collect(),
            ground_states: d
                .ground_state_points
                .iter()
                .map(|s| GroundStateJson {
                    u0: Num(s.u0),
                    decay: match s.classification {
                        Classification::GroundState { decay } => decay_name(decay),
                        _ => "none",
                    },
                    decay_exponent: Num(s.diagnostics.decay_exponent.unwrap_or(f64::NAN)),
                })
                .collect(),
            diverged: nums(&d.diverged_points),
            asymptote_estimate: Num(d.asymptote_estimate.unwrap_or(f64::NAN)),
            singular,
        }
    }
}

#[derive(Serialize)]
struct SingularJson {
    case: &'static str,
    gamma: Num,
    alpha: Num,
    alpha1: Num,
    alpha2: Num,
    alpha3: Num,
    a0: Num,
    a1: Num,
    xi: Num,
    eta: Num,
    lambda_inf: Num,
    ln_lambda_inf: Num,
}

pub fn singular_tolerances(cfg: &RunConfig) -> SingularTolerances {
    SingularTolerances { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, precision: cfg.precision() }
}

fn singular_cmd(cfg: &RunConfig, points: usize) -> Result<()> {
    let setup = singular_setup(&cfg.spec()?)?;
    let sol = solve_singular(&setup, &singular_tolerances(cfg))?;
    print_json(&SingularJson {
        case: setup.case.name(),
        gamma: Num(setup.gamma),
        alpha: Num(setup.alpha),
        alpha1: Num(setup.alpha1),
        alpha2: Num(setup.alpha2),
        alpha3: Num(setup.alpha3),
        a0: Num(setup.a0),
        a1: Num(setup.a1.unwrap_or(f64::NAN)),
        xi: Num(sol.xi),
        eta: Num(sol.eta.unwrap_or(f64::NAN)),
        lambda_inf: Num(sol.lambda_inf),
        ln_lambda_inf: Num(sol.ln_lambda_inf),
    })?;
    if let Some(out) = &cfg.out {
        if points == 0 {
            return Err(Error::InvalidArgument("--points must be at least 1".into()).into());
        }
        let xs: Vec<f64> = (1..=points).map(|i| i as f64 / points as f64).collect();
        let profile = sol.unit_ball_profile(&xs)?;
        let rows: Vec<Vec<String>> = profile.iter().map(|s| vec![field(s.r), field(s.u)]).collect();
        write_csv(out, cfg, &["r", "u"], &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GelfandJson {
    #[serde(rename = "B")]
    b: Num,
    lambda_inf: Num,
    verified: bool,
    t: Num,
    tolerance: Num,
    lambda_at_t: Num,
    relative_error: Num,
    period_averaged: Num,
    period_averaged_error: Num,
}

fn gelfand_cmd(cfg: &RunConfig, t: f64, tolerance: f64) -> Result<()> {
    let lambda_inf = gelfand_lambda_inf(cfg.n, cfg.q)?;
    let check = gelfand_verify(cfg.n, cfg.q, t, cfg.rel_tol)?;
    print_json(&GelfandJson {
        b: Num(b_constant(f64::from(cfg.n), cfg.q)),
        lambda_inf: Num(lambda_inf),
        verified: check.relative_error.abs() <= tolerance,
        t: Num(t),
        tolerance: Num(tolerance),
        lambda_at_t: Num(check.lambda_at_t),
        relative_error: Num(check.relative_error),
        period_averaged: Num(check.period_averaged),
        period_averaged_error: Num(check.period_averaged_error),
    })
}
