use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supercrit::Variant;

#[derive(Debug, Parser)]
#[command(name = "supercrit", version, about = "Bifurcation diagrams, ground states and singular solutions of u'' + (n-1)/r u' + lambda f(u) = 0")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Mantissa bits: 64 (double), 128, 256 or 512. Defaults to $SUPERCRIT_PRECISION, then 64.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Maximum number of shots run concurrently.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub root_tol: Option<f64>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: supercrit::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub n: u32,
    /// Lower power; required for the power-sum variant.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: f64,
    /// power-sum, pure-power or gelfand.
    #[arg(long, default_value = "power-sum", value_parser = parse_variant)]
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    Linear,
    Log,
    Zoom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "1a")]
    Fig1a,
    #[value(name = "1b")]
    Fig1b,
    #[value(name = "3")]
    Fig3,
    #[value(name = "4")]
    Fig4,
}

impl Figure {
    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig1a => "1a",
            Figure::Fig1b => "1b",
            Figure::Fig3 => "3",
            Figure::Fig4 => "4",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form exponents and regime flags.
    Exponents(ProblemArgs),
    /// One shot from the center, classified as Dirichlet, ground state or diverged.
    Shoot {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        u0: f64,
        #[arg(long)]
        r_classify: Option<f64>,
        /// Trajectory CSV with columns r, u, du.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Bifurcation diagram over a grid of u(0) values.
    Curve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = GridKind::Linear)]
        grid: GridKind,
        #[arg(long)]
        u0_min: f64,
        #[arg(long)]
        u0_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Center of a zoom grid; defaults to the middle of the range.
        #[arg(long)]
        zoom_center: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        zoom_ratio: f64,
        #[arg(long, default_value_t = 12)]
        zoom_count: usize,
        #[arg(long)]
        r_classify: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Sidecar JSON with separators and turning points.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Ground-state levels separating Dirichlet curves in a u(0) range.
    Groundstates {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        u0_min: f64,
        #[arg(long)]
        u0_max: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = GridKind::Linear)]
        grid: GridKind,
        #[arg(long)]
        r_classify: Option<f64>,
    },
    /// Singular solution and the asymptote lambda_inf.
    Singular {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// Profile CSV on the unit ball with columns r, u.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Asymptote of the (1+u)^q problem and its integration check.
    Gelfand {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: f64,
        /// Radius of the verification integral.
        #[arg(long, default_value_t = 1e12)]
        t: f64,
        /// Largest accepted relative error of t^2 w(t)^(q-1).
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Regenerates the data behind a figure of the n = 3 examples.
    Repro {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exponents(_) => "exponents",
            Command::Shoot { .. } => "shoot",
            Command::Curve { .. } => "curve",
            Command::Groundstates { .. } => "groundstates",
            Command::Singular { .. } => "singular",
            Command::Gelfand { .. } => "gelfand",
            Command::Repro { .. } => "repro",
        }
    }
}
