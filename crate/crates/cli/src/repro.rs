//! Grid schedules for the n = 3, q = 7 figures.

use std::path::Path;

use anyhow::{Context, Result};
use supercrit::{count_asymptote_crossings, singular_setup, solve_singular, GridSpec, Variant};

use crate::args::{Figure, GlobalArgs};
use crate::commands::{
    build_config, diagram_for, grid_json, singular_tolerances, write_diagram_csv, AsymptoteJson, DiagramReport,
    Problem,
};
use crate::output::{print_json, write_json, Num};

pub struct Schedule {
    pub p: f64,
    pub r_classify: Option<f64>,
    pub grids: Vec<GridSpec>,
    pub with_singular: bool,
}

pub fn schedule(figure: Figure) -> Schedule {
    use GridSpec::*;
    match figure {
        // the unique curve for p = 1
        Figure::Fig1a => Schedule {
            p: 1.0,
            r_classify: None,
            grids: vec![Log { min: 1e-6, max: 100.0, steps: 300 }],
            with_singular: false,
        },
        // the whole Lin-Ni diagram: first curves, both sides of u(0) = 2 and the top curve
        Figure::Fig1b => Schedule {
            p: 4.0,
            r_classify: None,
            grids: vec![
                Linear { min: 0.01, max: 1.5, steps: 150 },
                Linear { min: 1.5, max: 2.5, steps: 200 },
                GeometricZoom { center: 2.0, offset: 0.5, ratio: 0.5, count: 12 },
                Log { min: 2.5, max: 100.0, steps: 200 },
            ],
            with_singular: false,
        },
        // accumulation of levels at u(0) = 2
        Figure::Fig3 => Schedule {
            p: 4.0,
            r_classify: None,
            grids: vec![
                Linear { min: 1.4, max: 2.0, steps: 200 },
                GeometricZoom { center: 2.0, offset: 0.5, ratio: 0.8, count: 30 },
                Log { min: 2.001, max: 50.0, steps: 300 },
            ],
            with_singular: false,
        },
        // oscillation of the top curve about lambda_inf
        Figure::Fig4 => Schedule {
            p: 4.0,
            r_classify: None,
            grids: vec![Log { min: 2.05, max: 1e4, steps: 400 }],
            with_singular: true,
        },
    }
}

pub fn grid_points(grids: &[GridSpec]) -> supercrit::Result<Vec<f64>> {
    let mut pts = Vec::new();
    for g in grids {
        pts.extend(g.points()?);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

pub fn run(figure: Figure, out_dir: &Path, g: &GlobalArgs, env_bits: Option<u32>) -> Result<()> {
    let s = schedule(figure);
    let problem = Problem { n: 3, p: s.p, q: 7.0, variant: Variant::PowerSum };
    let mut cfg = build_config("repro", g, env_bits, problem, 1e-10, s.r_classify)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let csv = out_dir.join(format!("fig{}.csv", figure.id()));
    let meta = out_dir.join(format!("fig{}.json", figure.id()));
    cfg.out = Some(csv.clone());
    cfg.meta = Some(meta.clone());
    cfg.param("figure", figure.id());
    let grids: Vec<_> = s.grids.iter().map(grid_json).collect();
    cfg.param("grids", serde_json::to_string(&grids)?);

    let diagram = diagram_for(&cfg, &grid_points(&s.grids)?)?;
    let singular = if s.with_singular {
        let setup = singular_setup(&cfg.spec()?)?;
        let sol = solve_singular(&setup, &singular_tolerances(&cfg))?;
        Some(AsymptoteJson {
            lambda_inf: Num(sol.lambda_inf),
            ln_lambda_inf: Num(sol.ln_lambda_inf),
            crossings: count_asymptote_crossings(&diagram, sol.lambda_inf, 0.0),
        })
    } else {
        None
    };
    let report = DiagramReport::new(&cfg, &diagram, singular);
    write_diagram_csv(&csv, &cfg, &diagram)?;
    write_json(&meta, &report)?;
    print_json(&report)
}
