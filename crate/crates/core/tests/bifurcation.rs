use supercrit::{
    shoot, sweep, BifurcationDiagram, Error, GridSpec, ProblemSpec, ShotParams, SweepOptions,
};

fn lin_ni() -> ProblemSpec {
    ProblemSpec::power_sum(3, 4.0, 7.0).unwrap()
}

fn run(spec: &ProblemSpec, grid: GridSpec) -> BifurcationDiagram {
    sweep(spec, &grid, &SweepOptions::for_spec(spec)).unwrap()
}

fn assert_structure(d: &BifurcationDiagram) {
    assert_eq!(d.separators.len() + 1, d.curves.len());
    for (i, c) in d.curves.iter().enumerate() {
        assert_eq!(c.id, i);
        let pts = d.curve_points(i);
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| p.curve_id == i && p.lambda.is_finite() && p.lambda > 0.0));
        assert!(pts.windows(2).all(|w| w[0].u0 < w[1].u0));
        let min = pts.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
        assert_eq!(d.turning_points[i].point.lambda, min);
    }
    for (i, s) in d.separators.iter().enumerate() {
        assert!(d.curves[i].u0_max < *s && *s < d.curves[i + 1].u0_min, "separator {s} not between curves {i}, {}", i + 1);
    }
}

/// On both sides of a separator, `lambda` grows without bound as `u0`
/// approaches the level.
fn assert_is_level(spec: &ProblemSpec, level: f64) {
    let params = ShotParams::for_spec(spec);
    let lambda = |u0: f64| shoot(spec, u0, &params).unwrap().lambda().expect("Dirichlet next to a separator");
    for side in [-1.0, 1.0] {
        let far = lambda(level * (1.0 + side * 1e-2));
        let near = lambda(level * (1.0 + side * 1e-3));
        assert!(near > 10.0 * far && near > 1e7, "level {level}: lambda {far:e} -> {near:e}");
    }
}

#[test]
fn separators_below_two_increase_towards_two() {
    let spec = lin_ni();
    let d = run(&spec, GridSpec::Linear { min: 0.01, max: 1.99, steps: 200 });
    assert_structure(&d);
    let expected = [1.53443, 1.84864, 1.95792];
    assert_eq!(d.separators.len(), expected.len(), "{:?}", d.separators);
    for (s, e) in d.separators.iter().zip(expected) {
        assert!((s - e).abs() < 1e-3, "separator {s} vs {e}");
    }
    // The third level borders a curve whose roots sit near the
    // classification radius, so only the first two are checked pointwise.
    for s in &d.separators[..2] {
        assert_is_level(&spec, *s);
    }
    let gaps: Vec<f64> = d.separators.iter().map(|s| 2.0 - s).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    let steps: Vec<f64> = d.separators.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.windows(2).all(|w| w[1] < w[0]));
    let tp = &d.turning_points[0];
    assert!(!tp.at_boundary);
    assert!((tp.point.lambda - 735.0).abs() / 735.0 < 0.05);
    // lambda_i grows very rapidly with i.
    let mins: Vec<f64> = d.turning_points.iter().map(|t| t.point.lambda).collect();
    assert!(mins.windows(2).all(|w| w[1] > 1e3 * w[0]), "{mins:?}");
}

#[test]
fn separators_above_two_decrease_towards_two() {
    let spec = lin_ni();
    let d = run(&spec, GridSpec::Log { min: 2.001, max: 50.0, steps: 300 });
    assert_structure(&d);
    let mut above: Vec<f64> = d.separators.clone();
    above.reverse();
    assert!(above.len() >= 4, "{above:?}");
    assert!(above.windows(2).all(|w| w[1] < w[0]) && above.iter().all(|v| *v > 2.0));
    for (v, e) in above.iter().zip([15.4901, 10.5023, 2.40595, 2.09087]) {
        assert!((v - e).abs() < 1e-3, "separator {v} vs {e}");
        assert_is_level(&spec, *v);
    }
}

#[test]
fn zoom_grid_reaches_both_sides_of_two() {
    let spec = lin_ni();
    let d = run(&spec, GridSpec::GeometricZoom { center: 2.0, offset: 0.5, ratio: 0.8, count: 30 });
    assert_structure(&d);
    let below = d.separators.iter().filter(|s| **s < 2.0).count();
    let above = d.separators.iter().filter(|s| **s > 2.0).count();
    assert!(below >= 3 && above >= 2, "{:?}", d.separators);
}

#[test]
fn a_priori_bounds_are_stable_under_refinement() {
    let spec = ProblemSpec::power_sum(3, 1.0, 7.0).unwrap();
    let coarse = run(&spec, GridSpec::Log { min: 1e-6, max: 100.0, steps: 150 });
    let fine = run(&spec, GridSpec::Log { min: 1e-6, max: 100.0, steps: 300 });
    for d in [&coarse, &fine] {
        assert!(d.min_lambda() > 0.0 && d.max_lambda().is_finite());
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    assert!(rel(coarse.min_lambda(), fine.min_lambda()) <= 0.05);
    assert!(rel(coarse.max_lambda(), fine.max_lambda()) <= 0.05);
}

#[test]
fn doubling_density_never_merges_curves() {
    let spec = lin_ni();
    for (min, max) in [(0.01, 1.9), (2.2, 30.0)] {
        let coarse = run(&spec, GridSpec::Linear { min, max, steps: 150 });
        let fine = run(&spec, GridSpec::Linear { min, max, steps: 300 });
        assert!(fine.curves.len() >= coarse.curves.len());
        for s in &coarse.separators {
            assert!(fine.separators.iter().any(|f| (f - s).abs() < 1e-5), "separator {s} lost: {:?}", fine.separators);
        }
    }
}

#[test]
fn pure_power_diagram_is_empty() {
    let spec = ProblemSpec::pure_power(3, 7.0).unwrap();
    let res = sweep(&spec, &GridSpec::Log { min: 1e-3, max: 1e3, steps: 60 }, &SweepOptions::for_spec(&spec));
    assert!(matches!(res, Err(Error::EmptyDiagram)));
}

#[test]
fn linear_lower_power_gives_one_curve() {
    let spec = ProblemSpec::power_sum(3, 1.0, 7.0).unwrap();
    let d = run(&spec, GridSpec::Log { min: 1e-6, max: 100.0, steps: 200 });
    assert_structure(&d);
    assert_eq!(d.curves.len(), 1);
    assert!(d.separators.is_empty());
}

#[test]
fn invalid_grids_are_rejected() {
    let spec = lin_ni();
    let opts = SweepOptions::for_spec(&spec);
    assert!(sweep(&spec, &GridSpec::Linear { min: 2.0, max: 1.0, steps: 10 }, &opts).is_err());
    assert!(sweep(&spec, &GridSpec::Log { min: 0.0, max: 1.0, steps: 10 }, &opts).is_err());
    let no_workers = SweepOptions { workers: 0, ..opts };
    assert!(sweep(&spec, &GridSpec::Linear { min: 0.5, max: 1.0, steps: 4 }, &no_workers).is_err());
}

#[test]
fn ground_state_decay_fits_avoid_the_gap_between_bands() {
    let cases = [
        (lin_ni(), GridSpec::GeometricZoom { center: 2.0, offset: 0.5, ratio: 0.85, count: 60 }),
        (ProblemSpec::pure_power(3, 7.0).unwrap(), GridSpec::Log { min: 0.5, max: 1e3, steps: 60 }),
    ];
    let mut found = 0;
    for (spec, grid) in cases {
        let opts = SweepOptions::for_spec(&spec);
        let shots = supercrit::bifurcation::shoot_grid(&spec, &grid.points().unwrap(), &opts).unwrap();
        let (slow, fast) = supercrit::shooting::decay_references(&spec);
        let band = supercrit::shooting::DECAY_BAND;
        let (gap_lo, gap_hi) = if slow < fast {
            (slow * (1.0 + band), fast * (1.0 - band))
        } else {
            (fast * (1.0 + band), slow * (1.0 - band))
        };
        for s in shots.iter().filter(|s| s.is_ground_state()) {
            found += 1;
            let e = s.diagnostics.decay_exponent.expect("decay fit");
            assert!(!(e > gap_lo && e < gap_hi), "u0={} decay {e} lies between the bands", s.u0);
        }
    }
    assert!(found >= 100, "only {found} ground states");
}

#[test]
fn documented_zoom_schedule_separates_two_curves_below_two() {
    let spec = lin_ni();
    let d = run(&spec, GridSpec::GeometricZoom { center: 2.0, offset: 0.5, ratio: 0.5, count: 12 });
    assert_structure(&d);
    let below: Vec<f64> = d.separators.iter().copied().filter(|s| *s < 2.0).collect();
    assert!(below.len() >= 2, "{below:?}");
    assert!((below[0] - 1.54).abs() < 0.05);
    assert!(below[1] > below[0] && below[1] < 2.0);
}

#[test]
fn upper_sweep_estimates_the_asymptote() {
    let spec = lin_ni();
    let d = run(&spec, GridSpec::Log { min: 2.05, max: 1e4, steps: 400 });
    assert_structure(&d);
    let est = d.asymptote_estimate.unwrap();
    assert!((est.ln() - 11.44).abs() < 0.05, "ln estimate {}", est.ln());
    let below_min = 0.5 * d.top_curve().unwrap().iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
    assert_eq!(supercrit::count_asymptote_crossings(&d, below_min, 0.0), 0);
}
