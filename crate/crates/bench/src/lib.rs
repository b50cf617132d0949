//! Fixtures shared by the benchmarks.

use supercrit::{GridSpec, ProblemSpec, ShotParams, SweepOptions};

/// `u'' + 2/r u' + u^4 + u^7 = 0`, the Lin-Ni pair in three dimensions.
pub fn lin_ni() -> ProblemSpec {
    ProblemSpec::power_sum(3, 4.0, 7.0).expect("valid problem")
}

pub fn shot_params(spec: &ProblemSpec) -> ShotParams {
    ShotParams::for_spec(spec)
}

/// Initial values on the first three solution curves and on the top curve.
pub const SHOT_U0: [(&str, f64); 4] = [("first_curve", 1.0), ("second_curve", 1.7), ("third_curve", 1.9), ("top_curve", 100.0)];

pub fn first_curve_grid(steps: usize) -> GridSpec {
    GridSpec::Linear { min: 0.01, max: 1.5, steps }
}

pub fn single_worker(spec: &ProblemSpec) -> SweepOptions {
    SweepOptions { workers: 1, ..SweepOptions::for_spec(spec) }
}
