//! Dormand-Prince 5(4) with FSAL, Shampine's 4th-order continuous extension
//! and zero-crossing detection on the first state component.
//!
//! All coefficients are rationals, so the tableau is exact in any precision.

use serde::{Deserialize, Serialize};

use crate::real::Real;

type Ratio = (i64, i64);

const C: [Ratio; 7] = [(0, 1), (1, 5), (3, 10), (4, 5), (8, 9), (1, 1), (1, 1)];

const A: [&[Ratio]; 7] = [
    &[],
    &[(1, 5)],
    &[(3, 40), (9, 40)],
    &[(44, 45), (-56, 15), (32, 9)],
    &[(19372, 6561), (-25360, 2187), (64448, 6561), (-212, 729)],
    &[(9017, 3168), (-355, 33), (46732, 5247), (49, 176), (-5103, 18656)],
    &[(35, 384), (0, 1), (500, 1113), (125, 192), (-2187, 6784), (11, 84)],
];

// 5th-order weights minus the embedded 4th-order ones
const E: [Ratio; 7] = [
    (71, 57600),
    (0, 1),
    (-71, 16695),
    (71, 1920),
    (-17253, 339200),
    (22, 525),
    (-1, 40),
];

const D: [Ratio; 7] = [
    (-12715105075, 11282082432),
    (0, 1),
    (87487479700, 32700410799),
    (-10690763975, 1880347072),
    (701980252875, 199316789632),
    (-1453857185, 822651844),
    (69997945, 29380423),
];

pub(crate) type State<T> = [T; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceReason {
    StepSizeUnderflow,
    NonFiniteState,
    BlowUp,
    /// `u' > 0` while `u > 0` for a positive nonlinearity.
    MonotonicityViolation,
    StepLimit,
}

impl DivergenceReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DivergenceReason::StepSizeUnderflow => "step size underflow",
            DivergenceReason::NonFiniteState => "non-finite state",
            DivergenceReason::BlowUp => "solution blew up",
            DivergenceReason::MonotonicityViolation => "u' became positive while u > 0",
            DivergenceReason::StepLimit => "step limit exceeded",
        }
    }
}

/// Smallest usable relative tolerance, in units of the working epsilon.
pub(crate) const REL_TOL_FLOOR: f64 = 100.0;

#[derive(Debug, Clone)]
pub(crate) struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Target for `|y0|` at a located zero.
    pub root_tol: f64,
    /// Declare divergence when `|y0|` exceeds this.
    pub blowup: Option<f64>,
    pub require_decreasing: bool,
    pub max_steps: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum Status<T> {
    Root(T),
    ReachedEnd,
    Diverged(DivergenceReason),
}

#[derive(Debug, Clone)]
pub(crate) struct Output<T> {
    pub status: Status<T>,
    pub samples: Vec<(T, State<T>)>,
    pub last: (T, State<T>),
    pub accepted: usize,
    pub rejected: usize,
}

struct Tableau<T> {
    c: Vec<T>,
    a: Vec<Vec<T>>,
    e: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Tableau<T> {
    fn new(ctx: T::Ctx) -> Self {
        let cv = |r: &Ratio| T::from_ratio(r.0, r.1, ctx);
        Self {
            c: C.iter().map(cv).collect(),
            a: A.iter().map(|row| row.iter().map(cv).collect()).collect(),
            e: E.iter().map(cv).collect(),
            d: D.iter().map(cv).collect(),
        }
    }
}

fn combo<T: Real>(y: &State<T>, h: &T, weights: &[T], k: &[State<T>]) -> State<T> {
    let mut out = y.clone();
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = slot.lift(0.0);
        for (w, kj) in weights.iter().zip(k) {
            acc = acc + w.clone() * &kj[i];
        }
        *slot = slot.clone() + h.clone() * acc;
    }
    out
}

/// One Dormand-Prince step; returns all seven stages and the new state.
fn step<T: Real, F>(rhs: &F, tab: &Tableau<T>, x: &T, y: &State<T>, k1: &State<T>, h: &T) -> (Vec<State<T>>, State<T>)
where
    F: Fn(&T, &State<T>) -> State<T>,
{
    let mut k: Vec<State<T>> = Vec::with_capacity(7);
    k.push(k1.clone());
    let mut y_new = y.clone();
    for s in 1..7 {
        let ys = combo(y, h, &tab.a[s], &k);
        let xs = x.clone() + tab.c[s].clone() * h;
        k.push(rhs(&xs, &ys));
        if s == 6 {
            y_new = ys;
        }
    }
    (k, y_new)
}

/// Continuous extension on `[x, x + h]` in Hairer's `contd5` form.
struct Dense<T> {
    x: T,
    h: T,
    coef: [State<T>; 5],
}

impl<T: Real> Dense<T> {
    fn new(tab: &Tableau<T>, x: &T, h: &T, y: &State<T>, y_new: &State<T>, k: &[State<T>]) -> Self {
        let zero = x.lift(0.0);
        let mut coef: [State<T>; 5] = std::array::from_fn(|_| [zero.clone(), zero.clone()]);
        for i in 0..2 {
            let dy = y_new[i].clone() - &y[i];
            let bspl = h.clone() * &k[0][i] - &dy;
            let third = dy.clone() - h.clone() * &k[6][i] - &bspl;
            let mut acc = zero.clone();
            for (dj, kj) in tab.d.iter().zip(k) {
                acc = acc + dj.clone() * &kj[i];
            }
            coef[0][i] = y[i].clone();
            coef[1][i] = dy;
            coef[2][i] = bspl;
            coef[3][i] = third;
            coef[4][i] = h.clone() * acc;
        }
        Self { x: x.clone(), h: h.clone(), coef }
    }

    fn theta(&self, xi: &T) -> T {
        (xi.clone() - &self.x) / &self.h
    }

    fn component(&self, i: usize, th: &T) -> T {
        let th1 = th.lift(1.0) - th;
        let c = &self.coef;
        let inner = c[3][i].clone() + th1.clone() * &c[4][i];
        let inner = c[2][i].clone() + th.clone() * inner;
        let inner = c[1][i].clone() + th1 * inner;
        c[0][i].clone() + th.clone() * inner
    }

    fn eval(&self, xi: &T) -> State<T> {
        let th = self.theta(xi);
        [self.component(0, &th), self.component(1, &th)]
    }
}

fn error_norm<T: Real>(err: &State<T>, y: &State<T>, y_new: &State<T>, opts: &Options) -> f64 {
    let mut sum = 0.0;
    for i in 0..2 {
        let scale = opts.abs_tol + opts.rel_tol * y[i].to_f64().abs().max(y_new[i].to_f64().abs());
        let r = err[i].to_f64() / scale;
        sum += r * r;
    }
    (sum / 2.0).sqrt()
}

fn initial_step<T: Real, F>(rhs: &F, x0: &T, y0: &State<T>, f0: &State<T>, span: f64, opts: &Options) -> f64
where
    F: Fn(&T, &State<T>) -> State<T>,
{
    let scale = |v: &T| opts.abs_tol + opts.rel_tol * v.to_f64().abs();
    let rms = |v: &State<T>| {
        let s: f64 = (0..2).map(|i| (v[i].to_f64() / scale(&y0[i])).powi(2)).sum();
        (s / 2.0).sqrt()
    };
    let d0 = rms(y0);
    let d1 = rms(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span.min(1.0) } else { 0.01 * d0 / d1 };
    h0 = h0.min(1e-2 * span);
    // shrink the probe until the explicit Euler trial stays finite
    let mut d2 = f64::INFINITY;
    for _ in 0..40 {
        let h0t = x0.lift(h0);
        let y1 = [y0[0].clone() + h0t.clone() * &f0[0], y0[1].clone() + h0t.clone() * &f0[1]];
        let f1 = rhs(&(x0.clone() + &h0t), &y1);
        let diff = [f1[0].clone() - &f0[0], f1[1].clone() - &f0[1]];
        d2 = rms(&diff) / h0;
        if d2.is_finite() {
            break;
        }
        h0 *= 1e-2;
    }
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 { (h0 * 1e-3).max(1e-6 * span.min(1.0)) } else { (0.01 / dmax).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x_end`, stopping at the first
/// zero of `y[0]` (approached from above). `grid` must be sorted; points in
/// `[x0, stop]` are reported from the continuous extension.
pub(crate) fn integrate<T: Real, F>(rhs: &F, x0: T, y0: State<T>, x_end: T, grid: &[T], opts: &Options) -> Output<T>
where
    F: Fn(&T, &State<T>) -> State<T>,
{
    let ctx = x0.ctx();
    let tab = Tableau::<T>::new(ctx);
    let eps = T::epsilon(ctx);
    let zero = x0.lift(0.0);
    // Below a few hundred ulps the error estimate is round-off noise and the
    // controller stalls.
    let opts = &Options { rel_tol: opts.rel_tol.max(REL_TOL_FLOOR * eps), ..opts.clone() };

    let mut samples = Vec::new();
    let mut gi = grid.partition_point(|g| *g < x0);
    while gi < grid.len() && grid[gi] == x0 {
        samples.push((x0.clone(), y0.clone()));
        gi += 1;
    }

    let mut x = x0;
    let mut y = y0;
    let mut k1 = rhs(&x, &y);
    let span = (x_end.clone() - &x).to_f64();
    let mut h = x.lift(initial_step(rhs, &x, &y, &k1, span, opts));
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;

    let finish = |status, samples, x: T, y: State<T>, accepted, rejected| Output {
        status,
        samples,
        last: (x, y),
        accepted,
        rejected,
    };

    loop {
        if accepted + rejected >= opts.max_steps {
            return finish(Status::Diverged(DivergenceReason::StepLimit), samples, x, y, accepted, rejected);
        }
        let remaining = x_end.clone() - &x;
        if h > remaining {
            h = remaining;
        }
        let floor = 1e-3 * eps * x.to_f64().abs();
        let x_trial = x.clone() + &h;
        if h.to_f64() <= floor || x_trial == x {
            return finish(Status::Diverged(DivergenceReason::StepSizeUnderflow), samples, x, y, accepted, rejected);
        }

        let (k, y_new) = step(rhs, &tab, &x, &y, &k1, &h);
        let mut err_state = [zero.clone(), zero.clone()];
        for (i, slot) in err_state.iter_mut().enumerate() {
            let mut acc = zero.clone();
            for (ej, kj) in tab.e.iter().zip(&k) {
                acc = acc + ej.clone() * &kj[i];
            }
            *slot = h.clone() * acc;
        }
        let err = error_norm(&err_state, &y, &y_new, opts);

        if !err.is_finite() || err > 1.0 {
            rejected += 1;
            last_rejected = true;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h = h * x.lift(fac);
            continue;
        }

        if !(y_new[0].is_finite() && y_new[1].is_finite()) {
            return finish(Status::Diverged(DivergenceReason::NonFiniteState), samples, x, y, accepted, rejected);
        }
        accepted += 1;
        let x_new = x.clone() + &h;
        let dense = Dense::new(&tab, &x, &h, &y, &y_new, &k);

        if y[0] > zero && y_new[0] <= zero {
            let (root, y_root) = locate_root(rhs, &tab, &dense, &x, &y, &k1, &x_new, &y_new, opts);
            while gi < grid.len() && grid[gi] < root {
                samples.push((grid[gi].clone(), dense.eval(&grid[gi])));
                gi += 1;
            }
            return finish(Status::Root(root.clone()), samples, root, y_root, accepted, rejected);
        }

        while gi < grid.len() && grid[gi] <= x_new {
            samples.push((grid[gi].clone(), dense.eval(&grid[gi])));
            gi += 1;
        }

        if opts.require_decreasing && y_new[0] > zero && y_new[1] > zero {
            return finish(
                Status::Diverged(DivergenceReason::MonotonicityViolation),
                samples,
                x_new,
                y_new,
                accepted,
                rejected,
            );
        }
        if let Some(limit) = opts.blowup {
            if y_new[0].to_f64().abs() > limit {
                return finish(Status::Diverged(DivergenceReason::BlowUp), samples, x_new, y_new, accepted, rejected);
            }
        }

        x = x_new;
        y = y_new;
        k1 = k[6].clone();
        if x >= x_end {
            return finish(Status::ReachedEnd, samples, x, y, accepted, rejected);
        }

        let mut fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = h * x.lift(fac);
    }
}

/// Finds the zero of the continuous extension by safeguarded regula falsi
/// and then polishes it with Newton iterations on direct steps from `x`.
#[allow(clippy::too_many_arguments)]
fn locate_root<T: Real, F>(
    rhs: &F,
    tab: &Tableau<T>,
    dense: &Dense<T>,
    x: &T,
    y: &State<T>,
    k1: &State<T>,
    x_new: &T,
    y_new: &State<T>,
    opts: &Options,
) -> (T, State<T>)
where
    F: Fn(&T, &State<T>) -> State<T>,
{
    let zero = x.lift(0.0);
    if y_new[0] == zero {
        return (x_new.clone(), y_new.clone());
    }
    let eps = T::epsilon(x.ctx());
    let mut lo = zero.clone();
    let mut hi = x.lift(1.0);
    let mut f_lo = y[0].clone();
    let mut f_hi = y_new[0].clone();
    let mut side = 0i8;
    let mut th = hi.clone();
    for _ in 0..200 {
        th = (lo.clone() * &f_hi - hi.clone() * &f_lo) / (f_hi.clone() - &f_lo);
        if !(th > lo && th < hi) {
            th = (lo.clone() + &hi) * lo.lift(0.5);
        }
        let f = dense.component(0, &th);
        if f == zero {
            break;
        }
        if f > zero {
            lo = th.clone();
            f_lo = f;
            if side == 1 {
                f_hi = f_hi * lo.lift(0.5);
            }
            side = 1;
        } else {
            hi = th.clone();
            f_hi = f;
            if side == -1 {
                f_lo = f_lo * lo.lift(0.5);
            }
            side = -1;
        }
        if (hi.clone() - &lo).to_f64() <= 4.0 * eps {
            break;
        }
    }

    let h_full = x_new.clone() - x;
    let mut root = x.clone() + th * &h_full;
    let mut state = dense.eval(&root);
    for _ in 0..4 {
        let hs = root.clone() - x;
        if hs <= zero {
            break;
        }
        let (_, ys) = step(rhs, tab, x, y, k1, &hs);
        state = ys;
        if state[0].to_f64().abs() <= opts.root_tol * 1e-3 || state[1] == zero {
            break;
        }
        let next = root.clone() - state[0].clone() / &state[1];
        if next <= *x || next > *x_new {
            break;
        }
        root = next;
    }
    (root, state)
}
