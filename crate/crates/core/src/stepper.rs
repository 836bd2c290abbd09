//! Explicit adaptive Runge-Kutta integration with cubic Hermite dense output
//! and bisection-based zero-crossing localization.
//!
//! The pair is Dormand-Prince 5(4), advanced with the 5th-order solution.
//! Errors are measured componentwise against `abs_tol + rel_tol * |y|`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("right-hand side produced a non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size {h:e} underflowed at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("no sign change of `{label}` on [{t_lo}, {t_hi}]")]
pub struct NoCrossing {
    pub label: &'static str,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// A first-order system `y' = rhs(t, y)` of fixed dimension.
pub trait OdeSystem {
    type Error: From<StepError>;

    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), Self::Error>;

    /// Whether an error raised inside a trial stage should reject the step
    /// and retry with a smaller one instead of aborting.
    fn is_recoverable(&self, _err: &Self::Error) -> bool {
        false
    }
}

/// Closure-backed system, mostly for tests and small drivers.
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    type Error = StepError;

    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), StepError> {
        (self.f)(t, y, dy);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            max_step: f64::INFINITY,
        }
    }
}

/// Cubic Hermite interpolant over one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOutput {
    pub t0: f64,
    pub t1: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
}

impl DenseOutput {
    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        if t == self.t0 {
            out.copy_from_slice(&self.y0);
            return;
        }
        if t == self.t1 {
            out.copy_from_slice(&self.y1);
            return;
        }
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        for (i, o) in out.iter_mut().enumerate() {
            *o = h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub t_new: f64,
    pub y_new: Vec<f64>,
    /// Normalized error: at most 1 for an accepted step.
    pub error_estimate: f64,
    pub h_next: f64,
    pub dense: DenseOutput,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Accepted(StepResult),
    Rejected { h_retry: f64, error_estimate: f64 },
}

// Dormand-Prince 5(4)
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn eval_rhs<S: OdeSystem>(sys: &S, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), S::Error> {
    sys.rhs(t, y, dy)?;
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(StepError::NonFinite { t }.into());
    }
    Ok(())
}

/// Derivative at `(t, y)` with the finiteness check applied.
pub fn derivative<S: OdeSystem>(sys: &S, t: f64, y: &[f64]) -> Result<Vec<f64>, S::Error> {
    let mut dy = vec![0.0; y.len()];
    eval_rhs(sys, t, y, &mut dy)?;
    Ok(dy)
}

fn check_step(t: f64, h: f64) -> Result<(), StepError> {
    if !(h > 0.0) || h < 1e3 * f64::EPSILON * t.abs() {
        return Err(StepError::StepUnderflow { t, h });
    }
    Ok(())
}

/// Attempts one step of size `h` from `(t, y)`.
pub fn try_step<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[f64],
    h: f64,
    opts: &StepOptions,
) -> Result<StepOutcome, S::Error> {
    let f0 = derivative(sys, t, y)?;
    try_step_with_derivative(sys, t, y, &f0, h, opts)
}

/// Like [`try_step`] with the derivative at the start point supplied, which
/// lets drivers reuse the last stage of the previous step.
pub fn try_step_with_derivative<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    h: f64,
    opts: &StepOptions,
) -> Result<StepOutcome, S::Error> {
    check_step(t, h)?;
    let n = y.len();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(StepError::NonFinite { t }.into());
    }
    let k1 = f0;
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    for i in 0..n {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    eval_rhs(sys, t + C2 * h, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    eval_rhs(sys, t + C3 * h, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    eval_rhs(sys, t + C4 * h, &tmp, &mut k4)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    eval_rhs(sys, t + C5 * h, &tmp, &mut k5)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    eval_rhs(sys, t + h, &tmp, &mut k6)?;
    let mut y_new = vec![0.0; n];
    for i in 0..n {
        y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
    }
    let t_new = t + h;
    eval_rhs(sys, t_new, &y_new, &mut k7)?;

    let mut err: f64 = 0.0;
    for i in 0..n {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        err = err.max(e.abs() / sc);
    }
    if !err.is_finite() {
        return Err(StepError::NonFinite { t }.into());
    }

    if err > 1.0 {
        let factor = (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
        return Ok(StepOutcome::Rejected {
            h_retry: h * factor,
            error_estimate: err,
        });
    }
    let factor = if err == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
    };
    let h_next = (h * factor).min(opts.max_step);
    Ok(StepOutcome::Accepted(StepResult {
        t_new,
        y_new: y_new.clone(),
        error_estimate: err,
        h_next,
        dense: DenseOutput {
            t0: t,
            t1: t_new,
            y0: y.to_vec(),
            y1: y_new,
            f0: f0.to_vec(),
            f1: k7,
        },
    }))
}

/// Step-size factor applied after a recoverable stage failure.
const STAGE_FAILURE_SHRINK: f64 = 0.25;

/// Retries until a step is accepted. `h` is clipped to `max_step` and to the
/// remaining distance to `t_stop`. Recoverable right-hand-side failures in
/// trial stages shrink the step; they are returned once it underflows.
pub fn step_until_accepted<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    mut h: f64,
    t_stop: f64,
    opts: &StepOptions,
) -> Result<StepResult, S::Error> {
    loop {
        h = h.min(opts.max_step);
        let remaining = t_stop - t;
        // land exactly on t_stop rather than leave a sliver
        if h >= remaining || remaining - h < 1e-12 * t_stop.abs().max(1.0) {
            h = remaining;
        }
        let outcome = match try_step_with_derivative(sys, t, y, f0, h, opts) {
            Ok(o) => o,
            Err(e) if sys.is_recoverable(&e) => {
                h *= STAGE_FAILURE_SHRINK;
                if check_step(t, h).is_err() {
                    return Err(e);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        match outcome {
            StepOutcome::Accepted(mut r) => {
                if h == remaining {
                    r.t_new = t_stop;
                    r.dense.t1 = t_stop;
                }
                return Ok(r);
            }
            StepOutcome::Rejected { h_retry, .. } => h = h_retry,
        }
    }
}

/// Starting step guess from the scaled sizes of `y0` and `f0`.
pub fn initial_step(y0: &[f64], f0: &[f64], opts: &StepOptions) -> f64 {
    let norm = |v: &[f64]| {
        v.iter()
            .zip(y0)
            .map(|(a, y)| a.abs() / (opts.abs_tol + opts.rel_tol * y.abs()))
            .fold(0.0, f64::max)
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(opts.max_step)
}

/// Integrates from `t0` to `t_end`, reporting the solution at each of the
/// sorted `samples` inside `[t0, t_end]`. Returns the final state.
pub fn integrate<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &StepOptions,
    samples: &[f64],
    mut on_sample: impl FnMut(f64, &[f64]) -> Result<(), S::Error>,
) -> Result<Vec<f64>, S::Error> {
    assert_eq!(y0.len(), sys.dim());
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = derivative(sys, t, &y)?;
    let mut h = initial_step(&y, &f, opts);
    let mut next = samples.partition_point(|&s| s < t0);
    let mut buf = vec![0.0; y.len()];
    while t < t_end {
        let r = step_until_accepted(sys, t, &y, &f, h, t_end, opts)?;
        while next < samples.len() && samples[next] < r.t_new && samples[next] <= t_end {
            r.dense.eval_into(samples[next], &mut buf);
            on_sample(samples[next], &buf)?;
            next += 1;
        }
        t = r.t_new;
        h = r.h_next;
        f = r.dense.f1;
        y = r.y_new;
    }
    while next < samples.len() && samples[next] <= t_end {
        on_sample(samples[next], &y)?;
        next += 1;
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

/// Scalar trigger `g(t, y)`; the event fires where `g` crosses zero in
/// `direction`.
pub struct EventFn<'a> {
    pub g: Box<dyn Fn(f64, &[f64]) -> f64 + 'a>,
    pub direction: Direction,
    pub label: &'static str,
}

impl<'a> EventFn<'a> {
    pub fn new(
        label: &'static str,
        direction: Direction,
        g: impl Fn(f64, &[f64]) -> f64 + 'a,
    ) -> Self {
        Self {
            g: Box::new(g),
            direction,
            label,
        }
    }
}

/// Whether `g` has passed zero relative to a starting value `g_start`.
fn crossed(direction: Direction, g_start: f64, g: f64) -> bool {
    match direction {
        Direction::Rising => g >= 0.0,
        Direction::Falling => g <= 0.0,
        Direction::Any => {
            if g_start < 0.0 {
                g >= 0.0
            } else {
                g <= 0.0
            }
        }
    }
}

/// True if `g_lo -> g_hi` is a zero crossing in `direction`.
pub fn is_crossing(direction: Direction, g_lo: f64, g_hi: f64) -> bool {
    match direction {
        Direction::Rising => g_lo < 0.0 && g_hi >= 0.0,
        Direction::Falling => g_lo > 0.0 && g_hi <= 0.0,
        Direction::Any => (g_lo < 0.0 && g_hi >= 0.0) || (g_lo > 0.0 && g_hi <= 0.0),
    }
}

/// Number of probe points used to isolate the first crossing before bisecting.
const SCAN_PIECES: usize = 8;

/// Localizes the first zero crossing of `ev` on `[t_lo, t_hi]`, evaluated on
/// the dense output. The returned time is the upper end of a bracket no wider
/// than `event_tol`, so the event condition holds there.
pub fn locate_event(
    ev: &EventFn,
    t_lo: f64,
    t_hi: f64,
    dense: &DenseOutput,
    event_tol: f64,
) -> Result<f64, NoCrossing> {
    let mut y = vec![0.0; dense.dim()];
    let mut g_at = |t: f64| {
        dense.eval_into(t, &mut y);
        (ev.g)(t, &y)
    };
    let g_lo = g_at(t_lo);
    let g_hi = g_at(t_hi);
    let none = NoCrossing {
        label: ev.label,
        t_lo,
        t_hi,
    };
    if ev.direction == Direction::Any && g_lo == 0.0 {
        return Ok(t_lo);
    }
    if !is_crossing(ev.direction, g_lo, g_hi) {
        return Err(none);
    }
    locate_crossing(g_at, ev.direction, g_lo, t_lo, t_hi, event_tol)
}

/// Bracketing search on a scalar function of time; `g_lo = g(lo)` is known
/// not to satisfy the crossed condition while `g(hi)` does.
pub fn locate_crossing(
    mut g: impl FnMut(f64) -> f64,
    direction: Direction,
    g_lo: f64,
    mut lo: f64,
    mut hi: f64,
    event_tol: f64,
) -> Result<f64, NoCrossing> {
    // isolate the first sub-interval in which the crossing happens
    let width = hi - lo;
    let start = lo;
    for k in 1..SCAN_PIECES {
        let tk = start + width * k as f64 / SCAN_PIECES as f64;
        if crossed(direction, g_lo, g(tk)) {
            hi = tk;
            break;
        }
        lo = tk;
    }
    while hi - lo > event_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if crossed(direction, g_lo, g(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
