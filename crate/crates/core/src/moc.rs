//! Event-driven method of characteristics.
//!
//! A pool of characteristics `(xi_i, w_i)` is integrated as one ODE system in
//! which the full state is replaced by its interpolant over the grid
//! `(0, u(t)), (xi_1, w_1), .., (xi_N, w_N)`. Zero crossings of three trigger
//! functions reset the pool:
//!
//! * removal: the second-oldest characteristic passes `x = ell`, so the
//!   oldest one is no longer needed to cover the domain;
//! * creation: the newest characteristic is `dx` away from the boundary, its
//!   value is `dw` away from the input, or `dt` has elapsed since the last
//!   creation; a new characteristic `(0, u(t))` is prepended;
//! * shock: two neighbours overlap by more than `crossing_tol`, which ends
//!   the simulation.
//!
//! Triggers that fire within `event_tol` of each other are applied at one
//! instant in the order shock, removal, creation.

use std::cell::Cell;

use thiserror::Error;

use crate::params::{ParamError, SolverParams};
use crate::pool::{CharacteristicPool, PoolError};
use crate::problem::ProblemDef;
use crate::state::{InterpScheme, StateView};
use crate::stepper::{
    self, derivative, is_crossing, locate_crossing, Direction, OdeSystem, StepError, StepOptions,
};
use crate::trajectory::{CreationCause, EventKind, Snapshot, SolveEvent, Trajectory};

/// Velocities below this are treated as a violation of `v > 0`.
pub const MIN_VELOCITY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("characteristics {index} and {} crossed at t = {t}: shock wave, method of characteristics not physically sound", index + 1)]
    Shock { t: f64, index: usize },
    #[error("characteristic pool overflow at t = {t} (capacity {capacity})")]
    Overflow { t: f64, capacity: usize },
    #[error("velocity {v} is not positive at t = {t}, x = {x}")]
    VelocityNotPositive { t: f64, x: f64, v: f64 },
    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size {h:e} underflowed at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("removal would leave fewer than two characteristics at t = {t}")]
    Underflow { t: f64 },
    #[error("initial profile needs {needed} characteristics, capacity is {capacity}")]
    CapacityExceeded { needed: usize, capacity: usize },
    #[error("initial profile invalid: {0}")]
    ProfileInvalid(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

impl From<StepError> for SolveError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::NonFinite { t } => SolveError::NonFinite { t },
            StepError::StepUnderflow { t, h } => SolveError::StepUnderflow { t, h },
        }
    }
}

/// Inputs of the a-priori accuracy estimate for pointwise problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundInputs {
    /// Upper bound on the domain transit time (`v >= ell / t_hat`).
    pub t_hat: f64,
    /// Joint Lipschitz constant of `(v, f)` in `(x, w)`.
    pub f_hat: f64,
    pub dx: f64,
    pub dw: f64,
    pub dt: f64,
}

/// `(node_bound, state_bound)`: the distance of any point of the exact
/// solution to the next grid node, and the pointwise error of the linear or
/// nearest interpolant. The integration is assumed exact.
pub fn error_bound(inputs: &ErrorBoundInputs) -> (f64, f64) {
    let growth = ((inputs.t_hat + inputs.dt) * inputs.f_hat).exp();
    let node = growth * inputs.dx.hypot(inputs.dw);
    (node, 2.0 * node)
}

/// Initial characteristics approximating the initial profile.
///
/// Every knot becomes a node; each inter-knot interval is split uniformly
/// until every span is at most `dx` long and the profile changes by at most
/// `dw` across it. Coincident knots become coincident characteristic pairs.
pub fn init_pool(
    problem: &ProblemDef,
    params: &SolverParams,
) -> Result<CharacteristicPool, SolveError> {
    let nodes = initial_nodes(problem.initial_profile().knots(), params.dx, params.dw);
    if nodes.len() > params.n_max {
        return Err(SolveError::CapacityExceeded {
            needed: nodes.len(),
            capacity: params.n_max,
        });
    }
    if nodes.len() < 2 {
        return Err(SolveError::ProfileInvalid("fewer than two nodes".into()));
    }
    let mut pool = CharacteristicPool::from_nodes(params.n_max, &nodes)
        .expect("node count checked against capacity");
    pool.set_t_lc(0.0);
    Ok(pool)
}

fn initial_nodes(knots: &[(f64, f64)], dx: f64, dw: f64) -> Vec<(f64, f64)> {
    // ceil that tolerates ratios a hair above an integer
    let pieces = |r: f64| ((r - 1e-9).ceil().max(1.0)) as usize;
    let mut nodes = vec![knots[0]];
    for pair in knots.windows(2) {
        let (xl, wl) = pair[0];
        let (xr, wr) = pair[1];
        let len = xr - xl;
        if len > 0.0 {
            let m = pieces(len / dx).max(pieces((wr - wl).abs() / dw));
            for j in 1..m {
                let s = j as f64 / m as f64;
                nodes.push((xl + s * len, wl + s * (wr - wl)));
            }
        }
        nodes.push((xr, wr));
    }
    nodes
}

/// Margin of the removal trigger: `xi_{N-1} - ell` for the second-oldest
/// characteristic. Removal fires when it rises through zero.
pub fn removal_margin(pool: &CharacteristicPool, ell: f64) -> f64 {
    let n = pool.len();
    assert!(n >= 2);
    pool.get(n - 2).unwrap().0 - ell
}

fn removal_margin_flat(xi: &[f64], ell: f64) -> f64 {
    xi[xi.len() - 2] - ell
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreationMargins {
    pub x: f64,
    pub w: f64,
    pub t: f64,
}

impl CreationMargins {
    /// Largest margin; creation fires when it rises through zero.
    pub fn max(&self) -> f64 {
        self.x.max(self.w).max(self.t)
    }

    /// The first satisfied condition in the order x, w, t.
    pub fn cause(&self) -> Option<CreationCause> {
        if self.x >= 0.0 {
            Some(CreationCause::XGap)
        } else if self.w >= 0.0 {
            Some(CreationCause::WGap)
        } else if self.t >= 0.0 {
            Some(CreationCause::Timeout)
        } else {
            None
        }
    }
}

fn creation_margins_raw(
    t: f64,
    xi_newest: f64,
    w_newest: f64,
    u: f64,
    t_lc: f64,
    params: &SolverParams,
) -> CreationMargins {
    CreationMargins {
        x: xi_newest - params.dx,
        w: (w_newest - u).abs() - params.dw,
        t: (t - t_lc) - params.dt,
    }
}

/// Margins of the three creation triggers for input value `u`.
pub fn creation_margins(
    t: f64,
    pool: &CharacteristicPool,
    u: f64,
    params: &SolverParams,
) -> CreationMargins {
    let (xi, w) = pool.get(0).expect("pool is not empty");
    creation_margins_raw(t, xi, w, u, pool.t_lc(), params)
}

/// Smallest neighbour gap plus `crossing_tol`, with the index of the newer
/// characteristic of the closest pair. A shock fires when it falls to zero.
pub fn shock_margin(pool: &CharacteristicPool, crossing_tol: f64) -> (f64, usize) {
    let xi: Vec<f64> = pool.iter().map(|(x, _)| x).collect();
    shock_margin_flat(&xi, crossing_tol)
}

fn shock_margin_flat(xi: &[f64], crossing_tol: f64) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, pair) in xi.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap < best.0 {
            best = (gap, i);
        }
    }
    (best.0 + crossing_tol, best.1)
}

/// Boundary input evaluated on the node-only view of a flattened pool.
fn input_value(problem: &ProblemDef, scheme: InterpScheme, t: f64, xi: &[f64], w: &[f64]) -> f64 {
    let view = StateView::new(None, xi, w, scheme, problem.ell());
    problem.boundary_input(t, &view)
}

/// The characteristic ODEs over a flattened pool `[xi_1..xi_N, w_1..w_N]`.
pub struct PoolSystem<'a> {
    problem: &'a ProblemDef,
    scheme: InterpScheme,
    n: usize,
    max_velocity: Cell<f64>,
}

impl<'a> PoolSystem<'a> {
    pub fn new(problem: &'a ProblemDef, scheme: InterpScheme, n: usize) -> Self {
        Self {
            problem,
            scheme,
            n,
            max_velocity: Cell::new(0.0),
        }
    }

    /// Largest velocity seen by any right-hand-side evaluation.
    pub fn max_velocity(&self) -> f64 {
        self.max_velocity.get()
    }
}

impl OdeSystem for PoolSystem<'_> {
    type Error = SolveError;

    fn dim(&self) -> usize {
        2 * self.n
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), SolveError> {
        let n = self.n;
        let (xi, w) = y.split_at(n);
        let ell = self.problem.ell();
        let u = input_value(self.problem, self.scheme, t, xi, w);
        if !u.is_finite() {
            return Err(SolveError::NonFinite { t });
        }
        let view = StateView::new(Some(u), xi, w, self.scheme, ell);
        let (dxi, dw) = dy.split_at_mut(n);
        let mut vmax = self.max_velocity.get();
        for i in 0..n {
            let v = self.problem.velocity(t, xi[i], w[i], &view);
            if v.is_nan() || v < MIN_VELOCITY {
                return Err(SolveError::VelocityNotPositive { t, x: xi[i], v });
            }
            vmax = vmax.max(v);
            dxi[i] = v;
            dw[i] = self.problem.source(t, xi[i], w[i], &view);
        }
        self.max_velocity.set(vmax);
        Ok(())
    }

    // Trial stages of a long step can run characteristics past several
    // creation and removal instants; a bad velocity there is an overshoot.
    fn is_recoverable(&self, err: &SolveError) -> bool {
        matches!(err, SolveError::VelocityNotPositive { .. })
    }
}

/// Time derivatives `(dxi_i/dt, dw_i/dt)` of every characteristic in `pool`.
pub fn pool_rhs(
    t: f64,
    pool: &CharacteristicPool,
    problem: &ProblemDef,
    scheme: InterpScheme,
) -> Result<Vec<(f64, f64)>, SolveError> {
    let n = pool.len();
    let mut y = vec![0.0; 2 * n];
    pool.flatten_into(&mut y);
    let sys = PoolSystem::new(problem, scheme, n);
    let dy = derivative(&sys, t, &y)?;
    Ok((0..n).map(|i| (dy[i], dy[n + i])).collect())
}

/// Outcome of a creation request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CreationOutcome {
    Created,
    /// Pool was full and overflow is not terminating; nothing was created.
    Skipped,
}

/// Prepends `(0, u)` and resets the creation clock, or reports overflow.
pub fn apply_creation(
    t: f64,
    pool: &mut CharacteristicPool,
    u: f64,
    params: &SolverParams,
) -> Result<CreationOutcome, SolveError> {
    if pool.is_full() {
        if params.terminate_on_overflow {
            return Err(SolveError::Overflow {
                t,
                capacity: pool.capacity(),
            });
        }
        return Ok(CreationOutcome::Skipped);
    }
    pool.push_front(0.0, u).expect("capacity checked");
    pool.set_t_lc(t);
    Ok(CreationOutcome::Created)
}

/// Drops the oldest characteristic.
pub fn apply_removal(pool: &mut CharacteristicPool) -> Result<(), PoolError> {
    pool.pop_back().map(|_| ())
}

/// Ordering of simultaneous triggers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Trigger {
    Shock,
    Removal,
    Creation,
}

/// The characteristics solver, advancing one hybrid time loop.
pub struct MocSolver {
    problem: ProblemDef,
    params: SolverParams,
    pool: CharacteristicPool,
    t: f64,
    h: f64,
    started: bool,
    record_snapshots: bool,
    max_velocity: f64,
    trajectory: Trajectory,
}

impl MocSolver {
    pub fn new(problem: ProblemDef, params: SolverParams) -> Result<Self, SolveError> {
        params.validate(problem.ell())?;
        let pool = init_pool(&problem, &params)?;
        Ok(Self {
            problem,
            params,
            pool,
            t: 0.0,
            h: 0.0,
            started: false,
            record_snapshots: false,
            max_velocity: 0.0,
            trajectory: Trajectory::default(),
        })
    }

    pub fn record_snapshots(mut self, on: bool) -> Self {
        self.record_snapshots = on;
        self
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn pool(&self) -> &CharacteristicPool {
        &self.pool
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn problem(&self) -> &ProblemDef {
        &self.problem
    }

    pub fn events(&self) -> &[SolveEvent] {
        &self.trajectory.events
    }

    /// Largest characteristic velocity evaluated so far.
    pub fn max_velocity(&self) -> f64 {
        self.max_velocity
    }

    /// Output recorded so far; on error it holds everything up to the failure.
    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn into_trajectory(self) -> Trajectory {
        self.trajectory
    }

    fn step_options(&self) -> StepOptions {
        StepOptions {
            abs_tol: self.params.abs_tol,
            rel_tol: self.params.rel_tol,
            max_step: self.params.max_step,
        }
    }

    /// Current interpolant as a snapshot grid.
    pub fn state_grid(&self) -> Vec<(f64, f64)> {
        let n = self.pool.len();
        let mut y = vec![0.0; 2 * n];
        self.pool.flatten_into(&mut y);
        self.grid_of(self.t, &y)
    }

    fn grid_of(&self, t: f64, y: &[f64]) -> Vec<(f64, f64)> {
        let (xi, w) = y.split_at(y.len() / 2);
        let u = input_value(&self.problem, self.params.interp, t, xi, w);
        StateView::new(Some(u), xi, w, self.params.interp, self.problem.ell()).grid()
    }

    fn record_sample(&mut self, t: f64, y: &[f64]) {
        let (xi, w) = y.split_at(y.len() / 2);
        let scheme = self.params.interp;
        let ell = self.problem.ell();
        let u = input_value(&self.problem, scheme, t, xi, w);
        let view = StateView::new(Some(u), xi, w, scheme, ell);
        self.trajectory.sample_times.push(t);
        self.trajectory.outputs.push(view.eval(ell));
        self.trajectory.n_history.push(xi.len());
        if self.record_snapshots {
            self.trajectory.snapshots.push(Snapshot { t, points: view.grid() });
        }
    }

    fn log(&mut self, kind: EventKind) {
        self.trajectory.events.push(SolveEvent {
            time: self.t,
            kind,
            pool_count_after: self.pool.len(),
        });
    }

    /// Applies every trigger whose condition holds at the current instant.
    /// `u_left` is the input just before the instant, if known.
    fn process_instant(&mut self, u_left: Option<f64>) -> Result<(), SolveError> {
        let t = self.t;
        let ell = self.problem.ell();
        let (margin, index) = shock_margin(&self.pool, self.params.crossing_tol);
        if margin <= 0.0 {
            self.log(EventKind::Shock { index });
            return Err(SolveError::Shock { t, index });
        }
        while removal_margin(&self.pool, ell) >= 0.0 {
            if apply_removal(&mut self.pool).is_err() {
                return Err(SolveError::Underflow { t });
            }
            self.log(EventKind::Removal);
        }

        let n = self.pool.len();
        let mut y = vec![0.0; 2 * n];
        self.pool.flatten_into(&mut y);
        let (xi, w) = y.split_at(n);
        let u = input_value(&self.problem, self.params.interp, t, xi, w);
        if !u.is_finite() {
            return Err(SolveError::NonFinite { t });
        }
        let margins = creation_margins(t, &self.pool, u, &self.params);
        let Some(cause) = margins.cause() else {
            return Ok(());
        };
        let jump = u_left.filter(|ul| {
            self.params.capture_input_jumps
                && cause == CreationCause::WGap
                && (u - ul).abs() > self.params.dw
                && self.pool.len() + 2 <= self.pool.capacity()
        });
        if let Some(ul) = jump {
            apply_creation(t, &mut self.pool, ul, &self.params)?;
            self.log(EventKind::Creation(CreationCause::WGap));
        }
        match apply_creation(t, &mut self.pool, u, &self.params) {
            Ok(CreationOutcome::Created) => self.log(EventKind::Creation(cause)),
            Ok(CreationOutcome::Skipped) => self.log(EventKind::Overflow),
            Err(e) => {
                self.log(EventKind::Overflow);
                return Err(e);
            }
        }
        Ok(())
    }

    /// Earliest trigger crossing inside an accepted step, as the instant at
    /// which to apply resets. Crossings within `event_tol` of the earliest
    /// are merged by moving the instant to the latest of them.
    fn find_event(&self, dense: &stepper::DenseOutput) -> Option<f64> {
        let n = dense.dim() / 2;
        let ell = self.problem.ell();
        let params = &self.params;
        let t_lc = self.pool.t_lc();
        let scheme = params.interp;
        let problem = &self.problem;
        let mut buf = vec![0.0; 2 * n];

        let mut g = |trigger: Trigger, t: f64| -> f64 {
            dense.eval_into(t, &mut buf);
            let (xi, w) = buf.split_at(n);
            match trigger {
                Trigger::Shock => shock_margin_flat(xi, params.crossing_tol).0,
                Trigger::Removal => removal_margin_flat(xi, ell),
                Trigger::Creation => {
                    let u = input_value(problem, scheme, t, xi, w);
                    creation_margins_raw(t, xi[0], w[0], u, t_lc, params).max()
                }
            }
        };

        let mut hits: Vec<(f64, Trigger)> = Vec::new();
        for (trigger, direction) in [
            (Trigger::Shock, Direction::Falling),
            (Trigger::Removal, Direction::Rising),
            (Trigger::Creation, Direction::Rising),
        ] {
            let g0 = g(trigger, dense.t0);
            let g1 = g(trigger, dense.t1);
            if !is_crossing(direction, g0, g1) {
                continue;
            }
            if let Ok(te) = locate_crossing(
                |t| g(trigger, t),
                direction,
                g0,
                dense.t0,
                dense.t1,
                params.event_tol,
            ) {
                hits.push((te, trigger));
            }
        }
        let earliest = hits.iter().map(|h| h.0).fold(f64::INFINITY, f64::min);
        if !earliest.is_finite() {
            return None;
        }
        hits.iter()
            .filter(|h| h.0 <= earliest + params.event_tol)
            .map(|h| h.0)
            .reduce(f64::max)
    }

    /// Advances to `t_end`, recording `y(t)` at every sample time in
    /// `[time(), t_end]` (the list must be sorted).
    pub fn run(&mut self, t_end: f64, sample_times: &[f64]) -> Result<(), SolveError> {
        if !(t_end.is_finite() && t_end >= self.t) {
            return Err(SolveError::Schedule(format!(
                "t_end = {t_end} must be finite and not before t = {}",
                self.t
            )));
        }
        if sample_times.windows(2).any(|p| p[1] < p[0]) {
            return Err(SolveError::Schedule("sample times must be sorted".into()));
        }
        let mut next = sample_times.partition_point(|&s| s < self.t);
        if !self.started {
            self.started = true;
            self.process_instant(None)?;
        }
        let opts = self.step_options();
        let scheme = self.params.interp;
        let problem = self.problem.clone();

        while self.t < t_end {
            let n = self.pool.len();
            let mut y = vec![0.0; 2 * n];
            self.pool.flatten_into(&mut y);
            let sys = PoolSystem::new(&problem, scheme, n);
            let mut f = derivative(&sys, self.t, &y)?;
            if self.h <= 0.0 {
                self.h = stepper::initial_step(&y, &f, &opts);
            }
            let mut event_at = None;
            let mut dense = None;
            while self.t < t_end {
                let r = stepper::step_until_accepted(&sys, self.t, &y, &f, self.h, t_end, &opts)?;
                let hit = self.find_event(&r.dense);
                let t_stop = hit.unwrap_or(r.t_new);
                let mut buf = vec![0.0; 2 * n];
                while next < sample_times.len() && sample_times[next] < t_stop {
                    r.dense.eval_into(sample_times[next], &mut buf);
                    self.record_sample(sample_times[next], &buf);
                    next += 1;
                }
                self.h = r.h_next;
                if let Some(te) = hit {
                    self.t = te;
                    y = r.dense.eval(te);
                    event_at = Some(te);
                    dense = Some(r.dense);
                    break;
                }
                self.t = r.t_new;
                f = r.dense.f1;
                y = r.y_new;
            }
            self.max_velocity = self.max_velocity.max(sys.max_velocity());
            self.pool.load_flat(&y);
            if let (Some(te), Some(d)) = (event_at, dense) {
                let t_left = (te - self.params.event_tol).max(d.t0);
                let yl = d.eval(t_left);
                let (xi, w) = yl.split_at(n);
                let u_left = input_value(&problem, scheme, t_left, xi, w);
                self.process_instant(Some(u_left))?;
            }
        }
        debug_assert!(self.t >= t_end);
        let n = self.pool.len();
        let mut y = vec![0.0; 2 * n];
        self.pool.flatten_into(&mut y);
        while next < sample_times.len() && sample_times[next] <= t_end {
            self.record_sample(sample_times[next], &y);
            next += 1;
        }
        Ok(())
    }
}

/// Runs the characteristics solver from `t = 0` to `t_end`.
pub fn simulate(
    problem: &ProblemDef,
    params: &SolverParams,
    t_end: f64,
    sample_times: &[f64],
) -> Result<Trajectory, SolveError> {
    let mut solver = MocSolver::new(problem.clone(), params.clone())?;
    solver.run(t_end, sample_times)?;
    Ok(solver.into_trajectory())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::InitialProfile;

    fn transport(profile: InitialProfile) -> ProblemDef {
        ProblemDef::from_fns("t", 1.0, |_, _, _, _| 1.0, |_, _, _, _| 0.0, |_, _| 0.0, profile).unwrap()
    }

    fn params(dx: f64, dw: f64) -> SolverParams {
        SolverParams {
            dx,
            dw,
            ..Default::default()
        }
    }

    #[test]
    fn init_pool_keeps_jump_pair() {
        let prof =
            InitialProfile::new(vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)], 1.0).unwrap();
        let pool = init_pool(&transport(prof), &params(0.5, 1.0)).unwrap();
        assert_eq!(pool.to_nodes(), vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)]);
        assert_eq!(pool.t_lc(), 0.0);
    }

    #[test]
    fn init_pool_refines_sampled_parabola() {
        let prof = InitialProfile::sampled(|x| 1.0 - x * x, 1.0, 20).unwrap();
        let pool = init_pool(&transport(prof), &params(0.25, 0.01)).unwrap();
        let nodes = pool.to_nodes();
        assert_eq!(nodes[0].0, 0.0);
        assert_eq!(nodes.last().unwrap().0, 1.0);
        for pair in nodes.windows(2) {
            assert!(pair[1].0 - pair[0].0 <= 0.25 + 1e-12);
            assert!((pair[1].1 - pair[0].1).abs() <= 0.01 + 1e-12);
        }
        for k in 0..=20 {
            let x = k as f64 * 0.05;
            assert!(nodes.iter().any(|n| (n.0 - x).abs() < 1e-12), "missing knot {x}");
        }
        let mid = nodes.iter().find(|n| (n.0 - 0.5).abs() < 1e-12).unwrap();
        assert!((mid.1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn init_pool_constant_profile() {
        let prof = InitialProfile::new(vec![(0.0, 2.5), (1.0, 2.5)], 1.0).unwrap();
        let pool = init_pool(&transport(prof), &params(0.1, 1e-3)).unwrap();
        assert!(pool.iter().all(|(_, w)| w == 2.5));
        assert_eq!(pool.len(), 11);
    }

    #[test]
    fn init_pool_capacity() {
        let prof = InitialProfile::new(vec![(0.0, 0.0), (1.0, 0.0)], 1.0).unwrap();
        let p = SolverParams {
            n_max: 5,
            ..params(0.1, 0.1)
        };
        assert_eq!(
            init_pool(&transport(prof), &p).unwrap_err(),
            SolveError::CapacityExceeded {
                needed: 11,
                capacity: 5
            }
        );
    }

    #[test]
    fn rhs_of_unit_transport() {
        let prof = InitialProfile::new(vec![(0.0, 0.0), (1.0, 1.0)], 1.0).unwrap();
        let prob = transport(prof);
        let pool = init_pool(&prob, &params(0.25, 1.0)).unwrap();
        let d = pool_rhs(0.0, &pool, &prob, InterpScheme::Linear).unwrap();
        assert!(d.iter().all(|&(v, f)| v == 1.0 && f == 0.0));
    }

    #[test]
    fn rhs_of_simple_example() {
        let prof = InitialProfile::sampled(|x| 1.0 - x * x, 1.0, 10).unwrap();
        let prob = ProblemDef::from_fns(
            "simple",
            1.0,
            |t, x, _, _| x + 1.1 + t.sin(),
            |_, _, w, _| -w,
            |_, _| 1.0,
            prof,
        )
        .unwrap();
        let pool = init_pool(&prob, &params(0.1, 0.1)).unwrap();
        let d = pool_rhs(0.0, &pool, &prob, InterpScheme::Linear).unwrap();
        assert!((d[0].0 - 1.1).abs() < 1e-15);
        for ((_, w), (_, dw)) in pool.iter().zip(&d) {
            assert_eq!(*dw, -w);
        }
    }

    #[test]
    fn rhs_rejects_nonpositive_velocity() {
        let prof = InitialProfile::new(vec![(0.0, 1.0), (1.0, 0.0)], 1.0).unwrap();
        let prob =
            ProblemDef::from_fns("b", 1.0, |_, _, w, _| w, |_, _, _, _| 0.0, |_, _| 1.0, prof).unwrap();
        let pool = init_pool(&prob, &params(0.5, 1.0)).unwrap();
        let err = pool_rhs(0.0, &pool, &prob, InterpScheme::Linear).unwrap_err();
        assert!(matches!(err, SolveError::VelocityNotPositive { x, .. } if x == 1.0));
    }

    #[test]
    fn margins() {
        let p = params(0.1, 0.01);
        let mut pool = CharacteristicPool::from_nodes(8, &[(0.1, 0.5), (0.8, 0.0), (1.2, 0.0)]).unwrap();
        assert!((removal_margin(&pool, 1.0) + 0.2).abs() < 1e-15);
        let m = creation_margins(0.25, &pool, 0.52, &p);
        assert_eq!(m.x, 0.0);
        assert!((m.w - 0.01).abs() < 1e-12);
        assert_eq!(m.cause(), Some(CreationCause::XGap));
        pool.set_t_lc(0.0);
        let m = creation_margins(p.dt / 2.0, &pool, 0.5, &p);
        assert_eq!(m.t, -p.dt / 2.0);

        pool.set(1, 1.0, 0.0);
        assert_eq!(removal_margin(&pool, 1.0), 0.0);
        pool.set(1, 1.3, 0.0);
        pool.set(2, 1.5, 0.0);
        assert!((removal_margin(&pool, 1.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn shock_margins() {
        let pool = CharacteristicPool::from_nodes(8, &[(0.0, 0.0), (0.1, 0.0), (0.3, 0.0)]).unwrap();
        let (m, _) = shock_margin(&pool, 1e-6);
        assert!(m >= 0.1);
        let pair = CharacteristicPool::from_nodes(8, &[(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(shock_margin(&pair, 1e-6), (1e-6, 1));
        let crossed =
            CharacteristicPool::from_nodes(8, &[(0.0, 0.0), (0.5, 0.0), (0.5 - 2e-6, 1.0), (1.0, 1.0)]).unwrap();
        let (m, i) = shock_margin(&crossed, 1e-6);
        assert!(m < 0.0);
        assert_eq!(i, 1);
    }

    #[test]
    fn creation_and_overflow() {
        let p = SolverParams::default();
        let mut pool = CharacteristicPool::from_nodes(3, &[(0.2, 3.0), (1.1, 0.0)]).unwrap();
        assert_eq!(apply_creation(0.7, &mut pool, 7.0, &p), Ok(CreationOutcome::Created));
        assert_eq!(pool.get(0), Some((0.0, 7.0)));
        assert_eq!(pool.get(1), Some((0.2, 3.0)));
        assert_eq!(pool.t_lc(), 0.7);
        assert!(matches!(
            apply_creation(0.8, &mut pool, 1.0, &p),
            Err(SolveError::Overflow { .. })
        ));
        let silent = SolverParams {
            terminate_on_overflow: false,
            ..p
        };
        let before = pool.clone();
        assert_eq!(apply_creation(0.8, &mut pool, 1.0, &silent), Ok(CreationOutcome::Skipped));
        assert_eq!(pool, before);
    }

    #[test]
    fn removal_keeps_two() {
        let mut pool = CharacteristicPool::from_nodes(4, &[(0.0, 0.0), (1.0, 1.0), (1.2, 2.0)]).unwrap();
        apply_removal(&mut pool).unwrap();
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.get(1), Some((1.0, 1.0)));
        assert_eq!(apply_removal(&mut pool), Err(PoolError::Underflow));
    }

    #[test]
    fn bound_arithmetic() {
        let b = |t_hat, f_hat, dt, dx, dw| {
            error_bound(&ErrorBoundInputs { t_hat, f_hat, dx, dw, dt })
        };
        let (node, state) = b(1.0, 0.0, 1.0, 0.3, 0.4);
        assert!((node - 0.5).abs() < 1e-15);
        assert_eq!(state, 2.0 * node);
        assert_eq!(b(1.0, 1.0, 1.0, 0.0, 0.0).0, 0.0);
        // e^2 * 0.1 * sqrt(2)
        assert!((b(1.0, 1.0, 1.0, 0.1, 0.1).0 - 1.0450).abs() < 1e-4);
    }

    #[test]
    fn zero_tolerance_rejects_initial_jump() {
        let prof =
            InitialProfile::new(vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)], 1.0).unwrap();
        let p = SolverParams {
            crossing_tol: 0.0,
            ..params(0.1, 0.1)
        };
        let err = simulate(&transport(prof), &p, 1.0, &[]).unwrap_err();
        assert_eq!(err, SolveError::Shock { t: 0.0, index: 5 });
    }
}
