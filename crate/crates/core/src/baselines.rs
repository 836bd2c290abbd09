//! Method-of-lines baselines on a fixed uniform grid.
//!
//! The grid is `x_i = i * dx`, `i = 0..=K`, `dx = ell / K`. The value at
//! `x_0 = 0` is a state like any other; the boundary input enters only
//! through the first difference quotient.

use std::fmt;
use std::str::FromStr;

use crate::moc::SolveError;
use crate::problem::ProblemDef;
use crate::state::{InterpScheme, StateView};
use crate::stepper::{self, OdeSystem, StepOptions};
use crate::trajectory::{Snapshot, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MolScheme {
    Central,
    Upwind,
}

impl fmt::Display for MolScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MolScheme::Central => "central",
            MolScheme::Upwind => "upwind",
        })
    }
}

impl FromStr for MolScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "central" => Ok(MolScheme::Central),
            "upwind" => Ok(MolScheme::Upwind),
            other => Err(format!("unknown finite-difference scheme `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolConfig {
    /// Number of grid segments.
    pub k: usize,
    pub scheme: MolScheme,
    pub snapshots: bool,
}

impl MolConfig {
    pub fn new(k: usize, scheme: MolScheme) -> Self {
        assert!(k >= 2, "method of lines needs at least 2 segments");
        Self {
            k,
            scheme,
            snapshots: false,
        }
    }
}

/// Central differences; the first point uses `(w_1 - 2 u + w_2) / (2 dx)`
/// and the last a backward difference.
pub fn central_dwdx(w: &[f64], boundary: f64, dx: f64, out: &mut [f64]) {
    let n = w.len();
    assert!(n >= 3 && out.len() == n);
    out[0] = (w[0] - 2.0 * boundary + w[1]) / (2.0 * dx);
    for i in 1..n - 1 {
        out[i] = (w[i + 1] - w[i - 1]) / (2.0 * dx);
    }
    out[n - 1] = (w[n - 1] - w[n - 2]) / dx;
}

/// First-order backward (upwind for positive velocity) differences.
pub fn upwind_dwdx(w: &[f64], boundary: f64, dx: f64, out: &mut [f64]) {
    let n = w.len();
    assert!(n >= 2 && out.len() == n);
    out[0] = (w[0] - boundary) / dx;
    for i in 1..n {
        out[i] = (w[i] - w[i - 1]) / dx;
    }
}

/// Composite trapezoidal rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    assert!(values.len() >= 2);
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    dx * (0.5 * values[0] + inner + 0.5 * values[n - 1])
}

struct MolSystem<'a> {
    problem: &'a ProblemDef,
    scheme: MolScheme,
    grid: Vec<f64>,
    dx: f64,
}

impl MolSystem<'_> {
    fn input(&self, t: f64, w: &[f64]) -> f64 {
        let view = StateView::new(None, &self.grid, w, InterpScheme::Linear, self.problem.ell());
        self.problem.boundary_input(t, &view)
    }
}

impl OdeSystem for MolSystem<'_> {
    type Error = SolveError;

    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn rhs(&self, t: f64, w: &[f64], dy: &mut [f64]) -> Result<(), SolveError> {
        let u = self.input(t, w);
        let view = StateView::new(Some(u), &self.grid, w, InterpScheme::Linear, self.problem.ell());
        match self.scheme {
            MolScheme::Central => central_dwdx(w, u, self.dx, dy),
            MolScheme::Upwind => upwind_dwdx(w, u, self.dx, dy),
        }
        for i in 0..w.len() {
            let x = self.grid[i];
            let v = self.problem.velocity(t, x, w[i], &view);
            dy[i] = -v * dy[i] + self.problem.source(t, x, w[i], &view);
        }
        Ok(())
    }
}

/// Integrates the semi-discretized problem and samples `y(t) = w(t, ell)`.
pub fn mol_simulate(
    problem: &ProblemDef,
    config: &MolConfig,
    t_end: f64,
    sample_times: &[f64],
    opts: &StepOptions,
) -> Result<Trajectory, SolveError> {
    let k = config.k;
    let ell = problem.ell();
    let grid: Vec<f64> = (0..=k)
        .map(|i| if i == k { ell } else { ell * i as f64 / k as f64 })
        .collect();
    let w0: Vec<f64> = grid.iter().map(|&x| problem.initial_profile().value(x)).collect();
    let sys = MolSystem {
        problem,
        scheme: config.scheme,
        dx: ell / k as f64,
        grid,
    };
    let mut traj = Trajectory::default();
    stepper::integrate(&sys, 0.0, &w0, t_end, opts, sample_times, |t, w| {
        traj.sample_times.push(t);
        traj.outputs.push(w[k]);
        traj.n_history.push(k + 1);
        if config.snapshots {
            let points = sys.grid.iter().copied().zip(w.iter().copied()).collect();
            traj.snapshots.push(Snapshot { t, points });
        }
        Ok(())
    })?;
    Ok(traj)
}
