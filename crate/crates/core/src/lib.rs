//! Online method-of-characteristics solver for first-order quasilinear
//! transport equations
//!
//! ```text
//! w_t + v(t, x, w(t, .)) w_x = f(t, x, w(t, .)),   x in [0, ell]
//! w(0, x) = w0(x),   w(t, 0) = u(t)
//! ```
//!
//! together with method-of-lines baselines, closed-form reference solutions
//! and a batch command-line front end.

pub mod baselines;
pub mod cli;
pub mod moc;
pub mod oracles;
pub mod par;
pub mod params;
pub mod pool;
pub mod problem;
pub mod state;
pub mod stepper;
pub mod trajectory;

pub use moc::{simulate, MocSolver, SolveError};
pub use params::SolverParams;
pub use pool::CharacteristicPool;
pub use problem::{InitialProfile, ProblemDef};
pub use state::{InterpScheme, StateView};
pub use trajectory::{SolveEvent, Trajectory};
