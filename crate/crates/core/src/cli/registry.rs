//! Built-in problems and expression-defined custom problems.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::oracles;
use crate::problem::{InitialProfile, ProblemDef, ProblemError};

use super::expr::{Expr, ExprError, Symbol, ALL_SYMBOLS};

/// User-defined problem: coefficient expressions and initial knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomProblem {
    pub ell: f64,
    pub x_values: Vec<f64>,
    pub w_values: Vec<f64>,
    pub v: String,
    pub f: String,
    pub u: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    /// `v = x + 1.1 + sin t`, `f = -w`, raised-cosine input switched off at
    /// `t = 16`, `w0 = 1 - x^2` on `[0, 1]`.
    SimpleExample,
    /// Recirculating plant with `v = 2 * integral(w)`, `f = gamma w`,
    /// `u = w(t, 1)` and a unit step at `x = 1/2`.
    StateFeedback { gamma: f64 },
    /// Unit-speed transport of `u = sin t` into a zero state.
    PureTransport,
    /// Inviscid Burgers (`v = w`) with a decreasing ramp that steepens into a
    /// shock at `t = 1`.
    BurgersShock,
    Custom(CustomProblem),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("x_values and w_values differ in length ({0} vs {1})")]
    KnotLengths(usize, usize),
}

/// Knots of the state-feedback initial step; the duplicate abscissa encodes
/// the jump.
pub const STEP_KNOTS: [(f64, f64); 4] = [(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)];

/// Burgers ramp; the floor keeps the velocity positive.
pub const BURGERS_KNOTS: [(f64, f64); 3] = [(0.0, 1.0), (0.95, 0.05), (2.0, 0.05)];

pub fn simple_example() -> ProblemDef {
    let profile = InitialProfile::sampled(|x| 1.0 - x * x, 1.0, 20).expect("valid profile");
    ProblemDef::from_fns(
        "simple_example",
        1.0,
        |t, x, _, _| x + 1.1 + t.sin(),
        |_, _, w, _| -w,
        |t, _| {
            if t <= 16.0 {
                0.5 * (1.0 + (PI * t / 2.0).cos())
            } else {
                0.0
            }
        },
        profile,
    )
    .expect("valid problem")
}

pub fn state_feedback(gamma: f64) -> ProblemDef {
    let profile = InitialProfile::new(STEP_KNOTS.to_vec(), 1.0).expect("valid profile");
    ProblemDef::from_fns(
        "state_feedback",
        1.0,
        |_, _, _, s| 2.0 * s.integral(),
        move |_, _, w, _| gamma * w,
        |_, s| s.eval(s.ell()),
        profile,
    )
    .expect("valid problem")
}

pub fn pure_transport() -> ProblemDef {
    let profile = InitialProfile::new(vec![(0.0, 0.0), (1.0, 0.0)], 1.0).expect("valid profile");
    ProblemDef::from_fns(
        "pure_transport",
        1.0,
        |_, _, _, _| 1.0,
        |_, _, _, _| 0.0,
        |t, _| t.sin(),
        profile,
    )
    .expect("valid problem")
}

pub fn burgers_shock() -> ProblemDef {
    let profile = InitialProfile::new(BURGERS_KNOTS.to_vec(), 2.0).expect("valid profile");
    ProblemDef::from_fns(
        "burgers_shock",
        2.0,
        |_, _, w, _| w,
        |_, _, _, _| 0.0,
        |_, _| BURGERS_KNOTS[0].1,
        profile,
    )
    .expect("valid problem")
}

pub fn custom(c: &CustomProblem) -> Result<ProblemDef, RegistryError> {
    if c.x_values.len() != c.w_values.len() {
        return Err(RegistryError::KnotLengths(c.x_values.len(), c.w_values.len()));
    }
    let knots = c.x_values.iter().copied().zip(c.w_values.iter().copied()).collect();
    let profile = InitialProfile::new(knots, c.ell)?;
    let v = Arc::new(Expr::parse(&c.v, ALL_SYMBOLS)?);
    let f = Arc::new(Expr::parse(&c.f, ALL_SYMBOLS)?);
    let u = Arc::new(Expr::parse(&c.u, &[Symbol::T, Symbol::I])?);
    // the integral is only computed when an expression asks for it
    let (v_int, f_int, u_int) = (v.uses(Symbol::I), f.uses(Symbol::I), u.uses(Symbol::I));
    Ok(ProblemDef::from_fns(
        "custom",
        c.ell,
        move |t, x, w, s| v.eval(t, x, w, if v_int { s.integral() } else { 0.0 }),
        move |t, x, w, s| f.eval(t, x, w, if f_int { s.integral() } else { 0.0 }),
        move |t, s| u.eval(t, 0.0, 0.0, if u_int { s.integral() } else { 0.0 }),
        profile,
    )?)
}

/// Closed-form output of a problem, where one is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    /// Exact `y(t)` with its discontinuity times.
    Output { gamma: f64 },
    /// `y(t) = sin(t - 1)` for `t >= 1`, zero before.
    Delay,
    /// Time at which characteristics first meet.
    ShockTime(f64),
}

impl Oracle {
    /// Reference output at `t`; `None` for oracles that only predict an
    /// event.
    pub fn output(&self, t: f64) -> Option<f64> {
        match *self {
            Oracle::Output { gamma } => Some(oracles::exact_output(gamma, t)),
            Oracle::Delay => Some(oracles::transport_delay(f64::sin, |_| 0.0, 1.0, t)),
            Oracle::ShockTime(_) => None,
        }
    }

    pub fn jump_times(&self, t_end: f64) -> Vec<f64> {
        match *self {
            Oracle::Output { gamma } => oracles::jump_times(gamma, t_end),
            _ => Vec::new(),
        }
    }
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::SimpleExample => "simple_example",
            ProblemSpec::StateFeedback { .. } => "state_feedback",
            ProblemSpec::PureTransport => "pure_transport",
            ProblemSpec::BurgersShock => "burgers_shock",
            ProblemSpec::Custom(_) => "custom",
        }
    }

    pub fn ell(&self) -> f64 {
        match self {
            ProblemSpec::BurgersShock => BURGERS_KNOTS[2].0,
            ProblemSpec::Custom(c) => c.ell,
            _ => 1.0,
        }
    }

    pub fn build(&self) -> Result<ProblemDef, RegistryError> {
        Ok(match self {
            ProblemSpec::SimpleExample => simple_example(),
            ProblemSpec::StateFeedback { gamma } => state_feedback(*gamma),
            ProblemSpec::PureTransport => pure_transport(),
            ProblemSpec::BurgersShock => burgers_shock(),
            ProblemSpec::Custom(c) => custom(c)?,
        })
    }

    pub fn oracle(&self) -> Option<Oracle> {
        match self {
            ProblemSpec::StateFeedback { gamma } => Some(Oracle::Output { gamma: *gamma }),
            ProblemSpec::PureTransport => Some(Oracle::Delay),
            ProblemSpec::BurgersShock => {
                let slope = (BURGERS_KNOTS[1].1 - BURGERS_KNOTS[0].1) / (BURGERS_KNOTS[1].0 - BURGERS_KNOTS[0].0);
                oracles::shock_time(slope).ok().map(Oracle::ShockTime)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{InterpScheme, StateView};

    fn view<'a>(x: &'a [f64], w: &'a [f64]) -> StateView<'a> {
        StateView::new(None, x, w, InterpScheme::Linear, 1.0)
    }

    #[test]
    fn simple_example_coefficients() {
        let p = simple_example();
        let (x, w) = ([0.0, 1.0], [1.0, 0.0]);
        let s = view(&x, &w);
        assert!((p.velocity(0.0, 0.0, 1.0, &s) - 1.1).abs() < 1e-15);
        assert_eq!(p.source(0.0, 0.3, 0.5, &s), -0.5);
        assert_eq!(p.boundary_input(0.0, &s), 1.0);
        assert!((p.boundary_input(1.0, &s) - 0.5).abs() < 1e-15);
        assert!(p.boundary_input(2.0, &s).abs() < 1e-15);
        assert_eq!(p.boundary_input(16.5, &s), 0.0);
        assert_eq!(p.initial_profile().value(0.5), 0.75);
    }

    #[test]
    fn state_feedback_coefficients() {
        let p = state_feedback(0.1);
        let (x, w) = ([0.0, 1.0], [1.0, 1.0]);
        let s = view(&x, &w);
        assert_eq!(p.velocity(0.0, 0.2, 1.0, &s), 2.0);
        assert!((p.source(0.0, 0.2, 2.0, &s) - 0.2).abs() < 1e-15);
        assert_eq!(p.boundary_input(0.0, &s), 1.0);
        assert_eq!(p.initial_profile().value(0.5), 1.0);
        assert_eq!(p.initial_profile().value(0.49), 0.0);
    }

    #[test]
    fn burgers_oracle() {
        assert_eq!(ProblemSpec::BurgersShock.oracle(), Some(Oracle::ShockTime(1.0)));
        assert_eq!(burgers_shock().ell(), 2.0);
    }

    #[test]
    fn custom_problem_with_integral() {
        let c = CustomProblem {
            ell: 1.0,
            x_values: vec![0.0, 1.0],
            w_values: vec![1.0, 1.0],
            v: "2*I".into(),
            f: "-w + x".into(),
            u: "sin(t)".into(),
        };
        let p = custom(&c).unwrap();
        let (x, w) = ([0.0, 1.0], [0.5, 0.5]);
        let s = view(&x, &w);
        assert_eq!(p.velocity(0.0, 0.0, 0.0, &s), 1.0);
        assert_eq!(p.source(0.0, 0.25, 1.0, &s), -0.75);
        let bad = CustomProblem { u: "w".into(), ..c.clone() };
        assert!(custom(&bad).is_err());
        let bad = CustomProblem { w_values: vec![1.0], ..c };
        assert!(matches!(custom(&bad), Err(RegistryError::KnotLengths(2, 1))));
    }
}
