//! Problem definitions: `w_t + v w_x = f` on `[0, ell]` with input `w(t, 0) = u(t)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::state::StateView;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("domain length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("initial profile invalid: {0}")]
    ProfileInvalid(String),
}

/// Piecewise-linear initial state given by knots `(x, w)`.
///
/// Positions are nondecreasing; two knots sharing a position describe a jump.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialProfile {
    knots: Vec<(f64, f64)>,
}

impl InitialProfile {
    /// Validates the knots against the domain `[0, ell]`.
    pub fn new(knots: Vec<(f64, f64)>, ell: f64) -> Result<Self, ProblemError> {
        let bad = |m: String| Err(ProblemError::ProfileInvalid(m));
        if knots.len() < 2 {
            return bad(format!("need at least 2 knots, got {}", knots.len()));
        }
        if knots.iter().any(|(x, w)| !x.is_finite() || !w.is_finite()) {
            return bad("knots must be finite".into());
        }
        let first = knots[0].0;
        let last = knots[knots.len() - 1].0;
        if first != 0.0 {
            return bad(format!("first knot must be at x = 0, got {first}"));
        }
        if (last - ell).abs() > 1e-12 * ell.max(1.0) {
            return bad(format!("last knot must be at x = {ell}, got {last}"));
        }
        for (k, pair) in knots.windows(2).enumerate() {
            if pair[1].0 < pair[0].0 {
                return bad(format!("knot positions decrease at index {}", k + 1));
            }
        }
        for (k, triple) in knots.windows(3).enumerate() {
            if triple[0].0 == triple[2].0 {
                return bad(format!("more than two knots share x = {} (index {k})", triple[0].0));
            }
        }
        if knots[0].0 == knots[1].0 && knots.len() == 2 {
            return bad("profile has zero length".into());
        }
        Ok(Self { knots })
    }

    /// Convenience for a profile sampled from a function at uniform knots.
    pub fn sampled(f: impl Fn(f64) -> f64, ell: f64, segments: usize) -> Result<Self, ProblemError> {
        let segments = segments.max(1);
        let knots = (0..=segments)
            .map(|i| {
                let x = if i == segments { ell } else { ell * i as f64 / segments as f64 };
                (x, f(x))
            })
            .collect();
        Self::new(knots, ell)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Piecewise-linear value; at a jump the right limit is returned, and
    /// positions past the last knot take the last value.
    pub fn value(&self, x: f64) -> f64 {
        let k = &self.knots;
        let j = k.partition_point(|&(xk, _)| xk <= x);
        if j == 0 {
            return k[0].1;
        }
        if j == k.len() {
            return k[k.len() - 1].1;
        }
        let (xl, wl) = k[j - 1];
        let (xr, wr) = k[j];
        wl + (wr - wl) * (x - xl) / (xr - xl)
    }
}

/// Pointwise coefficient `g(t, x, w, state)`; `w` is the state value carried
/// at `x` (the characteristic's own value, or the grid value for finite
/// differences) and `state` gives access to the full interpolated profile.
pub type Coefficient = Arc<dyn Fn(f64, f64, f64, &StateView) -> f64 + Send + Sync>;

/// Boundary input `u(t, state)`. The view passed here has no boundary point.
pub type BoundaryInput = Arc<dyn Fn(f64, &StateView) -> f64 + Send + Sync>;

/// A complete PDE instance.
#[derive(Clone)]
pub struct ProblemDef {
    pub name: String,
    ell: f64,
    velocity: Coefficient,
    source: Coefficient,
    boundary_input: BoundaryInput,
    initial_profile: InitialProfile,
}

impl fmt::Debug for ProblemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDef")
            .field("name", &self.name)
            .field("ell", &self.ell)
            .field("initial_profile", &self.initial_profile)
            .finish_non_exhaustive()
    }
}

impl ProblemDef {
    pub fn new(
        name: impl Into<String>,
        ell: f64,
        velocity: Coefficient,
        source: Coefficient,
        boundary_input: BoundaryInput,
        initial_profile: InitialProfile,
    ) -> Result<Self, ProblemError> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(ProblemError::BadLength(ell));
        }
        let last = initial_profile.knots().last().unwrap().0;
        if (last - ell).abs() > 1e-12 * ell.max(1.0) {
            return Err(ProblemError::ProfileInvalid(format!(
                "profile ends at {last}, domain length is {ell}"
            )));
        }
        Ok(Self {
            name: name.into(),
            ell,
            velocity,
            source,
            boundary_input,
            initial_profile,
        })
    }

    /// Builds a problem from closures.
    pub fn from_fns(
        name: impl Into<String>,
        ell: f64,
        velocity: impl Fn(f64, f64, f64, &StateView) -> f64 + Send + Sync + 'static,
        source: impl Fn(f64, f64, f64, &StateView) -> f64 + Send + Sync + 'static,
        boundary_input: impl Fn(f64, &StateView) -> f64 + Send + Sync + 'static,
        initial_profile: InitialProfile,
    ) -> Result<Self, ProblemError> {
        Self::new(
            name,
            ell,
            Arc::new(velocity),
            Arc::new(source),
            Arc::new(boundary_input),
            initial_profile,
        )
    }

    #[inline]
    pub fn ell(&self) -> f64 {
        self.ell
    }

    #[inline]
    pub fn velocity(&self, t: f64, x: f64, w: f64, state: &StateView) -> f64 {
        (self.velocity)(t, x, w, state)
    }

    #[inline]
    pub fn source(&self, t: f64, x: f64, w: f64, state: &StateView) -> f64 {
        (self.source)(t, x, w, state)
    }

    #[inline]
    pub fn boundary_input(&self, t: f64, state: &StateView) -> f64 {
        (self.boundary_input)(t, state)
    }

    pub fn initial_profile(&self) -> &InitialProfile {
        &self.initial_profile
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation() {
        assert!(InitialProfile::new(vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)], 1.0).is_ok());
        assert!(InitialProfile::new(vec![(0.1, 0.0), (1.0, 0.0)], 1.0).is_err());
        assert!(InitialProfile::new(vec![(0.0, 0.0), (0.9, 0.0)], 1.0).is_err());
        assert!(InitialProfile::new(vec![(0.0, 0.0), (0.6, 0.0), (0.5, 0.0), (1.0, 0.0)], 1.0).is_err());
        let triple = vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 1.0)];
        assert!(InitialProfile::new(triple, 1.0).is_err());
    }

    #[test]
    fn profile_value_takes_right_limit_at_jump() {
        let p = InitialProfile::new(vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)], 1.0).unwrap();
        assert_eq!(p.value(0.49), 0.0);
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(0.75), 1.0);
        assert_eq!(p.value(3.0), 1.0);
    }

    #[test]
    fn profile_value_interpolates() {
        let p = InitialProfile::new(vec![(0.0, 1.0), (2.0, 0.0)], 2.0).unwrap();
        assert_eq!(p.value(0.5), 0.75);
    }
}
