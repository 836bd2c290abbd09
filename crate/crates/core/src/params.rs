use thiserror::Error;

use crate::state::InterpScheme;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid solver parameter `{field}`: {message}")]
pub struct ParamError {
    pub field: &'static str,
    pub message: String,
}

/// Tuning knobs of the characteristics solver and its integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Spatial gap at the input boundary that triggers a new characteristic.
    pub dx: f64,
    /// Value gap between the newest characteristic and the input.
    pub dw: f64,
    /// Maximum time between creations.
    pub dt: f64,
    /// Capacity of the characteristic pool.
    pub n_max: usize,
    /// Allowed overlap `xi_i - xi_{i+1}` before a shock is reported.
    pub crossing_tol: f64,
    pub terminate_on_overflow: bool,
    pub interp: InterpScheme,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub event_tol: f64,
    /// When the input jumps by more than `dw` within `event_tol`, create a
    /// coincident pair carrying both one-sided values instead of a single
    /// characteristic, so the discontinuity stays sharp.
    pub capture_input_jumps: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            dx: 0.1,
            dw: 0.01,
            dt: 0.5,
            n_max: 1000,
            crossing_tol: 1e-6,
            terminate_on_overflow: true,
            interp: InterpScheme::Linear,
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            max_step: 0.1,
            event_tol: 1e-10,
            capture_input_jumps: true,
        }
    }
}

impl SolverParams {
    /// Checks every field; `ell` is the domain length the parameters will be
    /// used with (`dx` must lie in `(0, ell)`).
    pub fn validate(&self, ell: f64) -> Result<(), ParamError> {
        let err = |field, message: String| Err(ParamError { field, message });
        if !(self.dx > 0.0 && self.dx < ell) {
            return err("dx", format!("must lie in (0, {ell}), got {}", self.dx));
        }
        for (field, v) in [
            ("dw", self.dw),
            ("dt", self.dt),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("max_step", self.max_step),
            ("event_tol", self.event_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return err(field, format!("must be positive and finite, got {v}"));
            }
        }
        if !(self.crossing_tol >= 0.0 && self.crossing_tol.is_finite()) {
            return err("crossing_tol", format!("must be >= 0, got {}", self.crossing_tol));
        }
        if self.n_max < 2 {
            return err("n_max", format!("must be at least 2, got {}", self.n_max));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SolverParams::default().validate(1.0).unwrap();
    }

    #[test]
    fn dx_must_be_below_length() {
        let p = SolverParams { dx: 1.5, ..Default::default() };
        assert_eq!(p.validate(1.0).unwrap_err().field, "dx");
        let p = SolverParams { dx: 1.0, ..Default::default() };
        assert!(p.validate(1.0).is_err());
    }

    #[test]
    fn rejects_bad_tolerances() {
        let p = SolverParams { abs_tol: 0.0, ..Default::default() };
        assert_eq!(p.validate(1.0).unwrap_err().field, "abs_tol");
        let p = SolverParams { crossing_tol: -1.0, ..Default::default() };
        assert!(p.validate(1.0).is_err());
        let p = SolverParams { n_max: 1, ..Default::default() };
        assert!(p.validate(1.0).is_err());
    }
}
