//! Sampled solver output.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CreationCause {
    /// The newest characteristic moved `dx` away from the boundary.
    XGap,
    /// The input drifted `dw` away from the newest characteristic's value.
    WGap,
    /// `dt` elapsed since the last creation.
    Timeout,
}

impl fmt::Display for CreationCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CreationCause::XGap => "x_gap",
            CreationCause::WGap => "w_gap",
            CreationCause::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Removal,
    Creation(CreationCause),
    /// Characteristics `index` and `index + 1` (0-based, newest first) crossed.
    Shock { index: usize },
    /// A creation was requested on a full pool and skipped.
    Overflow,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Removal => "removal",
            EventKind::Creation(_) => "creation",
            EventKind::Shock { .. } => "shock",
            EventKind::Overflow => "overflow",
        }
    }

    /// Secondary CSV column: creation cause or shock index.
    pub fn detail(&self) -> String {
        match self {
            EventKind::Creation(c) => c.to_string(),
            EventKind::Shock { index } => index.to_string(),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveEvent {
    pub time: f64,
    pub kind: EventKind,
    pub pool_count_after: usize,
}

/// Full interpolation grid at one sample time, boundary point included.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub sample_times: Vec<f64>,
    /// `y(t) = w(t, ell)` at each sample.
    pub outputs: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<SolveEvent>,
    /// Number of live characteristics (or grid points) at each sample.
    pub n_history: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    pub fn count_events(&self, pred: impl Fn(&EventKind) -> bool) -> usize {
        self.events.iter().filter(|e| pred(&e.kind)).count()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.sample_times.iter().copied().zip(self.outputs.iter().copied())
    }
}

/// `n + 1` evenly spaced sample times from 0 to `t_end` with spacing `step`
/// (the last one clamped to `t_end`).
pub fn uniform_samples(t_end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && t_end >= 0.0);
    let n = (t_end / step + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(t_end)).collect();
    if t_end - out[n] > 1e-9 * step {
        out.push(t_end);
    }
    out
}
