//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! problem = state_feedback
//! gamma = 0.1
//! method = moc
//! dw = 0.01
//! x_values = 0, 0.5, 0.5, 1
//! ```
//!
//! Unknown keys, duplicate keys and keys that do not apply to the selected
//! problem or method are errors.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::baselines::MolScheme;
use crate::params::SolverParams;
use crate::state::InterpScheme;

use super::registry::{CustomProblem, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    /// 1-based line number, 0 when the error is not tied to one line.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Moc,
    Mol { scheme: MolScheme, k: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Moc => "moc",
            Method::Mol { scheme: MolScheme::Central, .. } => "mol_central",
            Method::Mol { scheme: MolScheme::Upwind, .. } => "mol_upwind",
        }
    }
}

pub const DEFAULT_K: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub method: Method,
    pub params: SolverParams,
    pub t_end: f64,
    pub sample_step: f64,
    pub snapshot_times: Vec<f64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(problem: ProblemSpec, method: Method) -> Self {
        Self {
            problem,
            method,
            params: SolverParams::default(),
            t_end: 1.0,
            sample_step: 0.01,
            snapshot_times: Vec::new(),
            output_dir: None,
        }
    }

    /// Grid size used for method-of-lines runs (also by `compare`).
    pub fn k(&self) -> usize {
        match self.method {
            Method::Mol { k, .. } => k,
            Method::Moc => DEFAULT_K,
        }
    }
}

const KEYS: &[&str] = &[
    "problem",
    "gamma",
    "ell",
    "x_values",
    "w_values",
    "v",
    "f",
    "u",
    "method",
    "k",
    "dx",
    "dw",
    "dt",
    "n_max",
    "crossing_tol",
    "terminate_on_overflow",
    "interp",
    "abs_tol",
    "rel_tol",
    "max_step",
    "event_tol",
    "capture_input_jumps",
    "t_end",
    "sample_step",
    "snapshot_times",
    "output_dir",
];

const CUSTOM_KEYS: &[&str] = &["ell", "x_values", "w_values", "v", "f", "u"];

struct Entries<'a> {
    map: HashMap<&'a str, (usize, &'a str)>,
}

impl<'a> Entries<'a> {
    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |e| e.0)
    }

    fn raw(&self, key: &str) -> Option<(usize, &'a str)> {
        self.map.get(key).copied()
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| ConfigError {
                line,
                message: format!("`{key}`: cannot parse `{v}`: {e}"),
            }),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.parse(key)?.ok_or_else(|| ConfigError {
            line: 0,
            message: format!("missing key `{key}`"),
        })
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(None);
        };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| ConfigError {
                    line,
                    message: format!("`{key}`: cannot parse `{}`: {e}", s.trim()),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn reject(&self, key: &str, why: &str) -> Result<(), ConfigError> {
        match self.raw(key) {
            Some((line, _)) => Err(ConfigError {
                line,
                message: format!("`{key}` {why}"),
            }),
            None => Ok(()),
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        if map.insert(key, (line, value.trim())).is_some() {
            return Err(ConfigError {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    let e = Entries { map };

    let problem_name: String = e.required("problem")?;
    let problem = match problem_name.as_str() {
        "simple_example" => ProblemSpec::SimpleExample,
        "state_feedback" => ProblemSpec::StateFeedback {
            gamma: e.parse("gamma")?.unwrap_or(0.0),
        },
        "pure_transport" => ProblemSpec::PureTransport,
        "burgers_shock" => ProblemSpec::BurgersShock,
        "custom" => {
            let text = |k: &str| -> Result<String, ConfigError> { e.required::<String>(k) };
            ProblemSpec::Custom(CustomProblem {
                ell: e.required("ell")?,
                x_values: e.list("x_values")?.unwrap_or_default(),
                w_values: e.list("w_values")?.unwrap_or_default(),
                v: text("v")?,
                f: text("f")?,
                u: text("u")?,
            })
        }
        other => {
            return Err(ConfigError {
                line: e.line("problem"),
                message: format!("unknown problem `{other}`"),
            })
        }
    };
    if !matches!(problem, ProblemSpec::StateFeedback { .. }) {
        e.reject("gamma", "only applies to problem = state_feedback")?;
    }
    if !matches!(problem, ProblemSpec::Custom(_)) {
        for k in CUSTOM_KEYS {
            e.reject(k, "only applies to problem = custom")?;
        }
    }

    let method_name: String = e.parse("method")?.unwrap_or_else(|| "moc".into());
    let k: Option<usize> = e.parse("k")?;
    let method = match method_name.as_str() {
        "moc" => {
            e.reject("k", "only applies to method-of-lines runs")?;
            Method::Moc
        }
        "mol_central" | "mol_upwind" => {
            let k = k.unwrap_or(DEFAULT_K);
            if k < 2 {
                return Err(ConfigError {
                    line: e.line("k"),
                    message: format!("`k` must be at least 2, got {k}"),
                });
            }
            let scheme = if method_name == "mol_central" {
                MolScheme::Central
            } else {
                MolScheme::Upwind
            };
            Method::Mol { scheme, k }
        }
        other => {
            return Err(ConfigError {
                line: e.line("method"),
                message: format!("unknown method `{other}` (moc, mol_central, mol_upwind)"),
            })
        }
    };

    let mut params = SolverParams::default();
    macro_rules! field {
        ($name:ident) => {
            if let Some(v) = e.parse(stringify!($name))? {
                params.$name = v;
            }
        };
    }
    field!(dx);
    field!(dw);
    field!(dt);
    field!(n_max);
    field!(crossing_tol);
    field!(terminate_on_overflow);
    field!(abs_tol);
    field!(rel_tol);
    field!(max_step);
    field!(event_tol);
    field!(capture_input_jumps);
    if let Some(v) = e.parse::<InterpScheme>("interp")? {
        params.interp = v;
    }
    let ell = problem.ell();
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(ConfigError {
            line: e.line("ell"),
            message: format!("`ell` must be positive, got {ell}"),
        });
    }
    params.validate(ell).map_err(|err| ConfigError {
        line: e.line(err.field),
        message: err.to_string(),
    })?;

    let mut cfg = RunConfig::new(problem, method);
    cfg.params = params;
    if let Some(v) = e.parse("t_end")? {
        cfg.t_end = v;
    }
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return Err(ConfigError {
            line: e.line("t_end"),
            message: format!("`t_end` must be positive, got {}", cfg.t_end),
        });
    }
    if let Some(v) = e.parse("sample_step")? {
        cfg.sample_step = v;
    }
    if !(cfg.sample_step > 0.0 && cfg.sample_step.is_finite()) {
        return Err(ConfigError {
            line: e.line("sample_step"),
            message: format!("`sample_step` must be positive, got {}", cfg.sample_step),
        });
    }
    if let Some(times) = e.list("snapshot_times")? {
        if times.windows(2).any(|p| p[1] <= p[0]) || times.iter().any(|t| !(*t >= 0.0 && *t <= cfg.t_end)) {
            return Err(ConfigError {
                line: e.line("snapshot_times"),
                message: "`snapshot_times` must be increasing and lie in [0, t_end]".into(),
            });
        }
        cfg.snapshot_times = times;
    }
    if let Some((_, v)) = e.raw("output_dir") {
        cfg.output_dir = Some(PathBuf::from(v));
    }
    if let ProblemSpec::Custom(_) = &cfg.problem {
        cfg.problem.build().map_err(|err| ConfigError {
            line: 0,
            message: err.to_string(),
        })?;
    }
    Ok(cfg)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Writes every field explicitly; `parse_config(&render(c)) == c`.
pub fn render(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("problem", &cfg.problem.name());
    match &cfg.problem {
        ProblemSpec::StateFeedback { gamma } => kv("gamma", gamma),
        ProblemSpec::Custom(c) => {
            kv("ell", &c.ell);
            kv("x_values", &join(&c.x_values));
            kv("w_values", &join(&c.w_values));
            kv("v", &c.v);
            kv("f", &c.f);
            kv("u", &c.u);
        }
        _ => {}
    }
    kv("method", &cfg.method.name());
    if let Method::Mol { k, .. } = cfg.method {
        kv("k", &k);
    }
    let p = &cfg.params;
    kv("dx", &p.dx);
    kv("dw", &p.dw);
    kv("dt", &p.dt);
    kv("n_max", &p.n_max);
    kv("crossing_tol", &p.crossing_tol);
    kv("terminate_on_overflow", &p.terminate_on_overflow);
    kv("interp", &p.interp);
    kv("abs_tol", &p.abs_tol);
    kv("rel_tol", &p.rel_tol);
    kv("max_step", &p.max_step);
    kv("event_tol", &p.event_tol);
    kv("capture_input_jumps", &p.capture_input_jumps);
    kv("t_end", &cfg.t_end);
    kv("sample_step", &cfg.sample_step);
    if !cfg.snapshot_times.is_empty() {
        kv("snapshot_times", &join(&cfg.snapshot_times));
    }
    if let Some(dir) = &cfg.output_dir {
        kv("output_dir", &dir.display());
    }
    s
}
