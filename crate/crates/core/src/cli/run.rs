//! Running configured experiments and writing their CSV outputs.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::baselines::{mol_simulate, MolConfig, MolScheme};
use crate::moc::{MocSolver, SolveError};
use crate::par;
use crate::stepper::StepOptions;
use crate::trajectory::{uniform_samples, EventKind, Trajectory};

use super::config::{parse_config, ConfigError, Method, RunConfig};
use super::metrics;
use super::registry::Oracle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_SHOCK: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Half width of the windows around exact jumps excluded from the error norm.
pub const JUMP_HALF_WIDTH: f64 = 0.05;

pub fn exit_code(err: Option<&SolveError>) -> i32 {
    match err {
        None => EXIT_OK,
        Some(SolveError::Shock { .. }) => EXIT_SHOCK,
        Some(SolveError::Overflow { .. }) => EXIT_OVERFLOW,
        Some(_) => EXIT_FAILURE,
    }
}

fn status(err: Option<&SolveError>) -> &'static str {
    match err {
        None => "ok",
        Some(SolveError::Shock { .. }) => "shock",
        Some(SolveError::Overflow { .. }) => "overflow",
        Some(_) => "error",
    }
}

/// Result of one method on one problem; `trajectory` holds whatever was
/// sampled before a failure.
#[derive(Debug)]
pub struct RunOutcome {
    pub method: Method,
    pub trajectory: Trajectory,
    pub error: Option<SolveError>,
    pub metrics: Vec<(String, String)>,
    pub wall_time: Duration,
    /// Which entries of `trajectory.sample_times` are on the output grid
    /// (the rest were added for snapshots only).
    output_mask: Vec<bool>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.error.as_ref())
    }

    pub fn metric(&self, name: &str) -> Option<&str> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    /// Samples on the configured output grid.
    pub fn outputs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.trajectory
            .samples()
            .zip(&self.output_mask)
            .filter(|(_, &keep)| keep)
            .map(|(s, _)| s)
    }
}

/// Output grid merged with the snapshot times; the flag marks output times.
fn sample_plan(cfg: &RunConfig) -> (Vec<f64>, Vec<bool>) {
    let grid = uniform_samples(cfg.t_end, cfg.sample_step);
    let tol = 1e-12 * cfg.t_end.max(1.0);
    let mut merged: Vec<(f64, bool)> = grid.iter().map(|&t| (t, true)).collect();
    for &s in &cfg.snapshot_times {
        if !grid.iter().any(|&t| (t - s).abs() <= tol) {
            merged.push((s, false));
        }
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    merged.into_iter().unzip()
}

fn is_snapshot_time(cfg: &RunConfig, t: f64) -> bool {
    let tol = 1e-12 * cfg.t_end.max(1.0);
    cfg.snapshot_times.iter().any(|&s| (s - t).abs() <= tol)
}

/// Runs `method` on the configured problem.
pub fn execute(cfg: &RunConfig, method: Method) -> RunOutcome {
    let start = Instant::now();
    let (times, output_mask) = sample_plan(cfg);
    let want_snapshots = !cfg.snapshot_times.is_empty();
    let problem = cfg.problem.build().expect("problem validated with the config");
    let (mut trajectory, error) = match method {
        Method::Moc => match MocSolver::new(problem, cfg.params.clone()) {
            Ok(solver) => {
                let mut solver = solver.record_snapshots(want_snapshots);
                let res = solver.run(cfg.t_end, &times);
                (solver.into_trajectory(), res.err())
            }
            Err(e) => (Trajectory::default(), Some(e)),
        },
        Method::Mol { scheme, k } => {
            let mol = MolConfig {
                snapshots: want_snapshots,
                ..MolConfig::new(k, scheme)
            };
            let opts = StepOptions {
                abs_tol: cfg.params.abs_tol,
                rel_tol: cfg.params.rel_tol,
                max_step: cfg.params.max_step,
            };
            match mol_simulate(&problem, &mol, cfg.t_end, &times, &opts) {
                Ok(tr) => (tr, None),
                Err(e) => (Trajectory::default(), Some(e)),
            }
        }
    };
    trajectory.snapshots.retain(|s| is_snapshot_time(cfg, s.t));
    let mut outcome = RunOutcome {
        method,
        trajectory,
        error,
        metrics: Vec::new(),
        wall_time: Duration::ZERO,
        output_mask,
    };
    outcome.metrics = compute_metrics(cfg, &outcome);
    outcome.wall_time = start.elapsed();
    outcome
}

fn compute_metrics(cfg: &RunConfig, o: &RunOutcome) -> Vec<(String, String)> {
    let mut m: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| m.push((k.to_string(), v));
    put("problem", cfg.problem.name().to_string());
    put("method", o.method.name().to_string());
    put("status", status(o.error.as_ref()).to_string());
    let tr = &o.trajectory;
    let (t, y): (Vec<f64>, Vec<f64>) = o.outputs().unzip();
    put("samples", t.len().to_string());
    if let Some(&last) = t.last() {
        put("t_last_sample", last.to_string());
    }
    if let Some(min) = y.iter().copied().reduce(f64::min) {
        put("y_min", min.to_string());
    }
    if let Some(nmax) = tr.n_history.iter().max() {
        put("n_max_used", nmax.to_string());
    }
    if o.method == Method::Moc {
        put("events_removal", tr.count_events(|k| *k == EventKind::Removal).to_string());
        put(
            "events_creation",
            tr.count_events(|k| matches!(k, EventKind::Creation(_))).to_string(),
        );
        put("events_overflow", tr.count_events(|k| *k == EventKind::Overflow).to_string());
    }
    match &o.error {
        Some(SolveError::Shock { t, index }) => {
            put("shock_time", t.to_string());
            put("shock_index", index.to_string());
        }
        Some(SolveError::Overflow { t, .. }) => put("overflow_time", t.to_string()),
        Some(SolveError::NonFinite { t }) => put("failure_time", t.to_string()),
        _ => {}
    }
    let Some(oracle) = cfg.problem.oracle() else {
        return m;
    };
    if let Oracle::ShockTime(ts) = oracle {
        put("shock_time_ref", ts.to_string());
        return m;
    }
    if t.is_empty() {
        return m;
    }
    let y_ref: Vec<f64> = t.iter().map(|&s| oracle.output(s).unwrap()).collect();
    let jumps = oracle.jump_times(cfg.t_end);
    if let Ok(v) = metrics::linf_excluding_jumps(&t, &y, &y_ref, &jumps, JUMP_HALF_WIDTH) {
        put("linf_excluding_jumps", v.to_string());
    }
    if let Ok(v) = metrics::l2(&y, &y_ref) {
        put("l2", v.to_string());
    }
    if let Oracle::Output { gamma } = oracle {
        let t_last = *t.last().unwrap();
        let levels: Vec<(f64, f64)> = jumps
            .iter()
            .filter(|&&tau| tau + JUMP_HALF_WIDTH <= t_last)
            .map(|&tau| (tau, 0.5 * (gamma * tau).exp()))
            .collect();
        let errs = metrics::jump_time_errors(&t, &y, &levels, JUMP_HALF_WIDTH);
        let matched = errs.iter().flatten().count();
        put("jumps_expected", levels.len().to_string());
        put("jumps_matched", matched.to_string());
        if let Some(worst) = errs.iter().flatten().copied().reduce(f64::max) {
            put("jump_time_error_max", worst.to_string());
        }
    }
    m
}

fn create(path: &Path) -> io::Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Writes `y.csv`, `snapshots.csv`, `events.csv` and `report.csv` into `dir`.
pub fn write_outputs(dir: &Path, o: &RunOutcome) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut f = create(&dir.join("y.csv"))?;
    writeln!(f, "t,y")?;
    for (t, y) in o.outputs() {
        writeln!(f, "{t},{y}")?;
    }
    f.flush()?;

    let mut f = create(&dir.join("snapshots.csv"))?;
    writeln!(f, "t,x,w")?;
    for s in &o.trajectory.snapshots {
        for (x, w) in &s.points {
            writeln!(f, "{},{x},{w}", s.t)?;
        }
    }
    f.flush()?;

    let mut f = create(&dir.join("events.csv"))?;
    writeln!(f, "t,kind,cause,n_after")?;
    for e in &o.trajectory.events {
        writeln!(f, "{},{},{},{}", e.time, e.kind.name(), e.kind.detail(), e.pool_count_after)?;
    }
    f.flush()?;

    write_report(&dir.join("report.csv"), &o.metrics)
}

fn write_report(path: &Path, rows: &[(String, String)]) -> io::Result<()> {
    let mut f = create(path)?;
    writeln!(f, "metric,value")?;
    for (k, v) in rows {
        writeln!(f, "{k},{v}")?;
    }
    f.flush()
}

fn write_reference(dir: &Path, cfg: &RunConfig) -> io::Result<()> {
    let Some(oracle) = cfg.problem.oracle() else {
        return Ok(());
    };
    if oracle.output(0.0).is_none() {
        return Ok(());
    }
    let mut f = create(&dir.join("exact.csv"))?;
    writeln!(f, "t,y")?;
    for t in uniform_samples(cfg.t_end, cfg.sample_step) {
        writeln!(f, "{t},{}", oracle.output(t).unwrap())?;
    }
    f.flush()
}

/// Error raised before any simulation starts.
#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
}

impl SetupError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SetupError::Read { .. } => EXIT_FAILURE,
            SetupError::Config { .. } => EXIT_CONFIG,
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, SetupError> {
    let text = fs::read_to_string(path).map_err(|source| SetupError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|source| SetupError::Config {
        path: path.to_path_buf(),
        source,
    })
}

fn out_dir(cfg: &RunConfig, overridden: Option<&Path>) -> PathBuf {
    overridden
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn report_failure(label: &str, o: &RunOutcome) {
    if let Some(e) = &o.error {
        eprintln!("{label}: {}: {e}", o.method.name());
    }
}

/// `run <config>`: executes the configured method; returns the exit code.
pub fn run_config(cfg: &RunConfig, out: &Path) -> i32 {
    let o = execute(cfg, cfg.method);
    eprintln!("{}: wall time {:.3} s", o.method.name(), o.wall_time.as_secs_f64());
    report_failure(cfg.problem.name(), &o);
    if let Err(e) = write_outputs(out, &o) {
        eprintln!("cannot write outputs to {}: {e}", out.display());
        return EXIT_FAILURE;
    }
    o.exit_code()
}

pub fn run_file(path: &Path, out: Option<&Path>) -> i32 {
    match load_config(path) {
        Ok(cfg) => run_config(&cfg, &out_dir(&cfg, out)),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// The three methods compared by `compare`.
pub fn comparison_methods(k: usize) -> [Method; 3] {
    [
        Method::Moc,
        Method::Mol { scheme: MolScheme::Central, k },
        Method::Mol { scheme: MolScheme::Upwind, k },
    ]
}

/// `compare <config>`: characteristics plus both method-of-lines variants,
/// run concurrently. Failures of individual methods are recorded in the
/// report rather than turned into an exit code.
pub fn compare_config(cfg: &RunConfig, out: &Path) -> Result<Vec<RunOutcome>, io::Error> {
    let methods = comparison_methods(cfg.k());
    let outcomes = par::map(&methods, |&m| execute(cfg, m));
    let mut combined = Vec::new();
    for o in &outcomes {
        eprintln!("{}: wall time {:.3} s", o.method.name(), o.wall_time.as_secs_f64());
        report_failure(cfg.problem.name(), o);
        write_outputs(&out.join(o.method.name()), o)?;
        for (k, v) in &o.metrics {
            combined.push((format!("{}.{k}", o.method.name()), v.clone()));
        }
    }
    write_report(&out.join("report.csv"), &combined)?;
    write_reference(out, cfg)?;
    Ok(outcomes)
}

pub fn compare_file(path: &Path, out: Option<&Path>) -> i32 {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let dir = out_dir(&cfg, out);
    match compare_config(&cfg, &dir) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("cannot write outputs to {}: {e}", dir.display());
            EXIT_FAILURE
        }
    }
}

/// `sweep <dir>`: runs every `*.cfg` in `dir` concurrently, each into
/// `<out>/<file stem>`. Returns the first non-zero exit code in file-name
/// order, or 0.
pub fn sweep(dir: &Path, out: &Path) -> i32 {
    let mut files: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
            .collect(),
        Err(e) => {
            eprintln!("{}: {e}", dir.display());
            return EXIT_FAILURE;
        }
    };
    files.sort();
    let codes = par::map(&files, |p| {
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match load_config(p) {
            Ok(cfg) => run_config(&cfg, &out.join(stem)),
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        }
    });
    for (p, c) in files.iter().zip(&codes) {
        println!("{} {}", p.display(), c);
    }
    codes.into_iter().find(|&c| c != EXIT_OK).unwrap_or(EXIT_OK)
}
