use std::path::PathBuf;

use proptest::prelude::*;
use quasilin::baselines::MolScheme;
use quasilin::cli::config::{parse_config, render, Method, RunConfig};
use quasilin::cli::registry::{CustomProblem, ProblemSpec};
use quasilin::{InterpScheme, SolverParams};

fn problem() -> impl Strategy<Value = ProblemSpec> {
    prop_oneof![
        Just(ProblemSpec::SimpleExample),
        (-1.0..1.0f64).prop_map(|gamma| ProblemSpec::StateFeedback { gamma }),
        Just(ProblemSpec::PureTransport),
        Just(ProblemSpec::BurgersShock),
        (
            1.0..4.0f64,
            prop::collection::vec(-2.0..2.0f64, 2..6),
            prop::sample::select(vec!["1", "1 + 0.1*sin(x*w)", "2*I", "max(0.5, min(w, 2))"]),
            prop::sample::select(vec!["0", "-w", "0.1*w*exp(-t)"]),
            prop::sample::select(vec!["0", "sin(t)", "floor(t) / 2", "I"]),
        )
            .prop_map(|(ell, w, v, f, u)| {
                let n = w.len();
                let x: Vec<f64> = (0..n).map(|i| ell * i as f64 / (n - 1) as f64).collect();
                ProblemSpec::Custom(CustomProblem {
                    ell,
                    x_values: x,
                    w_values: w,
                    v: v.into(),
                    f: f.into(),
                    u: u.into(),
                })
            }),
    ]
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![
        Just(Method::Moc),
        (2usize..500).prop_map(|k| Method::Mol { scheme: MolScheme::Central, k }),
        (2usize..500).prop_map(|k| Method::Mol { scheme: MolScheme::Upwind, k }),
    ]
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        problem(),
        method(),
        (0.001..0.9f64, 1e-4..1.0f64, 1e-3..2.0f64, 2usize..5000, 0.0..1e-3f64),
        (any::<bool>(), any::<bool>(), any::<bool>()),
        (1e-12..1e-3f64, 1e-10..1e-2f64, 1e-3..1.0f64, 1e-14..1e-6f64),
        (0.1..50.0f64, 1e-3..1.0f64, prop::collection::vec(0.0..1.0f64, 0..4)),
        prop::option::of("[a-z]{1,8}(/[a-z0-9_]{1,8}){0,2}"),
    )
        .prop_map(|(problem, method, (dx, dw, dt, n_max, ctol), flags, tols, times, out)| {
            let (t_end, sample_step, fracs) = times;
            let mut snaps: Vec<f64> = fracs.iter().map(|f| f * t_end).collect();
            snaps.sort_by(f64::total_cmp);
            snaps.dedup();
            RunConfig {
                params: SolverParams {
                    dx: dx * problem.ell(),
                    dw,
                    dt,
                    n_max,
                    crossing_tol: ctol,
                    terminate_on_overflow: flags.0,
                    interp: if flags.1 { InterpScheme::Linear } else { InterpScheme::Nearest },
                    capture_input_jumps: flags.2,
                    abs_tol: tols.0,
                    rel_tol: tols.1,
                    max_step: tols.2,
                    event_tol: tols.3,
                },
                problem,
                method,
                t_end,
                sample_step,
                snapshot_times: snaps,
                output_dir: out.map(PathBuf::from),
            }
        })
}

proptest! {
    #[test]
    fn parse_render_roundtrip(cfg in config()) {
        let text = render(&cfg);
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }
}
