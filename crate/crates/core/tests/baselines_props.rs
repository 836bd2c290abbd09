use proptest::prelude::*;
use quasilin::baselines::{mol_simulate, trapezoid, MolConfig, MolScheme};
use quasilin::stepper::StepOptions;
use quasilin::trajectory::uniform_samples;
use quasilin::{InitialProfile, ProblemDef};

proptest! {
    #[test]
    fn trapezoid_exact_on_affine(a in -5.0..5.0f64, b in -5.0..5.0f64, k in 1usize..50) {
        let dx = 1.0 / k as f64;
        let v: Vec<f64> = (0..=k).map(|i| a + b * i as f64 * dx).collect();
        prop_assert!((trapezoid(&v, dx) - (a + 0.5 * b)).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_linear(
        f in prop::collection::vec(-5.0..5.0f64, 2..30),
        g_seed in -5.0..5.0f64,
        alpha in -3.0..3.0f64,
    ) {
        let g: Vec<f64> = f.iter().enumerate().map(|(i, v)| v * g_seed + i as f64).collect();
        let dx = 0.1;
        let comb: Vec<f64> = f.iter().zip(&g).map(|(a, b)| alpha * a + b).collect();
        let lhs = trapezoid(&comb, dx);
        let rhs = alpha * trapezoid(&f, dx) + trapezoid(&g, dx);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Frozen positive velocity without source: upwind creates no new extrema.
    #[test]
    fn upwind_is_monotone(steps in prop::collection::vec(0.0..1.0f64, 3..8)) {
        let n = steps.len();
        let mut knots = Vec::with_capacity(n + 1);
        let mut w = 0.0;
        for (i, s) in steps.iter().enumerate() {
            knots.push((i as f64 / n as f64, w));
            w += s;
        }
        knots.push((1.0, w));
        let (lo, hi) = (knots[0].1, w);
        let profile = InitialProfile::new(knots, 1.0).unwrap();
        let problem = ProblemDef::from_fns(
            "frozen",
            1.0,
            |_, _, _, _| 1.0,
            |_, _, _, _| 0.0,
            move |_, _| lo,
            profile,
        )
        .unwrap();
        let k = 20;
        let mut cfg = MolConfig::new(k, MolScheme::Upwind);
        cfg.snapshots = true;
        let opts = StepOptions { max_step: 1.0 / k as f64, ..Default::default() };
        let tr = mol_simulate(&problem, &cfg, 0.5, &uniform_samples(0.5, 0.05), &opts).unwrap();
        for snap in &tr.snapshots {
            for &(_, v) in &snap.points {
                prop_assert!(v >= lo - 1e-6 && v <= hi + 1e-6);
            }
            for p in snap.points.windows(2) {
                prop_assert!(p[1].1 >= p[0].1 - 1e-6);
            }
        }
    }
}
