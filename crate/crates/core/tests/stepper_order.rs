//! Convergence order of the Runge-Kutta pair with fixed steps.

use quasilin::stepper::{try_step, FnSystem, StepOptions, StepOutcome};

fn fixed_step_error(n: usize) -> f64 {
    // y' = -2 t y, y(0) = 1, exact exp(-t^2)
    let sys = FnSystem::new(1, |t, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * t * y[0]);
    let loose = StepOptions {
        abs_tol: 1e3,
        rel_tol: 1e3,
        max_step: f64::INFINITY,
    };
    let h = 2.0 / n as f64;
    let mut y = vec![1.0];
    for i in 0..n {
        match try_step(&sys, i as f64 * h, &y, h, &loose).unwrap() {
            StepOutcome::Accepted(r) => y = r.y_new,
            StepOutcome::Rejected { .. } => panic!("step rejected at loose tolerance"),
        }
    }
    (y[0] - (-4.0f64).exp()).abs()
}

#[test]
fn at_least_fourth_order() {
    let mut prev = fixed_step_error(10);
    for n in [20, 40, 80] {
        let e = fixed_step_error(n);
        let order = (prev / e).log2();
        assert!(order > 4.0, "observed order {order:.2} at n = {n}");
        prev = e;
    }
}
