//! Closed-form reference solutions.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("initial profile has no negative slope (slope_min = {0}); characteristics never meet")]
pub struct NoShock(pub f64);

/// Growth factor `a(t) = e^{gamma t}` and stretched time `s(t)` of the
/// recirculating state-feedback plant.
fn growth_and_clock(gamma: f64, t: f64) -> (f64, f64) {
    let a = (gamma * t).exp();
    let s = if gamma == 0.0 { t } else { (a - 1.0) / gamma };
    (a, s)
}

/// Output `y(t) = w(t, 1)` of the plant `w_t + v w_x = gamma w` on `[0, 1]`
/// with `v = 2 * integral(w)`, `u(t) = w(t, 1)` and the step initial state
/// `w0 = 0` for `x < 1/2`, `1` otherwise.
pub fn exact_output(gamma: f64, t: f64) -> f64 {
    let (a, s) = growth_and_clock(gamma, t);
    if s - s.floor() < 0.5 {
        a
    } else {
        0.0
    }
}

/// Discontinuity times of [`exact_output`] in `(0, t_end]`, ascending.
pub fn jump_times(gamma: f64, t_end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for m in 1.. {
        let half = m as f64 / 2.0;
        let t = if gamma == 0.0 {
            half
        } else {
            let arg = 1.0 + gamma * half;
            if arg <= 0.0 {
                break;
            }
            arg.ln() / gamma
        };
        if t > t_end {
            break;
        }
        out.push(t);
    }
    out
}

/// Constant unit-speed transport without source: `w(t, x) = w0(x - t)` for
/// `t <= x`, else `u(t - x)`.
pub fn transport_delay(u: impl Fn(f64) -> f64, w0: impl Fn(f64) -> f64, x: f64, t: f64) -> f64 {
    if t <= x {
        w0(x - t)
    } else {
        u(t - x)
    }
}

/// Time at which characteristics of `w_t + w w_x = 0` first meet, given the
/// most negative slope of the initial profile.
pub fn shock_time(w0_slope_min: f64) -> Result<f64, NoShock> {
    if w0_slope_min < 0.0 {
        Ok(-1.0 / w0_slope_min)
    } else {
        Err(NoShock(w0_slope_min))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_output_values() {
        for g in [-0.1, 0.0, 0.1] {
            assert_eq!(exact_output(g, 0.0), 1.0);
        }
        assert_eq!(exact_output(0.0, 0.6), 0.0);
        let y = exact_output(0.1, 1.0);
        assert!((y - 0.1f64.exp()).abs() < 1e-15);
        assert!((y - 1.10517).abs() < 1e-5);
    }

    #[test]
    fn jump_time_values() {
        assert_eq!(jump_times(0.0, 2.0), vec![0.5, 1.0, 1.5, 2.0]);
        assert!((jump_times(0.1, 1.0)[0] - 0.48790).abs() < 1e-5);
        assert!((jump_times(-0.1, 1.0)[0] - 0.51293).abs() < 1e-5);
        // the clock s(t) saturates at 10 for gamma = -0.1
        assert!(jump_times(-0.1, 1e6).len() == 19);
    }

    #[test]
    fn output_is_nonnegative_and_bounded() {
        for g in [-0.1, 0.0, 0.1, 0.3] {
            for k in 0..2000 {
                let t = k as f64 * 0.01;
                let y = exact_output(g, t);
                assert!(y >= 0.0);
                assert!(y <= (g.abs() * t).exp() + 1e-12);
                assert!(y == 0.0 || (y - (g * t).exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn output_is_continuous_between_jumps() {
        for g in [-0.1, 0.0, 0.1] {
            let jumps = jump_times(g, 10.0);
            let mut edges = vec![0.0];
            edges.extend(&jumps);
            edges.push(10.0);
            for win in edges.windows(2) {
                let (a, b) = (win[0] + 1e-6, win[1] - 1e-6);
                if b <= a {
                    continue;
                }
                let steps = 500;
                let dt = (b - a) / steps as f64;
                for k in 0..steps {
                    let t = a + k as f64 * dt;
                    let dy = (exact_output(g, t + dt) - exact_output(g, t)).abs();
                    assert!(dy < 0.01, "gamma {g}, t {t}");
                }
            }
        }
    }

    #[test]
    fn transport_delay_values() {
        let w0 = |x: f64| 3.0 * x;
        assert!((transport_delay(f64::sin, w0, 0.4, 0.0) - 1.2).abs() < 1e-15);
        assert_eq!(transport_delay(f64::sin, w0, 1.0, 2.0), 1.0f64.sin());
        assert_eq!(transport_delay(f64::sin, |_| 7.0, 0.9, 0.3), 7.0);
    }

    #[test]
    fn transport_delay_solves_pde() {
        let u = |t: f64| (2.0 * t).sin();
        let w0 = |x: f64| (x * x).cos();
        let h = 1e-4;
        let w = |t, x| transport_delay(u, w0, x, t);
        for &(t, x) in &[(0.2, 0.7), (0.5, 0.2), (1.3, 0.9), (2.0, 0.1)] {
            let wt = (w(t + h, x) - w(t - h, x)) / (2.0 * h);
            let wx = (w(t, x + h) - w(t, x - h)) / (2.0 * h);
            assert!((wt + wx).abs() < 1e-6, "residual at ({t}, {x})");
        }
    }

    #[test]
    fn shock_times() {
        assert_eq!(shock_time(-1.0), Ok(1.0));
        assert_eq!(shock_time(-2.0), Ok(0.5));
        assert!(shock_time(0.0).is_err());
        assert!(shock_time(0.5).is_err());
    }
}
