//! Error metrics for comparing sampled outputs against a reference.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("every sample lies within the excluded windows around jumps")]
    EmptyMask,
    #[error("sample series differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

fn check(a: usize, b: usize) -> Result<(), MetricError> {
    if a != b {
        return Err(MetricError::LengthMismatch(a, b));
    }
    Ok(())
}

/// Maximum `|y - y_ref|` over samples at least `half_width` away from every
/// jump time.
pub fn linf_excluding_jumps(
    times: &[f64],
    y: &[f64],
    y_ref: &[f64],
    jump_times: &[f64],
    half_width: f64,
) -> Result<f64, MetricError> {
    check(times.len(), y.len())?;
    check(y.len(), y_ref.len())?;
    let mut worst: Option<f64> = None;
    for i in 0..times.len() {
        if jump_times.iter().any(|j| (times[i] - j).abs() < half_width) {
            continue;
        }
        let d = (y[i] - y_ref[i]).abs();
        worst = Some(worst.map_or(d, |w| w.max(d)));
    }
    worst.ok_or(MetricError::EmptyMask)
}

/// Root-mean-square difference over all samples.
pub fn l2(y: &[f64], y_ref: &[f64]) -> Result<f64, MetricError> {
    check(y.len(), y_ref.len())?;
    if y.is_empty() {
        return Err(MetricError::EmptyMask);
    }
    let sum: f64 = y.iter().zip(y_ref).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sum / y.len() as f64).sqrt())
}

/// Times at which the piecewise-linear sample path crosses `level`.
pub fn crossings(times: &[f64], y: &[f64], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..times.len().saturating_sub(1) {
        let (a, b) = (y[i] - level, y[i + 1] - level);
        if a == 0.0 {
            out.push(times[i]);
        } else if a * b < 0.0 {
            out.push(times[i] + (times[i + 1] - times[i]) * a / (a - b));
        }
    }
    if let (Some(&t), Some(&v)) = (times.last(), y.last()) {
        if v == level {
            out.push(t);
        }
    }
    out
}

fn nearest(candidates: &[f64], tau: f64, window: f64) -> Option<f64> {
    candidates
        .iter()
        .copied()
        .filter(|t| (t - tau).abs() <= window)
        .min_by(|a, b| (a - tau).abs().total_cmp(&(b - tau).abs()))
}

/// For each `(tau, level)`, the distance from `tau` to the nearest crossing of
/// `level` within `window`, or `None` if there is none.
pub fn jump_time_errors(
    times: &[f64],
    y: &[f64],
    jumps: &[(f64, f64)],
    window: f64,
) -> Vec<Option<f64>> {
    jumps
        .iter()
        .map(|&(tau, level)| nearest(&crossings(times, y, level), tau, window).map(|t| (t - tau).abs()))
        .collect()
}

/// 10%-90% rise (or fall) time of a transition between `low` and `high`
/// around `tau`, using the crossings of the two levels nearest to `tau`
/// within `window`.
pub fn transition_width(times: &[f64], y: &[f64], tau: f64, low: f64, high: f64, window: f64) -> Option<f64> {
    let l10 = low + 0.1 * (high - low);
    let l90 = low + 0.9 * (high - low);
    let t10 = nearest(&crossings(times, y, l10), tau, window)?;
    let t90 = nearest(&crossings(times, y, l90), tau, window)?;
    Some((t90 - t10).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn linf_cases() {
        let t = grid(101, 0.01);
        let y: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        assert_eq!(linf_excluding_jumps(&t, &y, &y, &[], 0.1).unwrap(), 0.0);
        let shifted: Vec<f64> = y.iter().map(|v| v + 0.1).collect();
        let d = linf_excluding_jumps(&t, &shifted, &y, &[], 0.1).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        let mut spike = y.clone();
        spike[45] += 1.0;
        assert_eq!(linf_excluding_jumps(&t, &spike, &y, &[0.5], 0.1).unwrap(), 0.0);
        assert_eq!(
            linf_excluding_jumps(&t, &y, &y, &[0.5], 10.0),
            Err(MetricError::EmptyMask)
        );
        assert!(linf_excluding_jumps(&t, &y[1..], &y, &[], 0.1).is_err());
    }

    #[test]
    fn l2_of_constant_offset() {
        assert!((l2(&[1.0, 2.0, 3.0], &[0.5, 1.5, 2.5]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn jump_and_width() {
        let t = grid(201, 0.01);
        // ramp from 0 to 1 over [0.9, 1.1]
        let y: Vec<f64> = t.iter().map(|&t| ((t - 0.9) / 0.2).clamp(0.0, 1.0)).collect();
        let e = jump_time_errors(&t, &y, &[(1.0, 0.5), (1.8, 2.0)], 0.05);
        assert!(e[0].unwrap() < 1e-9);
        assert_eq!(e[1], None);
        let w = transition_width(&t, &y, 1.0, 0.0, 1.0, 0.2).unwrap();
        assert!((w - 0.16).abs() < 1e-9);
        // falling edge gives the same width
        let down: Vec<f64> = y.iter().map(|v| 1.0 - v).collect();
        let w = transition_width(&t, &down, 1.0, 0.0, 1.0, 0.2).unwrap();
        assert!((w - 0.16).abs() < 1e-9);
    }
}
