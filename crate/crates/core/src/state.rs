//! Interpolated full state over the characteristic grid.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

/// Interpolation used to reconstruct the state between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpScheme {
    Nearest,
    #[default]
    Linear,
}

impl fmt::Display for InterpScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterpScheme::Nearest => "nearest",
            InterpScheme::Linear => "linear",
        })
    }
}

impl FromStr for InterpScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(InterpScheme::Nearest),
            "linear" => Ok(InterpScheme::Linear),
            other => Err(format!("unknown interpolation scheme `{other}`")),
        }
    }
}

/// A boundary point closer to the origin than this to the newest node is
/// dropped from the grid (the two would coincide right after a creation).
pub const BOUNDARY_DEDUP: f64 = 1e-12;

/// Read-only view of the approximate state `w(t, .)`.
///
/// The grid is `(0, u)` followed by the nodes `(xi_i, w_i)` in ascending
/// position. `boundary` is `None` while the boundary input itself is being
/// evaluated; in that case the first node value extends down to `x = 0`.
///
/// Coincident abscissae encode a jump: left of the pair the left value is
/// approached, right of it the right value, and exactly at the pair the right
/// (older) value is returned. Queries past the last node clamp to its value.
pub struct StateView<'a> {
    boundary: Option<f64>,
    xi: &'a [f64],
    omega: &'a [f64],
    scheme: InterpScheme,
    ell: f64,
    integral: OnceCell<f64>,
}

impl<'a> StateView<'a> {
    pub fn new(
        boundary: Option<f64>,
        xi: &'a [f64],
        omega: &'a [f64],
        scheme: InterpScheme,
        ell: f64,
    ) -> Self {
        assert_eq!(xi.len(), omega.len());
        assert!(!xi.is_empty(), "state view needs at least one node");
        let boundary = boundary.filter(|_| xi[0] > BOUNDARY_DEDUP);
        Self {
            boundary,
            xi,
            omega,
            scheme,
            ell,
            integral: OnceCell::new(),
        }
    }

    /// Boundary value if it is part of the grid.
    pub fn boundary(&self) -> Option<f64> {
        self.boundary
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.xi.iter().copied().zip(self.omega.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn scheme(&self) -> InterpScheme {
        self.scheme
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// The interpolation grid including the boundary point when present.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.xi.len() + 1);
        if let Some(u) = self.boundary {
            out.push((0.0, u));
        }
        out.extend(self.nodes());
        out
    }

    /// Segment bracketing `x`: (left point, right point). `None` for the left
    /// point means `x` lies before the first node with no boundary point;
    /// `None` for the right point means `x` is at or past the last node.
    fn bracket(&self, x: f64) -> (Option<(f64, f64)>, Option<(f64, f64)>) {
        let n = self.xi.len();
        let j = self.xi.partition_point(|&xi| xi <= x);
        let left = if j == 0 {
            self.boundary.map(|u| (0.0, u))
        } else {
            Some((self.xi[j - 1], self.omega[j - 1]))
        };
        let right = (j < n).then(|| (self.xi[j], self.omega[j]));
        (left, right)
    }

    /// Evaluates the interpolant at `x >= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.bracket(x) {
            (Some((_, wl)), None) => wl,
            (None, Some((_, wr))) => wr,
            (None, None) => unreachable!("view has at least one node"),
            (Some((xl, wl)), Some((xr, wr))) => {
                let span = xr - xl;
                if span <= 0.0 {
                    return wl;
                }
                match self.scheme {
                    InterpScheme::Linear => {
                        let s = ((x - xl) / span).clamp(0.0, 1.0);
                        wl + s * (wr - wl)
                    }
                    InterpScheme::Nearest => {
                        if x - xl <= xr - x {
                            wl
                        } else {
                            wr
                        }
                    }
                }
            }
        }
    }

    /// Integral of the interpolant over `[0, ell]`, cached per view.
    ///
    /// For the linear scheme this is the trapezoidal rule on the grid
    /// clipped to `[0, ell]`.
    pub fn integral(&self) -> f64 {
        *self.integral.get_or_init(|| self.integrate(0.0, self.ell))
    }

    /// Integral of the interpolant over `[a, b]`, `0 <= a <= b`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let grid = self.grid();
        let mut total = 0.0;
        // below the first grid point the value is constant
        let (x0, w0) = grid[0];
        if a < x0 {
            total += w0 * (b.min(x0) - a);
        }
        for seg in grid.windows(2) {
            let (xl, wl) = seg[0];
            let (xr, wr) = seg[1];
            let lo = xl.max(a);
            let hi = xr.min(b);
            if hi <= lo || xr <= xl {
                continue;
            }
            total += match self.scheme {
                InterpScheme::Linear => {
                    let at = |x: f64| wl + (wr - wl) * (x - xl) / (xr - xl);
                    0.5 * (at(lo) + at(hi)) * (hi - lo)
                }
                InterpScheme::Nearest => {
                    let mid = 0.5 * (xl + xr);
                    let left = (hi.min(mid) - lo).max(0.0);
                    let right = (hi - lo.max(mid)).max(0.0);
                    wl * left + wr * right
                }
            };
        }
        let (xn, wn) = *grid.last().unwrap();
        if b > xn {
            total += wn * (b - a.max(xn));
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view<'a>(u: f64, xi: &'a [f64], w: &'a [f64], s: InterpScheme) -> StateView<'a> {
        StateView::new(Some(u), xi, w, s, 1.0)
    }

    #[test]
    fn linear_midpoint() {
        let v = view(1.0, &[0.5, 1.0], &[0.0, 2.0], InterpScheme::Linear);
        assert_eq!(v.eval(0.25), 0.5);
        assert_eq!(v.eval(0.75), 1.0);
    }

    #[test]
    fn nearest_picks_closest_abscissa() {
        let v = view(1.0, &[0.4, 1.0], &[0.0, 2.0], InterpScheme::Nearest);
        assert_eq!(v.eval(0.25), 0.0);
        assert_eq!(v.eval(0.1), 1.0);
    }

    #[test]
    fn reproduces_nodes() {
        let xi = [0.1, 0.3, 0.7, 1.2];
        let w = [3.0, -1.0, 4.0, 1.5];
        for s in [InterpScheme::Linear, InterpScheme::Nearest] {
            let v = view(9.0, &xi, &w, s);
            assert_eq!(v.eval(0.0), 9.0);
            for (x, y) in xi.iter().zip(w) {
                assert_eq!(v.eval(*x), y);
            }
        }
    }

    #[test]
    fn clamps_past_last_node() {
        let v = view(0.0, &[0.5, 0.9], &[1.0, 2.0], InterpScheme::Linear);
        assert_eq!(v.eval(1.0), 2.0);
        assert_eq!(v.eval(10.0), 2.0);
    }

    #[test]
    fn jump_pair_limits() {
        let xi = [0.0, 0.5, 0.5, 1.0];
        let w = [0.0, 0.0, 1.0, 1.0];
        let v = view(0.0, &xi, &w, InterpScheme::Linear);
        assert_eq!(v.eval(0.5 - 1e-9), 0.0);
        assert_eq!(v.eval(0.5), 1.0);
        assert_eq!(v.eval(0.5 + 1e-9), 1.0);
        assert!((v.integral() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_dropped_when_newest_node_at_origin() {
        let v = view(5.0, &[0.0, 1.0], &[1.0, 1.0], InterpScheme::Linear);
        assert_eq!(v.boundary(), None);
        assert_eq!(v.grid(), vec![(0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(v.eval(0.0), 1.0);
    }

    #[test]
    fn missing_boundary_extends_first_node() {
        let v = StateView::new(None, &[0.2, 1.0], &[3.0, 1.0], InterpScheme::Linear, 1.0);
        assert_eq!(v.eval(0.0), 3.0);
        assert!((v.integral() - (0.2 * 3.0 + 0.8 * 2.0)).abs() < 1e-14);
    }

    #[test]
    fn integral_clips_to_domain() {
        // w = x on [0, 2], integrate to ell = 1
        let v = view(0.0, &[0.5, 2.0], &[0.5, 2.0], InterpScheme::Linear);
        assert!((v.integral() - 0.5).abs() < 1e-15);
        let n = view(0.0, &[1.0, 2.0], &[1.0, 2.0], InterpScheme::Nearest);
        // 0 on [0, .5), 1 on [.5, 1]
        assert!((n.integral() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn slightly_disordered_nodes_do_not_extrapolate() {
        let xi = [0.2, 0.5, 0.5 - 1e-9, 1.0];
        let w = [0.0, 1.0, 2.0, 3.0];
        let v = view(0.0, &xi, &w, InterpScheme::Linear);
        for k in 0..=200 {
            let y = v.eval(k as f64 * 0.006);
            assert!((0.0..=3.0).contains(&y), "{y}");
        }
    }
}
