//! Piecewise-linear reconstruction of `(w, u, v, rho, phi, f)` with a
//! scaling limiter that keeps edge traces inside the local extrema.

use crate::geometry::Point;
use crate::state::{PhysicsParams, Vars, FRAC, HR, HU, HV, PHI, W};

/// Velocity and density recovery that stays finite on nearly dry cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Desingularization {
    /// Square of the largest cell area.
    pub tau: f64,
    /// Absolute density floor, `eps * rho0`.
    pub rho_floor: f64,
}

impl Desingularization {
    pub fn new(max_area: f64, p: &PhysicsParams) -> Self {
        Desingularization { tau: max_area * max_area, rho_floor: p.eps * p.rho0 }
    }

    /// `2 h q / (h^2 + max(h^2, tau))`, equal to `q / h` whenever `h^2 >= tau`.
    #[inline]
    pub fn ratio(&self, h: f64, q: f64) -> f64 {
        let h2 = h * h;
        2.0 * h * q / (h2 + h2.max(self.tau))
    }

    #[inline]
    pub fn near_dry(&self, h: f64) -> bool {
        h * h < self.tau
    }
}

/// Primitive values `(w, u, v, rho, phi, f)` of a cell average over bottom `b`.
#[inline]
pub fn primitive_center(v: &Vars, b: f64, d: &Desingularization) -> Vars {
    let h = (v[W] - b).max(0.0);
    let mut rho = d.ratio(h, v[HR]);
    if d.near_dry(h) {
        rho = rho.max(d.rho_floor);
    }
    [v[W], d.ratio(h, v[HU]), d.ratio(h, v[HV]), rho, v[PHI], v[FRAC]]
}

/// Limiter result for one scalar component on one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitedTraces {
    pub theta: f64,
    pub traces: [f64; 3],
}

/// Largest `theta` in `[0, 1]` keeping `center + theta * dev[k]` within
/// `[lo[k], hi[k]]` on every edge. Edges with zero deviation impose nothing.
#[inline]
pub fn limiter_theta(center: f64, lo: [f64; 3], hi: [f64; 3], dev: [f64; 3]) -> f64 {
    let mut theta = 1.0f64;
    for k in 0..3 {
        let d = dev[k];
        if d == 0.0 || !d.is_finite() {
            continue;
        }
        let lim = if d > 0.0 { (hi[k] - center) / d } else { (lo[k] - center) / d };
        if lim < theta {
            theta = lim;
        }
    }
    if theta > 0.0 {
        theta
    } else {
        0.0
    }
}

/// Scale the raw edge traces of one component toward the cell value so
/// that each lies between the cell value and the neighbor value across
/// that edge.
pub fn scaling_limiter(center: f64, neighbors: [f64; 3], raw: [f64; 3]) -> LimitedTraces {
    let lo = [center.min(neighbors[0]), center.min(neighbors[1]), center.min(neighbors[2])];
    let hi = [center.max(neighbors[0]), center.max(neighbors[1]), center.max(neighbors[2])];
    let dev = [raw[0] - center, raw[1] - center, raw[2] - center];
    let theta = limiter_theta(center, lo, hi, dev);
    LimitedTraces { theta, traces: [center + theta * dev[0], center + theta * dev[1], center + theta * dev[2]] }
}

/// Least-squares gradient from centroid offsets and value differences.
/// Returns `None` when the offsets do not span the plane.
pub fn lsq_gradient(offsets: &[Point], deltas: &[f64]) -> Option<Point> {
    let (mut a, mut b, mut c, mut rx, mut ry) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (d, &q) in offsets.iter().zip(deltas) {
        a += d[0] * d[0];
        b += d[0] * d[1];
        c += d[1] * d[1];
        rx += d[0] * q;
        ry += d[1] * q;
    }
    let det = a * c - b * b;
    if !(det > 1e-12 * (a * c).max(f64::MIN_POSITIVE)) {
        return None;
    }
    Some([(c * rx - b * ry) / det, (a * ry - b * rx) / det])
}
