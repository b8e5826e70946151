//! Approximate Riemann solver used to build edge traces of mixed cells.
//!
//! States are rotated into the frame of the edge normal. The solver is of
//! HLL type with an explicit contact wave: the two intermediate states share
//! the contact speed and pressure `g rho h^2 / (2 rho0)` and keep the density
//! of their side.

use crate::geometry::Point;
use crate::state::PhysicsParams;

/// A primitive state in the edge frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameState {
    pub w: f64,
    /// Normal velocity.
    pub un: f64,
    /// Tangential velocity.
    pub ut: f64,
    pub rho: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intermediate {
    pub left: FrameState,
    pub right: FrameState,
    /// Set when no wet intermediate state exists; the inputs are returned.
    pub vacuum: bool,
    /// Left wave, contact and right wave speeds.
    pub speeds: [f64; 3],
}

#[inline]
pub fn to_frame(u: f64, v: f64, n: Point) -> (f64, f64) {
    (u * n[0] + v * n[1], -u * n[1] + v * n[0])
}

#[inline]
pub fn from_frame(un: f64, ut: f64, n: Point) -> (f64, f64) {
    (un * n[0] - ut * n[1], un * n[1] + ut * n[0])
}

/// Intermediate states on either side of the contact.
pub fn solve_intermediate(l: &FrameState, r: &FrameState, p: &PhysicsParams) -> Intermediate {
    let fallback = Intermediate { left: *l, right: *r, vacuum: true, speeds: [0.0; 3] };
    // Depths are measured from the higher bottom so that equal free surfaces
    // at rest give equal depths.
    let bs = l.b.max(r.b);
    let hl = (l.w - bs).max(0.0);
    let hr = (r.w - bs).max(0.0);
    if hl <= 0.0 && hr <= 0.0 {
        return fallback;
    }
    let k = p.half_g_over_rho0();
    let pl = k * l.rho * hl * hl;
    let pr = k * r.rho * hr * hr;
    let cl = (p.g / p.rho0 * l.rho * hl).max(0.0).sqrt();
    let cr = (p.g / p.rho0 * r.rho * hr).max(0.0).sqrt();
    let sl = (l.un - cl).min(r.un - cr);
    let sr = (l.un + cl).max(r.un + cr);
    let ml = hl * (sl - l.un);
    let mr = hr * (sr - r.un);
    let den = ml - mr;
    if !(den < 0.0) {
        return fallback;
    }
    let s = (pr - pl + ml * l.un - mr * r.un) / den;
    let hsl = if hl > 0.0 { ml / (sl - s) } else { 0.0 };
    let hsr = if hr > 0.0 { mr / (sr - s) } else { 0.0 };
    if !(hsl.is_finite() && hsr.is_finite()) || hsl < 0.0 || hsr < 0.0 {
        return fallback;
    }
    Intermediate {
        left: FrameState { w: hsl + bs, un: s, ut: l.ut, rho: l.rho, b: bs },
        right: FrameState { w: hsr + bs, un: s, ut: r.ut, rho: r.rho, b: bs },
        vacuum: false,
        speeds: [sl, s, sr],
    }
}

/// Primitive state `(w, u, v, rho)` of the Riemann solution on the edge
/// itself (`x / t = 0`), with `n` pointing from `left` to `right`.
pub fn sampled_edge_state(left: [f64; 4], right: [f64; 4], b_left: f64, b_right: f64, n: Point, p: &PhysicsParams) -> [f64; 4] {
    let (unl, utl) = to_frame(left[1], left[2], n);
    let (unr, utr) = to_frame(right[1], right[2], n);
    let l = FrameState { w: left[0], un: unl, ut: utl, rho: left[3], b: b_left };
    let r = FrameState { w: right[0], un: unr, ut: utr, rho: right[3], b: b_right };
    let star = solve_intermediate(&l, &r, p);
    if star.vacuum {
        return right;
    }
    let [sl, s, sr] = star.speeds;
    let pick = if sl >= 0.0 {
        return left;
    } else if s >= 0.0 {
        star.left
    } else if sr > 0.0 {
        star.right
    } else {
        return right;
    };
    let (u, v) = from_frame(pick.un, pick.ut, n);
    [pick.w, u, v, pick.rho]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> PhysicsParams {
        PhysicsParams::default()
    }

    #[test]
    fn identical_states_are_reproduced() {
        let s = FrameState { w: 1.7, un: 0.3, ut: -0.2, rho: 1200.0, b: 0.1 };
        let r = solve_intermediate(&s, &s, &p());
        for st in [r.left, r.right] {
            assert!((st.w - s.w).abs() < 1e-14);
            assert!((st.un - s.un).abs() < 1e-14);
            assert_eq!(st.ut, s.ut);
            assert_eq!(st.rho, s.rho);
        }
    }

    #[test]
    fn hydrostatic_density_jump_is_steady() {
        let rho0 = 997.0;
        let l = FrameState { w: 3.0, un: 0.0, ut: 0.0, rho: 4.0 * rho0 / 3.0, b: 0.0 };
        let r = FrameState { w: 2.0, un: 0.0, ut: 0.0, rho: 3.0 * rho0, b: 0.0 };
        let s = solve_intermediate(&l, &r, &p());
        assert!((s.right.w - 2.0).abs() < 1e-14);
        assert!(s.right.un.abs() < 1e-14);
        assert!((s.left.w - 3.0).abs() < 1e-14);
    }

    #[test]
    fn moving_contact_is_sampled_on_the_upwind_side() {
        let rho0 = 997.0;
        // Equal pressure and velocity: only the contact moves.
        let l = [0.5_f64.sqrt(), 0.4, 0.1, 2.0 * rho0];
        let r = [1.0, 0.4, -0.3, rho0];
        let s = sampled_edge_state(l, r, 0.0, 0.0, [1.0, 0.0], &p());
        assert!((s[0] - l[0]).abs() < 1e-14 && (s[1] - 0.4).abs() < 1e-14);
        assert_eq!((s[2], s[3]), (0.1, 2.0 * rho0));
        let s = sampled_edge_state(l, r, 0.0, 0.0, [-1.0, 0.0], &p());
        // Seen along -x the flow goes toward the left state.
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 0.4).abs() < 1e-14);
        assert_eq!((s[2], s[3]), (-0.3, rho0));
    }

    #[test]
    fn frame_rotation_round_trips() {
        let n = [0.6, 0.8];
        let (a, b) = to_frame(1.5, -0.25, n);
        let (u, v) = from_frame(a, b, n);
        assert!((u - 1.5).abs() < 1e-15 && (v + 0.25).abs() < 1e-15);
    }
}
