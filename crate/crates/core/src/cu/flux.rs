use crate::geometry::Point;
use crate::state::{Conserved, PhysicsParams};

/// Primitive point value with its water depth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointValue {
    pub w: f64,
    pub h: f64,
    pub u: f64,
    pub v: f64,
    pub rho: f64,
}

impl PointValue {
    /// Recover velocities and density from conserved values at bottom height `b`.
    pub fn from_conserved(c: Conserved, b: f64) -> Self {
        let h = c.w - b;
        if h > 0.0 {
            PointValue { w: c.w, h, u: c.hu / h, v: c.hv / h, rho: c.hrho / h }
        } else {
            PointValue { w: c.w, h: h.max(0.0), u: 0.0, v: 0.0, rho: 0.0 }
        }
    }

    #[inline]
    pub fn conserved(&self) -> [f64; 4] {
        [self.w, self.h * self.u, self.h * self.v, self.h * self.rho]
    }

    /// `(F, G)` evaluated from the primitive form.
    #[inline]
    fn fluxes(&self, p: &PhysicsParams) -> ([f64; 4], [f64; 4]) {
        let h = self.h;
        let hu = h * self.u;
        let hv = h * self.v;
        let pres = p.half_g_over_rho0() * self.rho * h * h;
        (
            [hu, hu * self.u + pres, hu * self.v, hu * self.rho],
            [hv, hv * self.u, hv * self.v + pres, hv * self.rho],
        )
    }

    #[inline]
    fn celerity(&self, p: &PhysicsParams) -> f64 {
        (p.g / p.rho0 * self.h * self.rho).max(0.0).sqrt()
    }
}

/// Physical fluxes `F(U)` and `G(U)` for conserved values over bottom `b`.
pub fn flux_vectors(u: Conserved, b: f64, p: &PhysicsParams) -> ([f64; 4], [f64; 4]) {
    let h = u.w - b;
    if h <= 0.0 {
        return ([0.0; 4], [0.0; 4]);
    }
    let pres = p.half_g_over_rho0() * u.hrho * h;
    (
        [u.hu, u.hu * u.hu / h + pres, u.hu * u.hv / h, u.hu * u.hrho / h],
        [u.hv, u.hu * u.hv / h, u.hv * u.hv / h + pres, u.hv * u.hrho / h],
    )
}

/// One-sided local speeds `(a_in, a_out)` across an edge with outward normal
/// `n`, given the trace inside the cell and the trace from the neighbor.
pub fn local_speeds(inner: &PointValue, outer: &PointValue, n: Point, p: &PhysicsParams) -> (f64, f64) {
    let un_i = n[0] * inner.u + n[1] * inner.v;
    let un_o = n[0] * outer.u + n[1] * outer.v;
    let c_i = inner.celerity(p);
    let c_o = outer.celerity(p);
    let a_in = -(un_i - c_i).min(un_o - c_o).min(0.0);
    let a_out = (un_i + c_i).max(un_o + c_o).max(0.0);
    (a_in, a_out)
}

/// Flux through one edge together with the speeds used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFlux {
    pub flux: [f64; 4],
    pub a_in: f64,
    pub a_out: f64,
}

#[inline]
pub(crate) fn edge_flux_pv(inner: &PointValue, outer: &PointValue, n: Point, len: f64, p: &PhysicsParams) -> EdgeFlux {
    let (a_in, a_out) = local_speeds(inner, outer, n, p);
    let (fi, gi) = inner.fluxes(p);
    let (fo, go) = outer.fluxes(p);
    let mut flux = [0.0; 4];
    let sum = a_in + a_out;
    if sum < p.sigma {
        let (c, s) = (0.5 * len * n[0], 0.5 * len * n[1]);
        for m in 0..4 {
            flux[m] = c * (fo[m] + fi[m]) + s * (go[m] + gi[m]);
        }
    } else {
        let ui = inner.conserved();
        let uo = outer.conserved();
        let c = len * n[0] / sum;
        let s = len * n[1] / sum;
        let d = len * a_in * a_out / sum;
        for m in 0..4 {
            flux[m] = c * (a_in * fo[m] + a_out * fi[m]) + s * (a_in * go[m] + a_out * gi[m]) - d * (uo[m] - ui[m]);
        }
    }
    EdgeFlux { flux, a_in, a_out }
}

/// Central-upwind numerical flux through an edge of length `len` with
/// outward unit normal `n`. `inner` is the trace of the cell, `outer` the
/// trace of its neighbor, both over the edge-midpoint bottom `b`.
pub fn edge_flux(inner: Conserved, outer: Conserved, b: f64, n: Point, len: f64, p: &PhysicsParams) -> EdgeFlux {
    edge_flux_pv(&PointValue::from_conserved(inner, b), &PointValue::from_conserved(outer, b), n, len, p)
}

/// Central-upwind flux for a passively transported scalar `q` with normal
/// velocities `un_in` (cell side) and `un_out` (neighbor side). Returns the
/// flux and the effective normal velocity through the edge, both scaled by
/// `len`; the latter feeds the discrete divergence.
#[inline]
pub fn scalar_edge_flux(un_in: f64, un_out: f64, q_in: f64, q_out: f64, len: f64, sigma: f64) -> (f64, f64) {
    let a_out = un_in.max(un_out).max(0.0);
    let a_in = -un_in.min(un_out).min(0.0);
    let sum = a_in + a_out;
    if sum < sigma {
        let half = 0.5 * len;
        (half * (un_out * q_out + un_in * q_in), half * (un_out + un_in))
    } else {
        let r = len / sum;
        (
            r * (a_in * un_out * q_out + a_out * un_in * q_in - a_in * a_out * (q_out - q_in)),
            r * (a_in * un_out + a_out * un_in),
        )
    }
}
