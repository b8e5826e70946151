use crate::geometry::Point;
use crate::state::PhysicsParams;

/// Per-cell data needed by the bottom-slope source quadrature.
#[derive(Debug, Clone, Copy)]
pub struct SourceInput {
    pub area: f64,
    pub edge_len: [f64; 3],
    pub normal: [Point; 3],
    /// Traces of `w` and `rho` at the edge midpoints, and the bottom there.
    pub w_mid: [f64; 3],
    pub rho_mid: [f64; 3],
    pub b_mid: [f64; 3],
    /// Values of the limited `w` and `rho` planes at the vertices, and the bottom there.
    pub w_vert: [f64; 3],
    pub rho_vert: [f64; 3],
    pub b_vert: [f64; 3],
    /// Limited gradients of `w` and `rho`.
    pub grad_w: Point,
    pub grad_rho: Point,
}

/// Cell average of the momentum source `(S2, S3)`.
///
/// The bottom slope is integrated by parts so that a lake at rest (constant
/// `w` and `rho`, or flat bottom with constant `rho h^2`) is balanced exactly
/// by the edge fluxes.
pub fn source_quadrature(s: &SourceInput, p: &PhysicsParams) -> [f64; 2] {
    let mut bx = 0.0;
    let mut by = 0.0;
    for k in 0..3 {
        let h = s.w_mid[k] - s.b_mid[k];
        let t = s.edge_len[k] * s.rho_mid[k] * h * h;
        bx += t * s.normal[k][0];
        by += t * s.normal[k][1];
    }
    let c1 = 0.5 * p.g / (s.area * p.rho0);
    let mut vx = 0.0;
    let mut vy = 0.0;
    let mut qx = 0.0;
    let mut qy = 0.0;
    for i in 0..3 {
        let h = s.w_vert[i] - s.b_vert[i];
        vx += s.rho_vert[i] * h * s.grad_w[0];
        vy += s.rho_vert[i] * h * s.grad_w[1];
        qx += s.grad_rho[0] * h * h;
        qy += s.grad_rho[1] * h * h;
    }
    let c2 = p.g / (3.0 * p.rho0);
    let c3 = p.g / (6.0 * p.rho0);
    [c1 * bx - c2 * vx - c3 * qx, c1 * by - c2 * vy - c3 * qy]
}
