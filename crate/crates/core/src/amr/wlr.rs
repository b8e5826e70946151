use crate::mesh::{Bathymetry, TriMesh};
use crate::reconstruction::Desingularization;
use crate::state::{State, HR, HU, HV, W};

/// Weak local residual of the mass and density-mass equations at every
/// mesh node, for the step `old -> new` of length `dt`, normalized by
/// `dt * max|T|` (and the density-mass part also by `rho0`). Returns
/// `(E_w, E_hrho)` per node.
pub fn weak_local_residual(mesh: &TriMesh, bathy: &Bathymetry, desing: &Desingularization, rho0: f64, old: &State, new: &State, dt: f64) -> Vec<[f64; 2]> {
    let mut res = vec![[0.0; 2]; mesh.n_vertices()];
    let half = 0.5 * dt;
    for j in 0..mesh.n_cells() {
        let g = &mesh.geom[j];
        let a = g.area;
        let c = mesh.cells[j];
        let p = [mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]];
        let (uo, un) = (&old.u[j], &new.u[j]);
        let b = bathy.center[j];
        let rho_flux = |u: &[f64; 6]| {
            let h = (u[W] - b).max(0.0);
            let r = desing.ratio(h, u[HR]);
            (u[HU] * r, u[HV] * r)
        };
        let (fo, go) = rho_flux(uo);
        let (fnw, gnw) = rho_flux(un);
        let dw = a / 3.0 * (uo[W] - un[W]);
        let dr = a / 3.0 * (uo[HR] - un[HR]);
        let qx = half * a * (uo[HU] + un[HU]);
        let qy = half * a * (uo[HV] + un[HV]);
        let rx = half * a * (fo + fnw);
        let ry = half * a * (go + gnw);
        for i in 0..3 {
            let (p2, p3) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            // Gradient of the hat function of node i on this cell.
            let gx = (p2[1] - p3[1]) / (2.0 * a);
            let gy = (p3[0] - p2[0]) / (2.0 * a);
            let r = &mut res[c[i]];
            r[0] += dw + gx * qx + gy * qy;
            r[1] += dr + gx * rx + gy * ry;
        }
    }
    let scale = 1.0 / (dt * mesh.max_area());
    for r in &mut res {
        r[0] *= scale;
        r[1] *= scale / rho0;
    }
    res
}

/// Cell indicator: largest absolute nodal residual over the cell's nodes.
pub fn cell_indicator(mesh: &TriMesh, node_res: &[[f64; 2]]) -> Vec<f64> {
    mesh.cells
        .iter()
        .map(|c| c.iter().map(|&v| node_res[v][0].abs().max(node_res[v][1].abs())).fold(0.0, f64::max))
        .collect()
}
