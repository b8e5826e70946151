//! Time-step selection, local time-stepping levels and the two-stage
//! strong-stability-preserving Runge-Kutta scheme.

use crate::error::{Result, SwedError};
use crate::mesh::TriMesh;
use crate::state::Vars;

/// Safety factor and positivity bound of the reference step.
pub const CFL_SAFETY: f64 = 0.9;
pub const CFL_BOUND: f64 = 18.0;
/// Maximum number of step halvings after a positivity failure.
pub const MAX_HALVINGS: u32 = 5;

fn min_altitude(mesh: &TriMesh, j: usize) -> f64 {
    let a = mesh.geom[j].altitude;
    a[0].min(a[1]).min(a[2])
}

/// Per-cell time level: 0 for the coarsest cells, otherwise the smallest
/// `l >= 1` with `2^l >= r_max / r_j`, where `r_j` is the smallest altitude
/// of cell `j` and `r_max` its largest value over the mesh.
pub fn assign_levels(mesh: &TriMesh) -> (Vec<u8>, f64) {
    let r: Vec<f64> = (0..mesh.n_cells()).map(|j| min_altitude(mesh, j)).collect();
    let r_max = r.iter().cloned().fold(0.0, f64::max);
    let levels = r
        .iter()
        .map(|&rj| {
            let ratio = r_max / rj;
            if ratio <= 1.0 + 1e-12 {
                0
            } else {
                let mut l = 1u8;
                while (1u64 << l) as f64 * (1.0 + 1e-12) < ratio {
                    l += 1;
                }
                l
            }
        })
        .collect();
    (levels, r_max)
}

/// Reference step `0.9 r_max / (18 a_max)`, or `still_dt` when every local
/// speed is below `sigma`.
pub fn reference_dt(r_max: f64, a_max: f64, sigma: f64, still_dt: f64) -> f64 {
    if a_max < sigma {
        still_dt
    } else {
        CFL_SAFETY * r_max / (CFL_BOUND * a_max)
    }
}

/// Step of time level `l`: `2^-l dt / max(mu, 1)`.
pub fn level_dt(dt: f64, level: u8, mu: f64) -> f64 {
    dt / (1u64 << level) as f64 / mu.max(1.0)
}

/// One SSPRK2 step `U1 = U + dt L(U)`, `U_new = (U + U1 + dt L(U1)) / 2`.
pub fn ssprk2_substep<F>(u: &[Vars], dt: f64, mut rhs: F) -> Result<Vec<Vars>>
where
    F: FnMut(&[Vars], &mut [Vars]) -> Result<()>,
{
    let n = u.len();
    let mut k = vec![[0.0; 6]; n];
    rhs(u, &mut k)?;
    let u1: Vec<Vars> = u.iter().zip(&k).map(|(a, b)| std::array::from_fn(|m| a[m] + dt * b[m])).collect();
    rhs(&u1, &mut k)?;
    let out = (0..n).map(|j| std::array::from_fn(|m| 0.5 * u[j][m] + 0.5 * (u1[j][m] + dt * k[j][m]))).collect::<Vec<Vars>>();
    if out.iter().flatten().any(|x| !x.is_finite()) {
        return Err(SwedError::Internal("non-finite value after Runge-Kutta step".into()));
    }
    Ok(out)
}

/// Cell, ring and edge lists for every time level of a mesh.
#[derive(Debug, Clone)]
pub struct LevelSchedule {
    pub level: Vec<u8>,
    pub max_level: u8,
    pub r_max: f64,
    pub cells: Vec<Vec<usize>>,
    /// Level cells plus their edge neighbors.
    pub ring: Vec<Vec<usize>>,
    /// Edges touching a level cell.
    pub edges: Vec<Vec<usize>>,
}

impl LevelSchedule {
    pub fn new(mesh: &TriMesh) -> Self {
        let (level, r_max) = assign_levels(mesh);
        let max_level = level.iter().copied().max().unwrap_or(0);
        let nl = max_level as usize + 1;
        let mut cells = vec![Vec::new(); nl];
        for (j, &l) in level.iter().enumerate() {
            cells[l as usize].push(j);
        }
        let mut ring = vec![Vec::new(); nl];
        let mut edges = vec![Vec::new(); nl];
        if nl > 1 {
            let mut mark = vec![usize::MAX; mesh.n_cells()];
            let mut emark = vec![usize::MAX; mesh.edges.len()];
            for l in 0..nl {
                for &j in &cells[l] {
                    for c in std::iter::once(j).chain(mesh.neighbors[j].iter().filter_map(|n| n.cell())) {
                        if mark[c] != l {
                            mark[c] = l;
                            ring[l].push(c);
                        }
                    }
                    for &e in &mesh.cell_edges[j] {
                        if emark[e] != l {
                            emark[e] = l;
                            edges[l].push(e);
                        }
                    }
                }
                ring[l].sort_unstable();
                edges[l].sort_unstable();
            }
        }
        LevelSchedule { level, max_level, r_max, cells, ring, edges }
    }

    pub fn n_levels(&self) -> usize {
        self.max_level as usize + 1
    }
}
