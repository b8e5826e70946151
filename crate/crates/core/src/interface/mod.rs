//! Interface tracking between the two fluids: vertex level-set values,
//! cell classification, interface segments and the per-fluid density
//! correction.

mod segment;

pub use segment::{fluid1_fraction_below_chord, interface_endpoints, interface_normal, levelset_chord, Chord};

use crate::geometry;
use crate::mesh::{Bathymetry, TriMesh};
use crate::state::{State, HR, PHI, W};

/// Which fluid occupies a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluidClass {
    Fluid1,
    Fluid2,
    Mixed,
}

impl FluidClass {
    pub fn is_single(self) -> bool {
        self != FluidClass::Mixed
    }

    pub fn label(self) -> &'static str {
        match self {
            FluidClass::Fluid1 => "fluid1",
            FluidClass::Fluid2 => "fluid2",
            FluidClass::Mixed => "mixed",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            FluidClass::Fluid1 => 1,
            FluidClass::Fluid2 => 2,
            FluidClass::Mixed => 0,
        }
    }
}

/// Inverse-distance weighted average of the cell level-set values around
/// every vertex.
pub fn vertex_levelset(mesh: &TriMesh, state: &State) -> Vec<f64> {
    (0..mesh.n_vertices())
        .map(|v| {
            let p = mesh.vertices[v];
            let mut num = 0.0;
            let mut den = 0.0;
            for &c in mesh.vertex_cells(v) {
                let wgt = 1.0 / geometry::dist(mesh.geom[c].centroid, p);
                num += wgt * state.u[c][PHI];
                den += wgt;
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect()
}

/// Fraction of a triangle where the linear interpolant of the vertex
/// values `p` is positive.
pub fn levelset_fraction(p: [f64; 3]) -> f64 {
    let pos = p.iter().filter(|&&x| x > 0.0).count();
    // Corner cut off by the zero line at vertex `i`: its value squared over
    // the product of the differences to the other two.
    let corner = |i: usize| {
        let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
        (a * a / ((a - b) * (a - c))).clamp(0.0, 1.0)
    };
    match pos {
        3 => 1.0,
        0 => 0.0,
        1 => corner(p.iter().position(|&x| x > 0.0).unwrap_or(0)),
        _ => 1.0 - corner(p.iter().position(|&x| x <= 0.0).unwrap_or(0)),
    }
}

/// Classify cells by the signs of the vertex level set: all positive is
/// fluid 1, all negative fluid 2, anything else (including zeros) mixed.
pub fn classify(mesh: &TriMesh, vertex_phi: &[f64]) -> Vec<FluidClass> {
    mesh.cells
        .iter()
        .map(|c| {
            let p = [vertex_phi[c[0]], vertex_phi[c[1]], vertex_phi[c[2]]];
            if p.iter().all(|&x| x > 0.0) {
                FluidClass::Fluid1
            } else if p.iter().all(|&x| x < 0.0) {
                FluidClass::Fluid2
            } else {
                FluidClass::Mixed
            }
        })
        .collect()
}

/// Cell classes together with the vertex level set they come from.
#[derive(Debug, Clone, Copy)]
pub struct Phases<'a> {
    pub class: &'a [FluidClass],
    /// Level set at the mesh vertices; may be empty when no cell is mixed.
    pub vertex_phi: &'a [f64],
}

/// Interface snapshot on the active mesh.
#[derive(Debug, Clone)]
pub struct InterfaceState {
    pub vertex_phi: Vec<f64>,
    pub class: Vec<FluidClass>,
    /// Chord of every mixed cell.
    pub segments: Vec<Option<Chord>>,
}

impl InterfaceState {
    pub fn build(mesh: &TriMesh, state: &State) -> Self {
        let vertex_phi = vertex_levelset(mesh, state);
        let class = classify(mesh, &vertex_phi);
        let segments = (0..mesh.n_cells())
            .map(|j| if class[j] == FluidClass::Mixed { segment::cell_chord(mesh, state, &vertex_phi, j) } else { None })
            .collect();
        InterfaceState { vertex_phi, class, segments }
    }
}

/// Outcome of a density correction pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CorrectionReport {
    pub corrected_cells: usize,
    /// Mass of `h rho` that could not be handed to a mixed neighbor.
    pub unassigned_mass: f64,
}

/// Reset `h rho` on single-fluid cells to `h * rho_i` of their fluid and hand
/// the removed mass in equal shares to the mixed edge neighbors.
pub fn correct_densities(mesh: &TriMesh, bathy: &Bathymetry, state: &mut State, class: &[FluidClass], rho: [f64; 2]) -> CorrectionReport {
    let mut report = CorrectionReport::default();
    for j in 0..mesh.n_cells() {
        let r = match class[j] {
            FluidClass::Fluid1 => rho[0],
            FluidClass::Fluid2 => rho[1],
            FluidClass::Mixed => continue,
        };
        let h = (state.u[j][W] - bathy.center[j]).max(0.0);
        let target = h * r;
        let defect = state.u[j][HR] - target;
        state.u[j][HR] = target;
        report.corrected_cells += 1;
        if defect == 0.0 {
            continue;
        }
        let mass = defect * mesh.geom[j].area;
        let mixed: Vec<usize> = mesh.neighbors[j].iter().filter_map(|nb| nb.cell()).filter(|&i| class[i] == FluidClass::Mixed).collect();
        if mixed.is_empty() {
            report.unassigned_mass += mass;
        } else {
            let share = mass / mixed.len() as f64;
            for i in mixed {
                state.u[i][HR] += share / mesh.geom[i].area;
            }
        }
    }
    report
}
