use super::TriMesh;
use crate::error::{Result, SwedError};
use serde::{Deserialize, Serialize};

/// Analytic bottom profiles used by the built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BottomProfile {
    Flat,
    /// Two Gaussian humps centered at `(-0.5, -0.5)` and `(0.5, 0.5)`.
    TwoHumps,
    /// A single Gaussian hump of height 0.5 at the origin.
    CenterHump,
}

impl BottomProfile {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            BottomProfile::Flat => 0.0,
            BottomProfile::TwoHumps => {
                if x < 0.0 {
                    0.5 * (-100.0 * ((x + 0.5).powi(2) + (y + 0.5).powi(2))).exp()
                } else {
                    0.6 * (-100.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp()
                }
            }
            BottomProfile::CenterHump => 0.5 * (-100.0 * (x * x + y * y)).exp(),
        }
    }
}

/// Piecewise-linear bottom defined by its vertex samples.
#[derive(Debug, Clone)]
pub struct Bathymetry {
    /// Value at every mesh vertex.
    pub vertex: Vec<f64>,
    /// Value at the midpoint of every cell edge.
    pub edge: Vec<[f64; 3]>,
    /// Cell average (mean of the three vertex values).
    pub center: Vec<f64>,
}

impl Bathymetry {
    pub fn from_vertex_values(mesh: &TriMesh, vertex: Vec<f64>) -> Result<Self> {
        if vertex.len() != mesh.n_vertices() {
            return Err(SwedError::InvalidData(format!("{} bathymetry samples for {} vertices", vertex.len(), mesh.n_vertices())));
        }
        if let Some(v) = vertex.iter().position(|b| !b.is_finite()) {
            return Err(SwedError::InvalidData(format!("non-finite bathymetry at vertex {v}")));
        }
        let mut edge = Vec::with_capacity(mesh.n_cells());
        let mut center = Vec::with_capacity(mesh.n_cells());
        for c in &mesh.cells {
            let b = [vertex[c[0]], vertex[c[1]], vertex[c[2]]];
            edge.push([0.5 * (b[1] + b[2]), 0.5 * (b[2] + b[0]), 0.5 * (b[0] + b[1])]);
            center.push((b[0] + b[1] + b[2]) / 3.0);
        }
        Ok(Bathymetry { vertex, edge, center })
    }

    /// Bottom value at local vertex `i` of cell `j`.
    #[inline]
    pub fn at_corner(&self, mesh: &TriMesh, j: usize, i: usize) -> f64 {
        self.vertex[mesh.cells[j][i]]
    }
}

/// Sample `f` at the mesh vertices and derive edge and cell values.
pub fn sample_bathymetry(mesh: &TriMesh, f: impl Fn(f64, f64) -> f64) -> Result<Bathymetry> {
    let vertex = mesh.vertices.iter().map(|p| f(p[0], p[1])).collect();
    Bathymetry::from_vertex_values(mesh, vertex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform, Domain};

    #[test]
    fn hump_peak_value() {
        assert!((BottomProfile::TwoHumps.eval(-0.5, -0.5) - 0.5).abs() < 1e-15);
        assert!((BottomProfile::TwoHumps.eval(0.5, 0.5) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn linear_bottom_is_exact_at_midpoints() {
        let m = build_uniform(3, 3, Domain::SQUARE).unwrap();
        let b = sample_bathymetry(&m, |x, y| 2.0 * x - y + 0.25).unwrap();
        for j in 0..m.n_cells() {
            for k in 0..3 {
                let p = m.geom[j].midpoint[k];
                assert!((b.edge[j][k] - (2.0 * p[0] - p[1] + 0.25)).abs() < 1e-14);
            }
            let c = m.geom[j].centroid;
            assert!((b.center[j] - (2.0 * c[0] - c[1] + 0.25)).abs() < 1e-14);
        }
    }

    #[test]
    fn nan_sample_is_rejected() {
        let m = build_uniform(1, 1, Domain::SQUARE).unwrap();
        assert!(matches!(sample_bathymetry(&m, |x, _| if x > 0.5 { f64::NAN } else { 0.0 }), Err(SwedError::InvalidData(_))));
    }
}
