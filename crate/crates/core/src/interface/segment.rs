use crate::geometry::{self, Point};
use crate::mesh::TriMesh;
use crate::state::{State, FRAC, PHI};
use nalgebra::{DMatrix, DVector};

/// Straight interface segment inside a cell. Fluid 1 occupies the part of
/// the cell where `normal . x >= alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub a: Point,
    pub b: Point,
    pub normal: Point,
    pub alpha: f64,
    /// Built from the vertex level-set zero crossings instead of the
    /// volume fraction.
    pub fallback: bool,
}

/// Unit normal of the interface in cell `j` from a quadratic least-squares
/// fit of the level set over the vertex-sharing stencil, pointing toward
/// fluid 1. Falls back to a linear fit when the quadratic one is singular.
pub fn interface_normal(mesh: &TriMesh, state: &State, j: usize) -> Option<Point> {
    let mut pts = vec![j];
    pts.extend(mesh.vertex_stencil(j));
    let c = mesh.geom[j].centroid;
    let s = mesh.geom[j].diameter;
    let local: Vec<(f64, f64, f64)> = pts
        .iter()
        .map(|&i| {
            let p = mesh.geom[i].centroid;
            ((p[0] - c[0]) / s, (p[1] - c[1]) / s, state.u[i][PHI])
        })
        .collect();
    let fit = |cols: usize| -> Option<DVector<f64>> {
        if local.len() < cols {
            return None;
        }
        let a = DMatrix::from_fn(local.len(), cols, |r, k| {
            let (x, y, _) = local[r];
            let terms = [x, y, 1.0, x * x, x * y, y * y];
            terms[k]
        });
        let b = DVector::from_iterator(local.len(), local.iter().map(|t| t.2));
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-10 * smax) {
            return None;
        }
        svd.solve(&b, 1e-14 * smax).ok()
    };
    for cols in [6, 3] {
        if let Some(coef) = fit(cols) {
            let (d, e) = (coef[0], coef[1]);
            let norm = d.hypot(e);
            if norm > 0.0 && norm.is_finite() {
                return Some([d / norm, e / norm]);
            }
        }
    }
    None
}

/// Chord orthogonal to `n` cutting from the triangle the fraction `f` of its
/// area on the side `n . x >= alpha`. `None` when `f` is not strictly
/// between 0 and 1 or `n` is degenerate.
pub fn interface_endpoints(tri: &[Point; 3], n: Point, f: f64) -> Option<Chord> {
    if !(f > 0.0 && f < 1.0) || !(n[0].is_finite() && n[1].is_finite()) || n[0] == 0.0 && n[1] == 0.0 {
        return None;
    }
    let mut idx = [0usize, 1, 2];
    let s = [geometry::dot(n, tri[0]), geometry::dot(n, tri[1]), geometry::dot(n, tri[2])];
    idx.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let (s0, s1, s2) = (s[idx[0]], s[idx[1]], s[idx[2]]);
    let span = s2 - s0;
    if !(span > 0.0) {
        return None;
    }
    // Fraction above s1 is (s2 - s1) / span; the area above alpha is a
    // similar triangle at the top vertex or the complement of one at the bottom.
    let top = (s2 - s1) / span;
    let alpha = if f <= top { s2 - (f * span * (s2 - s1)).sqrt() } else { s0 + ((1.0 - f) * span * (s1 - s0)).sqrt() };
    let pts = chord_points(tri, n, alpha, span)?;
    Some(Chord { a: pts.0, b: pts.1, normal: n, alpha, fallback: false })
}

fn chord_points(tri: &[Point; 3], n: Point, alpha: f64, span: f64) -> Option<(Point, Point)> {
    let clipped = geometry::clip_halfplane(tri, n, alpha);
    let tol = 1e-12 * span.max(1e-300);
    let mut on: Vec<Point> = Vec::with_capacity(2);
    for p in clipped {
        if (geometry::dot(n, p) - alpha).abs() <= tol && !on.iter().any(|q| geometry::dist(*q, p) <= tol) {
            on.push(p);
        }
    }
    if on.len() == 2 {
        Some((on[0], on[1]))
    } else {
        None
    }
}

/// Chord through the zero crossings of the linear interpolant of the
/// vertex level-set values.
pub fn levelset_chord(tri: &[Point; 3], vphi: [f64; 3]) -> Option<Chord> {
    let d = geometry::orient(tri[0], tri[1], tri[2]);
    let gx = (vphi[0] * (tri[1][1] - tri[2][1]) + vphi[1] * (tri[2][1] - tri[0][1]) + vphi[2] * (tri[0][1] - tri[1][1])) / d;
    let gy = (vphi[0] * (tri[2][0] - tri[1][0]) + vphi[1] * (tri[0][0] - tri[2][0]) + vphi[2] * (tri[1][0] - tri[0][0])) / d;
    let norm = gx.hypot(gy);
    if !(norm > 0.0 && norm.is_finite()) {
        return None;
    }
    let n = [gx / norm, gy / norm];
    // phi = phi_0 + grad . (x - x_0) vanishes where n . x = alpha.
    let alpha = geometry::dot(n, tri[0]) - vphi[0] / norm;
    let s: Vec<f64> = tri.iter().map(|p| geometry::dot(n, *p)).collect();
    let span = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - s.iter().cloned().fold(f64::INFINITY, f64::min);
    let (a, b) = chord_points(tri, n, alpha, span)?;
    Some(Chord { a, b, normal: n, alpha, fallback: true })
}

/// Fraction of the area of `tri` lying on the fluid-1 side of `chord`'s line.
pub fn fluid1_fraction_below_chord(tri: &[Point; 3], chord: &Chord) -> f64 {
    let area = geometry::triangle_area(tri);
    let part = geometry::polygon_area(&geometry::clip_halfplane(tri, chord.normal, chord.alpha));
    (part / area).clamp(0.0, 1.0)
}

pub(crate) fn cell_chord(mesh: &TriMesh, state: &State, vertex_phi: &[f64], j: usize) -> Option<Chord> {
    let tri = mesh.triangle(j);
    let f = state.u[j][FRAC];
    interface_normal(mesh, state, j).and_then(|n| interface_endpoints(&tri, n, f)).or_else(|| {
        let c = mesh.cells[j];
        levelset_chord(&tri, [vertex_phi[c[0]], vertex_phi[c[1]], vertex_phi[c[2]]])
    })
}
