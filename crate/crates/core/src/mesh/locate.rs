use super::TriMesh;
use crate::geometry;

/// Bucket grid for locating the cell that contains a point.
#[derive(Debug, Clone)]
pub struct PointLocator {
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    nx: usize,
    ny: usize,
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl PointLocator {
    pub fn new(mesh: &TriMesh) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &mesh.vertices {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let side = (mesh.n_cells() as f64 / 2.0).sqrt().ceil().max(1.0) as usize;
        let (nx, ny) = (side, side);
        let hx = ((x1 - x0) / nx as f64).max(f64::MIN_POSITIVE);
        let hy = ((y1 - y0) / ny as f64).max(f64::MIN_POSITIVE);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); nx * ny];
        for j in 0..mesh.n_cells() {
            let t = mesh.triangle(j);
            let bx0 = t.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let bx1 = t.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let by0 = t.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let by1 = t.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            let i0 = (((bx0 - x0) / hx).floor().max(0.0) as usize).min(nx - 1);
            let i1 = (((bx1 - x0) / hx).floor().max(0.0) as usize).min(nx - 1);
            let j0 = (((by0 - y0) / hy).floor().max(0.0) as usize).min(ny - 1);
            let j1 = (((by1 - y0) / hy).floor().max(0.0) as usize).min(ny - 1);
            for bj in j0..=j1 {
                for bi in i0..=i1 {
                    buckets[bj * nx + bi].push(j);
                }
            }
        }
        let mut offsets = Vec::with_capacity(nx * ny + 1);
        let mut items = Vec::new();
        offsets.push(0);
        for b in buckets {
            items.extend(b);
            offsets.push(items.len());
        }
        PointLocator { x0, y0, hx, hy, nx, ny, offsets, items }
    }

    /// Index of a cell containing `p`, if any.
    pub fn locate(&self, mesh: &TriMesh, p: [f64; 2]) -> Option<usize> {
        let bi = ((p[0] - self.x0) / self.hx).floor();
        let bj = ((p[1] - self.y0) / self.hy).floor();
        if !(bi >= -1.0 && bj >= -1.0) || bi > self.nx as f64 || bj > self.ny as f64 {
            return None;
        }
        let bi = (bi.max(0.0) as usize).min(self.nx - 1);
        let bj = (bj.max(0.0) as usize).min(self.ny - 1);
        let b = bj * self.nx + bi;
        let cands = &self.items[self.offsets[b]..self.offsets[b + 1]];
        cands.iter().copied().find(|&j| geometry::point_in_triangle(&mesh.triangle(j), p, 1e-12))
    }
}
