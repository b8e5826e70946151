//! Conforming triangular meshes: connectivity, per-cell geometry and
//! a plain-text dump format.

mod bathymetry;
mod hierarchy;
mod locate;

pub use bathymetry::{sample_bathymetry, Bathymetry, BottomProfile};
pub use hierarchy::{CellOrigin, MeshHierarchy, RefinementKind};
pub use locate::PointLocator;

use crate::error::{Result, SwedError};
use crate::geometry::{self, Point};
use std::collections::HashMap;
use std::fmt::Write as _;

/// What lies across a cell edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Cell(usize),
    Boundary,
}

impl Neighbor {
    #[inline]
    pub fn cell(self) -> Option<usize> {
        match self {
            Neighbor::Cell(c) => Some(c),
            Neighbor::Boundary => None,
        }
    }
}

/// Precomputed geometry of one triangle. Edge `k` is opposite vertex `k`.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point,
    pub edge_len: [f64; 3],
    /// Outward unit normals `(cos, sin)`.
    pub normal: [Point; 3],
    pub midpoint: [Point; 3],
    /// Altitude over each edge, `2|T|/len`.
    pub altitude: [f64; 3],
    /// Longest edge length.
    pub diameter: f64,
}

/// An edge seen from the cell that owns it (the lower-numbered side for
/// interior edges).
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub cell: usize,
    pub k: u8,
    pub other: Neighbor,
    pub other_k: u8,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<[usize; 3]>,
    pub neighbors: Vec<[Neighbor; 3]>,
    /// Local index of the shared edge inside the neighbor (unused on boundaries).
    pub neighbor_edge: Vec<[u8; 3]>,
    pub geom: Vec<CellGeometry>,
    pub edges: Vec<Edge>,
    pub cell_edges: Vec<[usize; 3]>,
    /// Refinement level of every cell (0 on the base grid).
    pub level: Vec<u8>,
    /// Provenance of each cell inside a [`MeshHierarchy`], if any.
    pub origin: Vec<CellOrigin>,
    vc_offsets: Vec<usize>,
    vc_list: Vec<usize>,
}

impl TriMesh {
    /// Build a mesh from vertex coordinates and vertex triples.
    ///
    /// Clockwise triangles are reoriented. Degenerate triangles and edges
    /// shared by more than two cells are rejected.
    pub fn from_cells(vertices: Vec<Point>, cells: Vec<[usize; 3]>) -> Result<Self> {
        let n = cells.len();
        let origin = (0..n).map(CellOrigin::root).collect();
        Self::from_parts(vertices, cells, vec![0; n], origin)
    }

    pub(crate) fn from_parts(
        vertices: Vec<Point>,
        mut cells: Vec<[usize; 3]>,
        level: Vec<u8>,
        origin: Vec<CellOrigin>,
    ) -> Result<Self> {
        for (j, c) in cells.iter_mut().enumerate() {
            if c.iter().any(|&v| v >= vertices.len()) {
                return Err(SwedError::InvalidMesh(format!("cell {j} references a missing vertex")));
            }
            if c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                return Err(SwedError::InvalidMesh(format!("cell {j} repeats a vertex")));
            }
            let o = geometry::orient(vertices[c[0]], vertices[c[1]], vertices[c[2]]);
            if !o.is_finite() || o.abs() <= 1e-14 * scale2(&vertices, c) {
                return Err(SwedError::InvalidMesh(format!("cell {j} is degenerate")));
            }
            if o < 0.0 {
                c.swap(1, 2);
            }
        }

        let geom: Vec<CellGeometry> = cells.iter().map(|c| cell_geometry(&vertices, c)).collect();

        let n = cells.len();
        let mut neighbors = vec![[Neighbor::Boundary; 3]; n];
        let mut neighbor_edge = vec![[0u8; 3]; n];
        let mut cell_edges = vec![[usize::MAX; 3]; n];
        let mut edges = Vec::with_capacity(n * 3 / 2 + 8);
        let mut seen: HashMap<(usize, usize), (usize, u8, bool)> = HashMap::with_capacity(n * 2);
        for (j, c) in cells.iter().enumerate() {
            for k in 0..3 {
                let a = c[(k + 1) % 3];
                let b = c[(k + 2) % 3];
                let key = (a.min(b), a.max(b));
                match seen.get_mut(&key) {
                    Some(entry) => {
                        if entry.2 {
                            return Err(SwedError::InvalidMesh(format!("edge {key:?} is shared by more than two cells")));
                        }
                        entry.2 = true;
                        let (i, ki) = (entry.0, entry.1);
                        neighbors[i][ki as usize] = Neighbor::Cell(j);
                        neighbor_edge[i][ki as usize] = k as u8;
                        neighbors[j][k] = Neighbor::Cell(i);
                        neighbor_edge[j][k] = ki;
                        let e = cell_edges[i][ki as usize];
                        edges[e] = Edge { cell: i, k: ki, other: Neighbor::Cell(j), other_k: k as u8 };
                        cell_edges[j][k] = e;
                    }
                    None => {
                        let e = edges.len();
                        edges.push(Edge { cell: j, k: k as u8, other: Neighbor::Boundary, other_k: 0 });
                        cell_edges[j][k] = e;
                        seen.insert(key, (j, k as u8, false));
                    }
                }
            }
        }

        let mut counts = vec![0usize; vertices.len() + 1];
        for c in &cells {
            for &v in c {
                counts[v + 1] += 1;
            }
        }
        for i in 0..vertices.len() {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut vc_list = vec![0; cells.len() * 3];
        for (j, c) in cells.iter().enumerate() {
            for &v in c {
                vc_list[fill[v]] = j;
                fill[v] += 1;
            }
        }

        Ok(TriMesh { vertices, cells, neighbors, neighbor_edge, geom, edges, cell_edges, level, origin, vc_offsets: counts, vc_list })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Cells incident to vertex `v`.
    pub fn vertex_cells(&self, v: usize) -> &[usize] {
        &self.vc_list[self.vc_offsets[v]..self.vc_offsets[v + 1]]
    }

    pub fn triangle(&self, j: usize) -> [Point; 3] {
        let c = self.cells[j];
        [self.vertices[c[0]], self.vertices[c[1]], self.vertices[c[2]]]
    }

    pub fn total_area(&self) -> f64 {
        self.geom.iter().map(|g| g.area).sum()
    }

    pub fn max_area(&self) -> f64 {
        self.geom.iter().map(|g| g.area).fold(0.0, f64::max)
    }

    /// Mirror image of the centroid of `j` across its boundary edge `k`.
    pub fn ghost_centroid(&self, j: usize, k: usize) -> Point {
        let g = &self.geom[j];
        let n = g.normal[k];
        let d = geometry::dot(geometry::sub(g.midpoint[k], g.centroid), n);
        [g.centroid[0] + 2.0 * d * n[0], g.centroid[1] + 2.0 * d * n[1]]
    }

    /// Cells sharing at least one vertex with `j`, excluding `j`, sorted.
    pub fn vertex_stencil(&self, j: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.cells[j].iter().flat_map(|&v| self.vertex_cells(v).iter().copied()).filter(|&c| c != j).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Plain-text dump: a `nodes` block followed by a `cells` block.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes {}", self.vertices.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{:.16e} {:.16e}", p[0], p[1]);
        }
        let _ = writeln!(s, "cells {}", self.cells.len());
        for c in &self.cells {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        s
    }

    /// Parse the format written by [`TriMesh::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let bad = |m: &str| SwedError::InvalidMesh(format!("mesh dump: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = |l: Option<&str>, tag: &str| -> Result<usize> {
            let l = l.ok_or_else(|| bad("unexpected end of input"))?;
            let mut it = l.split_whitespace();
            if it.next() != Some(tag) {
                return Err(bad(&format!("expected `{tag}` header")));
            }
            it.next().and_then(|n| n.parse().ok()).ok_or_else(|| bad("bad count"))
        };
        let nv = header(lines.next(), "nodes")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let l = lines.next().ok_or_else(|| bad("missing node line"))?;
            let v: Vec<f64> = l.split_whitespace().map(|x| x.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad coordinate"))?;
            if v.len() != 2 {
                return Err(bad("node line needs two coordinates"));
            }
            vertices.push([v[0], v[1]]);
        }
        let nc = header(lines.next(), "cells")?;
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let l = lines.next().ok_or_else(|| bad("missing cell line"))?;
            let v: Vec<usize> = l.split_whitespace().map(|x| x.parse::<usize>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad vertex index"))?;
            if v.len() != 3 {
                return Err(bad("cell line needs three indices"));
            }
            cells.push([v[0], v[1], v[2]]);
        }
        TriMesh::from_cells(vertices, cells)
    }
}

fn scale2(vertices: &[Point], c: &[usize; 3]) -> f64 {
    let a = vertices[c[0]];
    let b = vertices[c[1]];
    let d = vertices[c[2]];
    let l = geometry::dist(a, b).max(geometry::dist(b, d)).max(geometry::dist(a, d));
    l * l
}

fn cell_geometry(vertices: &[Point], c: &[usize; 3]) -> CellGeometry {
    let p = [vertices[c[0]], vertices[c[1]], vertices[c[2]]];
    let area = geometry::triangle_area(&p);
    let centroid = geometry::centroid(&p);
    let mut edge_len = [0.0; 3];
    let mut normal = [[0.0; 2]; 3];
    let mut midpoint = [[0.0; 2]; 3];
    let mut altitude = [0.0; 3];
    for k in 0..3 {
        let a = p[(k + 1) % 3];
        let b = p[(k + 2) % 3];
        let d = geometry::sub(b, a);
        let l = d[0].hypot(d[1]);
        edge_len[k] = l;
        // Counter-clockwise ordering puts the outside on the right of a->b.
        normal[k] = [d[1] / l, -d[0] / l];
        midpoint[k] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        altitude[k] = 2.0 * area / l;
    }
    let diameter = edge_len[0].max(edge_len[1]).max(edge_len[2]);
    CellGeometry { area, centroid, edge_len, normal, midpoint, altitude, diameter }
}

/// Rectangular domain `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Domain {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Domain {
    pub const SQUARE: Domain = Domain { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 };

    pub fn validate(&self) -> Result<()> {
        if !(self.x1 > self.x0 && self.y1 > self.y0) || ![self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite()) {
            return Err(SwedError::InvalidArgument(format!("empty or non-finite domain {self:?}")));
        }
        Ok(())
    }
}

/// Uniform `2 x nx x ny` triangulation: every rectangle is split along its
/// lower-left to upper-right diagonal.
pub fn build_uniform(nx: usize, ny: usize, domain: Domain) -> Result<TriMesh> {
    if nx == 0 || ny == 0 {
        return Err(SwedError::InvalidArgument(format!("grid size must be positive, got {nx} x {ny}")));
    }
    domain.validate()?;
    let dx = (domain.x1 - domain.x0) / nx as f64;
    let dy = (domain.y1 - domain.y0) / ny as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx { domain.x1 } else { domain.x0 + i as f64 * dx };
            let y = if j == ny { domain.y1 } else { domain.y0 + j as f64 * dy };
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let a = id(i, j);
            let b = id(i + 1, j);
            let c = id(i + 1, j + 1);
            let d = id(i, j + 1);
            cells.push([a, b, c]);
            cells.push([a, c, d]);
        }
    }
    TriMesh::from_cells(vertices, cells)
}
