//! Red/green refinement tree over a base triangulation.
//!
//! Flagged leaves are split into four similar children. A leaf left with a
//! single hanging node is split into two halves for conformity; a leaf with
//! two or more hanging nodes is quadrisected instead. Coarsening marks the
//! children of a parent dormant, so a later re-refinement reuses them.

use super::TriMesh;
use crate::error::{Result, SwedError};
use crate::geometry::{self, Point};
use rustc_hash::FxHashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementKind {
    /// Cell of the base grid.
    Root,
    /// Child of a regular quadrisection.
    Quadrisection,
    /// Half of a leaf split to remove one hanging node.
    Bisection,
}

/// Link from an active cell back to the tree leaf it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellOrigin {
    pub leaf: usize,
    /// For a bisected leaf: the hanging vertex and which half (0 or 1).
    pub half: Option<(usize, u8)>,
}

impl CellOrigin {
    pub fn root(leaf: usize) -> Self {
        CellOrigin { leaf, half: None }
    }
}

#[derive(Debug, Clone)]
struct Node {
    verts: [usize; 3],
    parent: Option<usize>,
    children: Option<[usize; 4]>,
    refined: bool,
    level: u8,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AdaptOutcome {
    pub refined: usize,
    pub coarsened: usize,
}

#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    vertices: Vec<Point>,
    nodes: Vec<Node>,
    roots: Vec<usize>,
    midpoint: FxHashMap<u64, usize>,
    /// For midpoint vertices, the edge they split.
    split_of: Vec<Option<(usize, usize)>>,
}

#[inline]
fn key(a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

/// Leaves owning each undirected edge of the current leaf set.
struct EdgeOwners(FxHashMap<u64, [usize; 2]>);

const NONE: usize = usize::MAX;

impl EdgeOwners {
    fn get(&self, a: usize, b: usize) -> Option<[usize; 2]> {
        self.0.get(&key(a, b)).copied()
    }
}

enum Across {
    Same(usize),
    Finer(usize),
    Coarser(usize),
    Boundary,
}

impl MeshHierarchy {
    pub fn new(base: &TriMesh) -> Self {
        let nodes = base
            .cells
            .iter()
            .map(|&verts| Node { verts, parent: None, children: None, refined: false, level: 0 })
            .collect::<Vec<_>>();
        MeshHierarchy {
            vertices: base.vertices.clone(),
            roots: (0..nodes.len()).collect(),
            nodes,
            midpoint: FxHashMap::default(),
            split_of: vec![None; base.vertices.len()],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn level(&self, id: usize) -> u8 {
        self.nodes[id].level
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    /// Children of a node that is currently refined.
    pub fn children(&self, id: usize) -> Option<[usize; 4]> {
        let n = &self.nodes[id];
        if n.refined {
            n.children
        } else {
            None
        }
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        !self.nodes[id].refined
    }

    pub fn node_triangle(&self, id: usize) -> [Point; 3] {
        let v = self.nodes[id].verts;
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]]
    }

    pub fn node_area(&self, id: usize) -> f64 {
        geometry::triangle_area(&self.node_triangle(id))
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    /// Active leaves in depth-first order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        for &r in &self.roots {
            stack.push(r);
            while let Some(id) = stack.pop() {
                let n = &self.nodes[id];
                if n.refined {
                    let c = n.children.expect("refined node without children");
                    stack.extend(c.iter().rev());
                } else {
                    out.push(id);
                }
            }
        }
        out
    }

    fn edge_owners(&self, leaves: &[usize]) -> EdgeOwners {
        let mut m: FxHashMap<u64, [usize; 2]> = FxHashMap::default();
        m.reserve(leaves.len() * 2);
        for &l in leaves {
            let v = self.nodes[l].verts;
            for k in 0..3 {
                let e = m.entry(key(v[(k + 1) % 3], v[(k + 2) % 3])).or_insert([NONE, NONE]);
                if e[0] == NONE {
                    e[0] = l;
                } else {
                    e[1] = l;
                }
            }
        }
        EdgeOwners(m)
    }

    fn across(&self, owners: &EdgeOwners, leaf: usize, k: usize) -> Across {
        let v = self.nodes[leaf].verts;
        let (a, b) = (v[(k + 1) % 3], v[(k + 2) % 3]);
        if let Some(o) = owners.get(a, b) {
            let other = if o[0] == leaf { o[1] } else { o[0] };
            if other != NONE {
                return Across::Same(other);
            }
        }
        if let Some(&m) = self.midpoint.get(&key(a, b)) {
            if owners.get(a, m).is_some() && owners.get(m, b).is_some() {
                return Across::Finer(m);
            }
        }
        for (x, y) in [(a, b), (b, a)] {
            if let Some((p, q)) = self.split_of[x] {
                if y == p || y == q {
                    if let Some(o) = owners.get(p, q) {
                        return Across::Coarser(o[0]);
                    }
                }
            }
        }
        Across::Boundary
    }

    fn hanging_nodes(&self, owners: &EdgeOwners, leaf: usize) -> [Option<usize>; 3] {
        let mut h = [None; 3];
        for (k, slot) in h.iter_mut().enumerate() {
            if let Across::Finer(m) = self.across(owners, leaf, k) {
                *slot = Some(m);
            }
        }
        h
    }

    fn midpoint_vertex(&mut self, a: usize, b: usize) -> usize {
        if let Some(&m) = self.midpoint.get(&key(a, b)) {
            return m;
        }
        let p = geometry::lerp(self.vertices[a], self.vertices[b], 0.5);
        let m = self.vertices.len();
        self.vertices.push(p);
        self.split_of.push(Some((a.min(b), a.max(b))));
        self.midpoint.insert(key(a, b), m);
        m
    }

    fn refine_leaf(&mut self, id: usize) {
        if self.nodes[id].refined {
            return;
        }
        if self.nodes[id].children.is_none() {
            let [v0, v1, v2] = self.nodes[id].verts;
            let m01 = self.midpoint_vertex(v0, v1);
            let m12 = self.midpoint_vertex(v1, v2);
            let m20 = self.midpoint_vertex(v2, v0);
            let level = self.nodes[id].level + 1;
            let base = self.nodes.len();
            for verts in [[v0, m01, m20], [m01, v1, m12], [m20, m12, v2], [m01, m12, m20]] {
                self.nodes.push(Node { verts, parent: Some(id), children: None, refined: false, level });
            }
            self.nodes[id].children = Some([base, base + 1, base + 2, base + 3]);
        }
        self.nodes[id].refined = true;
    }

    /// Add to `set` every coarser leaf that must be refined before the
    /// members of `set` so that neighboring leaves differ by at most one level.
    fn irregularity_closure(&self, owners: &EdgeOwners, set: &mut Vec<usize>, mark: &mut [bool]) {
        let mut i = 0;
        while i < set.len() {
            let l = set[i];
            for k in 0..3 {
                if let Across::Coarser(n) = self.across(owners, l, k) {
                    if !mark[n] {
                        mark[n] = true;
                        set.push(n);
                    }
                }
            }
            i += 1;
        }
    }

    /// Refine the given leaves and coarsen the given parents, then restore
    /// conformity. Coarsening requests that would break the one-level rule
    /// or collide with a refinement are dropped.
    pub fn adapt(&mut self, refine: &[usize], coarsen: &[usize]) -> AdaptOutcome {
        let leaves = self.leaves();
        let owners = self.edge_owners(&leaves);
        let mut mark = vec![false; self.nodes.len()];
        let mut set = Vec::new();
        for &l in refine {
            if l < self.nodes.len() && !self.nodes[l].refined && !mark[l] {
                mark[l] = true;
                set.push(l);
            }
        }
        self.irregularity_closure(&owners, &mut set, &mut mark);

        let mut outcome = AdaptOutcome::default();
        let mut to_coarsen = Vec::new();
        'parents: for &p in coarsen {
            let Some(ch) = self.children(p) else { continue };
            if ch.iter().any(|&c| self.nodes[c].refined || mark[c]) {
                continue;
            }
            for &c in &ch {
                for k in 0..3 {
                    match self.across(&owners, c, k) {
                        Across::Finer(_) => continue 'parents,
                        Across::Same(n) if mark[n] && self.nodes[n].parent != Some(p) => continue 'parents,
                        _ => {}
                    }
                }
            }
            to_coarsen.push(p);
        }
        to_coarsen.sort_unstable();
        to_coarsen.dedup();
        for &p in &to_coarsen {
            self.nodes[p].refined = false;
        }
        outcome.coarsened = to_coarsen.len();
        for &l in &set {
            self.refine_leaf(l);
        }
        outcome.refined = set.len();

        // Promote leaves with two or more hanging nodes until stable.
        loop {
            let leaves = self.leaves();
            let owners = self.edge_owners(&leaves);
            let mut mark = vec![false; self.nodes.len()];
            let mut set = Vec::new();
            for &l in &leaves {
                if self.hanging_nodes(&owners, l).iter().flatten().count() >= 2 {
                    mark[l] = true;
                    set.push(l);
                }
            }
            if set.is_empty() {
                break;
            }
            self.irregularity_closure(&owners, &mut set, &mut mark);
            for &l in &set {
                self.refine_leaf(l);
            }
            outcome.refined += set.len();
        }
        outcome
    }

    /// Build the conforming active mesh: leaves with one hanging node are
    /// split into two halves through that node.
    pub fn active_mesh(&self) -> Result<TriMesh> {
        let leaves = self.leaves();
        let owners = self.edge_owners(&leaves);
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut cells = Vec::with_capacity(leaves.len() + leaves.len() / 4);
        let mut level = Vec::with_capacity(cells.capacity());
        let mut origin = Vec::with_capacity(cells.capacity());
        let mut id = |v: usize, vertices: &mut Vec<Point>| {
            if remap[v] == usize::MAX {
                remap[v] = vertices.len();
                vertices.push(self.vertices[v]);
            }
            remap[v]
        };
        for &l in &leaves {
            let v = self.nodes[l].verts;
            let h = self.hanging_nodes(&owners, l);
            let lvl = self.nodes[l].level;
            match h.iter().enumerate().filter_map(|(k, m)| m.map(|m| (k, m))).collect::<Vec<_>>().as_slice() {
                [] => {
                    cells.push([id(v[0], &mut vertices), id(v[1], &mut vertices), id(v[2], &mut vertices)]);
                    level.push(lvl);
                    origin.push(CellOrigin { leaf: l, half: None });
                }
                [(k, m)] => {
                    let (a, b, c) = (v[*k], v[(k + 1) % 3], v[(k + 2) % 3]);
                    cells.push([id(a, &mut vertices), id(b, &mut vertices), id(*m, &mut vertices)]);
                    cells.push([id(a, &mut vertices), id(*m, &mut vertices), id(c, &mut vertices)]);
                    level.extend([lvl, lvl]);
                    origin.push(CellOrigin { leaf: l, half: Some((*m, 0)) });
                    origin.push(CellOrigin { leaf: l, half: Some((*m, 1)) });
                }
                _ => return Err(SwedError::Internal(format!("leaf {l} has more than one hanging node"))),
            }
        }
        TriMesh::from_parts(vertices, cells, level, origin)
    }

    /// Triangles of the two halves a bisection through hanging vertex `m`
    /// would produce for leaf `id`.
    pub fn half_triangle(&self, id: usize, m: usize, which: u8) -> Result<[Point; 3]> {
        let v = self.nodes[id].verts;
        for k in 0..3 {
            let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
            if self.midpoint.get(&key(b, c)) == Some(&m) {
                let t = if which == 0 { [a, b, m] } else { [a, m, c] };
                return Ok([self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]);
            }
        }
        Err(SwedError::Internal(format!("vertex {m} does not split an edge of leaf {id}")))
    }
}

impl TriMesh {
    pub fn refinement_kind(&self, j: usize) -> RefinementKind {
        match (self.origin[j].half, self.level[j]) {
            (Some(_), _) => RefinementKind::Bisection,
            (None, 0) => RefinementKind::Root,
            _ => RefinementKind::Quadrisection,
        }
    }
}
