use super::flux::{edge_flux_pv, scalar_edge_flux, PointValue};
use super::source::{source_quadrature, SourceInput};
use crate::error::{Result, SwedError};
use crate::geometry::{self, Point};
use crate::interface::{levelset_fraction, FluidClass, Phases};
use crate::mesh::{Bathymetry, Neighbor, TriMesh};
use crate::reconstruction::{limiter_theta, lsq_gradient, primitive_center, Desingularization};
use crate::riemann::sampled_edge_state;
use crate::state::{PhysicsParams, Vars, FRAC, NVAR, PHI, W};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which cells receive a right-hand side.
#[derive(Debug, Clone, Copy)]
pub enum Selection<'a> {
    All,
    /// `cells` get a right-hand side; `ring` is `cells` plus their edge
    /// neighbors (the cells whose traces are needed); `edges` are all edges
    /// touching `cells`.
    Subset { cells: &'a [usize], ring: &'a [usize], edges: &'a [usize] },
}

#[derive(Debug, Clone, Copy)]
struct GradStencil {
    offset: [Point; 3],
    /// Inverse of the full 3-point normal matrix `[i00, i01, i11]`.
    inv: [f64; 3],
    ok: bool,
}

/// Scratch buffers reused across evaluations.
#[derive(Debug, Clone, Default)]
pub struct RhsWorkspace {
    /// Primitive cell values `(w, u, v, rho, phi, f)`.
    pub prim: Vec<Vars>,
    /// Limited gradients per component.
    pub grad: Vec<[Point; NVAR]>,
    /// Primitive traces at the three edge midpoints.
    pub trace: Vec<[Vars; 3]>,
    edge: Vec<EdgeOut>,
}

/// Flux through one edge, oriented from `Edge::cell` to `Edge::other`.
#[derive(Debug, Clone, Copy, Default)]
struct EdgeOut {
    hq: Vars,
    /// Integral of the normal velocity, for the divergence source of the
    /// advected scalars.
    div: f64,
}

/// Smallest chunk handed to a worker thread.
const MIN_CHUNK: usize = 256;

/// Depths of fluid 1 and fluid 2 in a mixed cell of mean depth `h` whose
/// fraction `f` holds fluid 1, when both share one hydrostatic pressure
/// (`rho h^2` equal on both sides).
#[inline]
pub fn pure_depths(h: f64, f: f64, rho: [f64; 2]) -> [f64; 2] {
    let f = f.clamp(0.0, 1.0);
    let (s1, s2) = (rho[0].sqrt(), rho[1].sqrt());
    let q = h.max(0.0) / (f / s1 + (1.0 - f) / s2);
    [q / s1, q / s2]
}

/// Index (0 or 1) of the fluid next to edge `k` of cell `j`: the sign of
/// the level set summed over the edge's end vertices, or the fraction on a tie.
#[inline]
fn edge_fluid(mesh: &TriMesh, vertex_phi: &[f64], j: usize, k: usize, frac: f64) -> usize {
    let c = mesh.cells[j];
    let s = vertex_phi[c[(k + 1) % 3]] + vertex_phi[c[(k + 2) % 3]];
    if s > 0.0 || (s == 0.0 && frac >= 0.5) {
        0
    } else {
        1
    }
}

/// Fluid-1 fraction of cell `j` from its vertex level set.
#[inline]
fn cell_fraction(mesh: &TriMesh, vertex_phi: &[f64], j: usize) -> f64 {
    levelset_fraction(mesh.cells[j].map(|v| vertex_phi[v]))
}

impl RhsWorkspace {
    fn resize(&mut self, n: usize) {
        if self.prim.len() != n {
            self.prim = vec![[0.0; NVAR]; n];
            self.grad = vec![[[0.0; 2]; NVAR]; n];
            self.trace = vec![[[0.0; NVAR]; 3]; n];
        }
    }
}

/// Mesh-bound part of the semi-discrete scheme.
/// Condition on the outer edges of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// The outer state equals the inner trace.
    #[default]
    Transmissive,
    /// Reflecting wall: the outer state has the normal velocity reversed.
    Wall,
}

#[derive(Debug, Clone)]
pub struct SpatialOperator {
    pub params: PhysicsParams,
    pub desing: Desingularization,
    /// Evolve the level set and volume fraction.
    pub track_interface: bool,
    /// Densities of fluid 1 and fluid 2.
    pub rho: [f64; 2],
    pub boundary: BoundaryKind,
    stencil: Vec<GradStencil>,
}

impl SpatialOperator {
    pub fn with_boundary(mut self, boundary: BoundaryKind) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn new(mesh: &TriMesh, params: PhysicsParams, track_interface: bool, rho: [f64; 2]) -> Self {
        let stencil = (0..mesh.n_cells())
            .map(|j| {
                let c = mesh.geom[j].centroid;
                let mut offset = [[0.0; 2]; 3];
                for k in 0..3 {
                    let p = match mesh.neighbors[j][k] {
                        Neighbor::Cell(i) => mesh.geom[i].centroid,
                        Neighbor::Boundary => mesh.ghost_centroid(j, k),
                    };
                    offset[k] = geometry::sub(p, c);
                }
                let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
                for o in &offset {
                    a += o[0] * o[0];
                    b += o[0] * o[1];
                    d += o[1] * o[1];
                }
                let det = a * d - b * b;
                let ok = det > 1e-12 * a * d;
                let inv = if ok { [d / det, -b / det, a / det] } else { [0.0; 3] };
                GradStencil { offset, inv, ok }
            })
            .collect();
        SpatialOperator { params, desing: Desingularization::new(mesh.max_area(), &params), track_interface, rho, boundary: BoundaryKind::Transmissive, stencil }
    }

    /// Reconstruct one cell: limited gradients and midpoint traces.
    #[inline]
    fn reconstruct_cell(&self, mesh: &TriMesh, ph: Phases, j: usize, prim: &[Vars], grad: &mut [Point; NVAR], trace: &mut [Vars; 3]) {
        let g = &mesh.geom[j];
        let st = &self.stencil[j];
        let c = prim[j];
        let cls = ph.class[j];
        let mut nb = [c; 3];
        let mut reliable = [true; 3];
        for k in 0..3 {
            if let Neighbor::Cell(i) = mesh.neighbors[j][k] {
                nb[k] = prim[i];
                reliable[k] = ph.class[i] == cls;
            }
        }
        let all_reliable = reliable[0] && reliable[1] && reliable[2];
        let r = [geometry::sub(g.midpoint[0], g.centroid), geometry::sub(g.midpoint[1], g.centroid), geometry::sub(g.midpoint[2], g.centroid)];
        let ncomp = if self.track_interface { NVAR } else { 4 };
        for m in 0..ncomp {
            let flow = m < PHI;
            if flow && cls == FluidClass::Mixed {
                grad[m] = [0.0; 2];
                for t in trace.iter_mut() {
                    t[m] = c[m];
                }
                continue;
            }
            let use_all = !flow || all_reliable;
            let raw = if use_all && st.ok {
                let mut sx = 0.0;
                let mut sy = 0.0;
                for k in 0..3 {
                    let dq = nb[k][m] - c[m];
                    sx += st.offset[k][0] * dq;
                    sy += st.offset[k][1] * dq;
                }
                [st.inv[0] * sx + st.inv[1] * sy, st.inv[1] * sx + st.inv[2] * sy]
            } else {
                let mut offs = [[0.0; 2]; 3];
                let mut dq = [0.0; 3];
                let mut n = 0;
                for k in 0..3 {
                    if use_all || reliable[k] {
                        offs[n] = st.offset[k];
                        dq[n] = nb[k][m] - c[m];
                        n += 1;
                    }
                }
                lsq_gradient(&offs[..n], &dq[..n]).unwrap_or([0.0; 2])
            };
            let dev = [
                raw[0] * r[0][0] + raw[1] * r[0][1],
                raw[0] * r[1][0] + raw[1] * r[1][1],
                raw[0] * r[2][0] + raw[1] * r[2][1],
            ];
            // Each trace stays between the cell value and the neighbor across
            // its edge; edges to unreliable neighbors get the range of the
            // reliable ones.
            let cm = c[m];
            let (mut lo, mut hi) = ([cm; 3], [cm; 3]);
            let (mut rlo, mut rhi) = (cm, cm);
            for k in 0..3 {
                if use_all || reliable[k] {
                    let q = nb[k][m];
                    if q < cm {
                        lo[k] = q;
                        if q < rlo {
                            rlo = q;
                        }
                    } else {
                        hi[k] = q;
                        if q > rhi {
                            rhi = q;
                        }
                    }
                }
            }
            if !use_all {
                for k in 0..3 {
                    if !reliable[k] {
                        lo[k] = rlo;
                        hi[k] = rhi;
                    }
                }
            }
            let theta = limiter_theta(cm, lo, hi, dev);
            grad[m] = [theta * raw[0], theta * raw[1]];
            for k in 0..3 {
                trace[k][m] = c[m] + theta * dev[k];
            }
        }
        if !self.track_interface {
            for t in trace.iter_mut() {
                t[PHI] = c[PHI];
                t[FRAC] = c[FRAC];
            }
            grad[PHI] = [0.0; 2];
            grad[FRAC] = [0.0; 2];
        }
    }

    /// Replace the flow traces of a mixed cell by Riemann-based values.
    ///
    /// The cell is read as two fluids at a common hydrostatic pressure, split
    /// by the zero line of the interpolated vertex level set; its depth and
    /// that split fix the pressure and the pure depth of each fluid. At every edge the
    /// fluid on the cell side (sign of the edge's vertex level set) is posed
    /// against the neighbor and the Riemann solution on the edge is taken.
    /// An edge shared with another mixed cell is posed by the lower-numbered
    /// cell, so both sides see one value.
    #[inline]
    fn mixed_traces(&self, mesh: &TriMesh, bathy: &Bathymetry, ph: Phases, j: usize, prim: &[Vars], trace: &mut [Vars; 3]) {
        let raw = |c: usize| {
            let v = prim[c];
            [v[0], v[1], v[2], v[3]]
        };
        let pure = |c: usize, fluid: usize| {
            let v = prim[c];
            let b = bathy.center[c];
            let frac = if ph.class[c] == FluidClass::Mixed { cell_fraction(mesh, ph.vertex_phi, c) } else { [1.0, 0.0][fluid] };
            let h = pure_depths(v[W] - b, frac, self.rho)[fluid];
            [b + h, v[1], v[2], self.rho[fluid]]
        };
        for k in 0..3 {
            let fluid = edge_fluid(mesh, ph.vertex_phi, j, k, cell_fraction(mesh, ph.vertex_phi, j));
            let t = match mesh.neighbors[j][k] {
                Neighbor::Boundary => pure(j, fluid),
                Neighbor::Cell(i) if ph.class[i] == FluidClass::Mixed => {
                    let (a, b, n) = if j < i { (j, i, mesh.geom[j].normal[k]) } else { (i, j, mesh.geom[i].normal[mesh.neighbor_edge[j][k] as usize]) };
                    sampled_edge_state(pure(a, fluid), pure(b, fluid), bathy.center[a], bathy.center[b], n, &self.params)
                }
                Neighbor::Cell(i) => sampled_edge_state(pure(j, fluid), raw(i), bathy.center[j], bathy.center[i], mesh.geom[j].normal[k], &self.params),
            };
            trace[k][..4].copy_from_slice(&t);
        }
    }

    fn primitives(&self, bathy: &Bathymetry, state: &[Vars], prim: &mut [Vars]) {
        prim.par_iter_mut().with_min_len(MIN_CHUNK).enumerate().for_each(|(j, p)| *p = primitive_center(&state[j], bathy.center[j], &self.desing));
    }

    #[inline]
    fn reconstruct_full(&self, mesh: &TriMesh, bathy: &Bathymetry, ph: Phases, j: usize, prim: &[Vars], grad: &mut [Point; NVAR], trace: &mut [Vars; 3]) {
        self.reconstruct_cell(mesh, ph, j, prim, grad, trace);
        if self.track_interface && ph.class[j] == FluidClass::Mixed {
            self.mixed_traces(mesh, bathy, ph, j, prim, trace);
        }
    }

    fn reconstruct(&self, mesh: &TriMesh, bathy: &Bathymetry, ph: Phases, sel: Selection, ws: &mut RhsWorkspace) {
        let RhsWorkspace { prim, grad, trace, .. } = ws;
        let prim = &*prim;
        match sel {
            Selection::All => grad
                .par_iter_mut()
                .zip(trace.par_iter_mut())
                .with_min_len(MIN_CHUNK)
                .enumerate()
                .for_each(|(j, (g, t))| self.reconstruct_full(mesh, bathy, ph, j, prim, g, t)),
            Selection::Subset { ring, .. } => {
                let done: Vec<_> = ring
                    .par_iter()
                    .with_min_len(MIN_CHUNK)
                    .map(|&j| {
                        let (mut g, mut t) = (grad[j], trace[j]);
                        self.reconstruct_full(mesh, bathy, ph, j, prim, &mut g, &mut t);
                        (g, t)
                    })
                    .collect();
                for (&j, (g, t)) in ring.iter().zip(done) {
                    grad[j] = g;
                    trace[j] = t;
                }
            }
        }
    }

    /// Reconstruct every cell of the mesh from `state` (no right-hand side).
    pub fn reconstruct_all(&self, mesh: &TriMesh, bathy: &Bathymetry, ph: Phases, state: &[Vars], ws: &mut RhsWorkspace) {
        ws.resize(mesh.n_cells());
        self.primitives(bathy, state, &mut ws.prim);
        self.reconstruct(mesh, bathy, ph, Selection::All, ws);
    }

    #[inline]
    fn point(&self, t: &Vars, b: f64, j: usize) -> Result<PointValue> {
        let mut h = t[W] - b;
        if h < 0.0 {
            if h < -1e-12 * (1.0 + t[W].abs()) {
                return Err(SwedError::Internal(format!("negative depth trace {h:e} in cell {j}")));
            }
            h = 0.0;
        }
        Ok(PointValue { w: t[W], h, u: t[1], v: t[2], rho: t[3] })
    }

    /// Flux through edge `e` and the largest local speed there.
    fn edge_flux(&self, mesh: &TriMesh, bathy: &Bathymetry, ws: &RhsWorkspace, e: usize) -> Result<(EdgeOut, f64)> {
        let p = &self.params;
        let ed = mesh.edges[e];
        let j = ed.cell;
        let k = ed.k as usize;
        let g = &mesh.geom[j];
        let nrm = g.normal[k];
        let len = g.edge_len[k];
        let b = bathy.edge[j][k];
        let tin = &ws.trace[j][k];
        let inner = self.point(tin, b, j)?;
        let (tout, outer) = match ed.other {
            Neighbor::Cell(i) => {
                let t = &ws.trace[i][ed.other_k as usize];
                (*t, self.point(t, b, i)?)
            }
            Neighbor::Boundary => match self.boundary {
                BoundaryKind::Transmissive => (*tin, inner),
                BoundaryKind::Wall => {
                    let un = nrm[0] * inner.u + nrm[1] * inner.v;
                    let o = PointValue { u: inner.u - 2.0 * un * nrm[0], v: inner.v - 2.0 * un * nrm[1], ..inner };
                    let mut t = *tin;
                    t[1] = o.u;
                    t[2] = o.v;
                    (t, o)
                }
            },
        };
        let f = edge_flux_pv(&inner, &outer, nrm, len, p);
        let mut out = EdgeOut { hq: [f.flux[0], f.flux[1], f.flux[2], f.flux[3], 0.0, 0.0], div: 0.0 };
        if self.track_interface {
            let un_in = nrm[0] * inner.u + nrm[1] * inner.v;
            let un_out = nrm[0] * outer.u + nrm[1] * outer.v;
            let (fp, d) = scalar_edge_flux(un_in, un_out, tin[PHI], tout[PHI], len, p.sigma);
            let (ff, _) = scalar_edge_flux(un_in, un_out, tin[FRAC], tout[FRAC], len, p.sigma);
            out.hq[PHI] = fp;
            out.hq[FRAC] = ff;
            out.div = d;
        }
        Ok((out, f.a_in.max(f.a_out)))
    }

    /// Right-hand side of cell `j` from the edge fluxes and the source.
    fn assemble(&self, mesh: &TriMesh, bathy: &Bathymetry, ph: Phases, ws: &RhsWorkspace, snap: &[Vars], j: usize) -> Vars {
        let p = &self.params;
        let g = &mesh.geom[j];
        let mut a = [0.0; NVAR];
        let mut div = 0.0;
        for &e in &mesh.cell_edges[j] {
            let eo = &ws.edge[e];
            let sign = if mesh.edges[e].cell == j { 1.0 } else { -1.0 };
            for m in 0..NVAR {
                a[m] += sign * eo.hq[m];
            }
            div += sign * eo.div;
        }
        let c = mesh.cells[j];
        let cp = ws.prim[j];
        let gw = ws.grad[j][W];
        let gr = ws.grad[j][3];
        let mut wv = [0.0; 3];
        let mut rv = [0.0; 3];
        let mut bv = [0.0; 3];
        for i in 0..3 {
            let d = geometry::sub(mesh.vertices[c[i]], g.centroid);
            wv[i] = cp[W] + gw[0] * d[0] + gw[1] * d[1];
            rv[i] = cp[3] + gr[0] * d[0] + gr[1] * d[1];
            bv[i] = bathy.vertex[c[i]];
        }
        let t = &ws.trace[j];
        let s = if self.track_interface && ph.class[j] == FluidClass::Mixed {
            // Mixed cells have no gradients to pair with their edge traces,
            // so the slope term is taken directly: -g/rho0 (h rho) grad B.
            let db = geometry::plane_gradient(&mesh.triangle(j), bv);
            let mut hr = 0.0;
            for k in 0..3 {
                hr += (t[k][W] - bathy.edge[j][k]).max(0.0) * t[k][3] / 3.0;
            }
            let c = -p.g / p.rho0 * hr;
            [c * db[0], c * db[1]]
        } else {
            source_quadrature(
                &SourceInput {
                    area: g.area,
                    edge_len: g.edge_len,
                    normal: g.normal,
                    w_mid: [t[0][W], t[1][W], t[2][W]],
                    rho_mid: [t[0][3], t[1][3], t[2][3]],
                    b_mid: bathy.edge[j],
                    w_vert: wv,
                    rho_vert: rv,
                    b_vert: bv,
                    grad_w: gw,
                    grad_rho: gr,
                },
                p,
            )
        };
        let inv = 1.0 / g.area;
        let mut o = [0.0; NVAR];
        o[0] = -a[0] * inv;
        o[1] = -a[1] * inv + s[0];
        o[2] = -a[2] * inv + s[1];
        o[3] = -a[3] * inv;
        if self.track_interface {
            let dv = div * inv;
            o[PHI] = -a[PHI] * inv + dv * snap[j][PHI];
            o[FRAC] = -a[FRAC] * inv + dv * snap[j][FRAC];
        }
        o
    }

    /// Evaluate the semi-discrete right-hand side for the selected cells.
    /// Returns the largest one-sided local speed over the processed edges.
    ///
    /// Edges and cells are processed in parallel; every cell sums its three
    /// edge fluxes in a fixed order, so the result does not depend on the
    /// number of threads.
    #[allow(clippy::too_many_arguments)]
    pub fn eval(
        &self,
        mesh: &TriMesh,
        bathy: &Bathymetry,
        ph: Phases,
        snap: &[Vars],
        sel: Selection,
        ws: &mut RhsWorkspace,
        out: &mut [Vars],
    ) -> Result<f64> {
        let n = mesh.n_cells();
        ws.resize(n);
        if ws.edge.len() != mesh.edges.len() {
            ws.edge = vec![EdgeOut::default(); mesh.edges.len()];
        }
        self.primitives(bathy, snap, &mut ws.prim);
        self.reconstruct(mesh, bathy, ph, sel, ws);

        let amax = match sel {
            Selection::All => {
                let mut edge = std::mem::take(&mut ws.edge);
                let r: Result<f64> = edge
                    .par_iter_mut()
                    .with_min_len(MIN_CHUNK)
                    .enumerate()
                    .map(|(e, slot)| {
                        let (eo, a) = self.edge_flux(mesh, bathy, ws, e)?;
                        *slot = eo;
                        Ok(a)
                    })
                    .try_reduce(|| 0.0, |a: f64, b: f64| Ok(a.max(b)));
                ws.edge = edge;
                r?
            }
            Selection::Subset { edges, .. } => {
                let done = edges
                    .par_iter()
                    .with_min_len(MIN_CHUNK)
                    .map(|&e| self.edge_flux(mesh, bathy, ws, e))
                    .collect::<Result<Vec<_>>>()?;
                let mut amax = 0.0f64;
                for (&e, (eo, a)) in edges.iter().zip(done) {
                    ws.edge[e] = eo;
                    amax = amax.max(a);
                }
                amax
            }
        };

        let ws = &*ws;
        match sel {
            Selection::All => out.par_iter_mut().with_min_len(MIN_CHUNK).enumerate().for_each(|(j, o)| *o = self.assemble(mesh, bathy, ph, ws, snap, j)),
            Selection::Subset { cells, .. } => {
                let done: Vec<Vars> = cells.par_iter().with_min_len(MIN_CHUNK).map(|&j| self.assemble(mesh, bathy, ph, ws, snap, j)).collect();
                for (&j, o) in cells.iter().zip(done) {
                    out[j] = o;
                }
            }
        }
        Ok(amax)
    }
}
