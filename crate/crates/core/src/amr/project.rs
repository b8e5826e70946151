use crate::cu::RhsWorkspace;
use crate::error::{Result, SwedError};
use crate::geometry::{self, Point};
use crate::interface::{classify, fluid1_fraction_below_chord, vertex_levelset, Chord, FluidClass};
use crate::mesh::{Bathymetry, MeshHierarchy, Neighbor, TriMesh};
use crate::state::{State, Vars, FRAC, NVAR, PHI, W};
use rustc_hash::FxHashMap;
use std::collections::VecDeque;

/// Counts of how each new cell was filled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionReport {
    /// Same cell on both meshes.
    pub copied: usize,
    /// Union of old cells (coarsening or a merged bisection).
    pub averaged: usize,
    /// Part of an old cell, from its limited reconstruction.
    pub interpolated: usize,
    /// Part of an old mixed cell, filled from nearby single-fluid donors.
    pub from_donors: usize,
    /// Donor search failed; the parent value was used.
    pub donor_fallbacks: usize,
}

/// Old-mesh data of one tree leaf.
#[derive(Debug, Clone)]
struct LeafData {
    value: Vars,
    prim: Vars,
    grad: [Point; NVAR],
    centroid: Point,
    class: FluidClass,
    chord: Option<Chord>,
    cells: [usize; 2],
}

enum Source {
    Copy(usize),
    Average(Vec<usize>),
    FromLeaf(usize),
}

/// Old mesh, state and its reconstruction, as needed for projection.
pub struct OldMesh<'a> {
    pub mesh: &'a TriMesh,
    pub state: &'a State,
    pub recon: &'a RhsWorkspace,
    pub class: &'a [FluidClass],
    pub chords: &'a [Option<Chord>],
}

/// Transfer cell averages from the old active mesh to the new one.
///
/// Unchanged cells are copied, merged cells take the area-weighted mean,
/// and parts of an old single-fluid cell evaluate its limited linear
/// reconstruction at their centroid. Parts of an old mixed cell take the
/// state of the nearest single-fluid cell of their own fluid, or a blend of
/// both fluids weighted by the area fraction cut off by the old chord.
pub fn project_state(old: &OldMesh, hier: &MeshHierarchy, new_mesh: &TriMesh, new_bathy: &Bathymetry) -> Result<(State, ProjectionReport)> {
    let om = old.mesh;
    let mut cells_of = vec![[usize::MAX; 2]; hier.n_nodes()];
    for (j, o) in om.origin.iter().enumerate() {
        let s = &mut cells_of[o.leaf];
        if s[0] == usize::MAX {
            s[0] = j;
        } else {
            s[1] = j;
        }
    }
    let mut leaf_cache: FxHashMap<usize, LeafData> = FxHashMap::default();
    let mut leaf = |id: usize| -> LeafData {
        leaf_cache.entry(id).or_insert_with(|| leaf_data(old, cells_of[id])).clone()
    };

    let n = new_mesh.n_cells();
    let mut sources = Vec::with_capacity(n);
    for j in 0..n {
        let o = new_mesh.origin[j];
        let x = o.leaf;
        let was = if x < cells_of.len() { cells_of[x] } else { [usize::MAX; 2] };
        let src = if was[0] != usize::MAX {
            match (o.half, was[1] == usize::MAX) {
                (None, true) => Source::Copy(was[0]),
                (None, false) => Source::Average(vec![was[0], was[1]]),
                (Some(h), false) => match was.iter().find(|&&c| om.origin[c].half == Some(h)) {
                    Some(&c) => Source::Copy(c),
                    None => Source::FromLeaf(x),
                },
                (Some(_), true) => Source::FromLeaf(x),
            }
        } else if let Some(p) = hier.parent(x).filter(|&p| p < cells_of.len() && cells_of[p][0] != usize::MAX) {
            Source::FromLeaf(p)
        } else if let Some(ch) = (x < cells_of.len()).then(|| hier.children(x)).flatten().or_else(|| dormant_children(hier, x, &cells_of)) {
            let mut v = Vec::new();
            for c in ch {
                if c >= cells_of.len() || cells_of[c][0] == usize::MAX {
                    return Err(SwedError::Internal(format!("coarsened leaf {x} has a child without old cells")));
                }
                v.extend(cells_of[c].iter().copied().filter(|&i| i != usize::MAX));
            }
            Source::Average(v)
        } else {
            return Err(SwedError::Internal(format!("new leaf {x} is unrelated to the old mesh")));
        };
        sources.push(src);
    }

    let mut report = ProjectionReport::default();
    let mut out = State::zeros(n);
    // Interface fields first; the new classification decides the flow values.
    for j in 0..n {
        let g = &new_mesh.geom[j];
        match &sources[j] {
            Source::Copy(c) => out.u[j] = old.state.u[*c],
            Source::Average(cs) => out.u[j] = average(om, old.state, cs),
            Source::FromLeaf(p) => {
                let ld = leaf(*p);
                let d = geometry::sub(g.centroid, ld.centroid);
                out.u[j][PHI] = ld.prim[PHI] + ld.grad[PHI][0] * d[0] + ld.grad[PHI][1] * d[1];
                out.u[j][FRAC] = match (ld.class, ld.chord) {
                    (FluidClass::Mixed, Some(ch)) => fluid1_fraction_below_chord(&new_mesh.triangle(j), &ch),
                    _ => ld.value[FRAC],
                };
            }
        }
    }
    let class = classify(new_mesh, &vertex_levelset(new_mesh, &out));

    let mut donors: FxHashMap<(usize, u8), Option<usize>> = FxHashMap::default();
    for j in 0..n {
        let b = new_bathy.center[j];
        match &sources[j] {
            Source::Copy(_) => report.copied += 1,
            Source::Average(_) => report.averaged += 1,
            Source::FromLeaf(p) => {
                let ld = leaf(*p);
                let prim = if ld.class != FluidClass::Mixed {
                    report.interpolated += 1;
                    let d = geometry::sub(new_mesh.geom[j].centroid, ld.centroid);
                    std::array::from_fn(|m| ld.prim[m] + ld.grad[m][0] * d[0] + ld.grad[m][1] * d[1])
                } else {
                    report.from_donors += 1;
                    let mut donor = |fluid: FluidClass| *donors.entry((*p, fluid.code())).or_insert_with(|| nearest_donor(old, &ld, fluid));
                    let d1 = donor(FluidClass::Fluid1);
                    let d2 = donor(FluidClass::Fluid2);
                    let alpha = match class[j] {
                        FluidClass::Fluid1 => 1.0,
                        FluidClass::Fluid2 => 0.0,
                        FluidClass::Mixed => match ld.chord {
                            Some(ch) => fluid1_fraction_below_chord(&new_mesh.triangle(j), &ch),
                            None => ld.value[FRAC].clamp(0.0, 1.0),
                        },
                    };
                    let pick = |c: Option<usize>| c.map(|c| old.recon.prim[c]);
                    match (pick(d1), pick(d2)) {
                        (Some(a), _) if alpha == 1.0 => a,
                        (_, Some(b)) if alpha == 0.0 => b,
                        (Some(a), Some(b)) => std::array::from_fn(|m| alpha * a[m] + (1.0 - alpha) * b[m]),
                        _ => {
                            report.donor_fallbacks += 1;
                            ld.prim
                        }
                    }
                };
                let w = prim[W].max(b);
                let h = w - b;
                out.u[j][0] = w;
                out.u[j][1] = h * prim[1];
                out.u[j][2] = h * prim[2];
                out.u[j][3] = h * prim[3];
            }
        }
    }
    Ok((out, report))
}

fn dormant_children(hier: &MeshHierarchy, x: usize, cells_of: &[[usize; 2]]) -> Option<[usize; 4]> {
    // Children of a coarsened node are no longer reported by `children`.
    let mut found = Vec::new();
    for (id, c) in cells_of.iter().enumerate() {
        if c[0] != usize::MAX && hier.parent(id) == Some(x) {
            found.push(id);
        }
    }
    (found.len() == 4).then(|| [found[0], found[1], found[2], found[3]])
}

fn average(mesh: &TriMesh, state: &State, cells: &[usize]) -> Vars {
    let mut v = [0.0; NVAR];
    let mut a = 0.0;
    for &c in cells {
        let ac = mesh.geom[c].area;
        a += ac;
        for m in 0..NVAR {
            v[m] += ac * state.u[c][m];
        }
    }
    v.map(|x| x / a)
}

fn leaf_data(old: &OldMesh, cells: [usize; 2]) -> LeafData {
    let m = old.mesh;
    let c0 = cells[0];
    if cells[1] == usize::MAX {
        return LeafData {
            value: old.state.u[c0],
            prim: old.recon.prim[c0],
            grad: old.recon.grad[c0],
            centroid: m.geom[c0].centroid,
            class: old.class[c0],
            chord: old.chords[c0],
            cells,
        };
    }
    let c1 = cells[1];
    let (a0, a1) = (m.geom[c0].area, m.geom[c1].area);
    let t = a0 + a1;
    let mix = |x: f64, y: f64| (a0 * x + a1 * y) / t;
    let value = std::array::from_fn(|k| mix(old.state.u[c0][k], old.state.u[c1][k]));
    let prim = std::array::from_fn(|k| mix(old.recon.prim[c0][k], old.recon.prim[c1][k]));
    let grad = std::array::from_fn(|k| {
        let (g0, g1) = (old.recon.grad[c0][k], old.recon.grad[c1][k]);
        [mix(g0[0], g1[0]), mix(g0[1], g1[1])]
    });
    let (p0, p1) = (m.geom[c0].centroid, m.geom[c1].centroid);
    let centroid = [mix(p0[0], p1[0]), mix(p0[1], p1[1])];
    let class = if old.class[c0] == old.class[c1] { old.class[c0] } else { FluidClass::Mixed };
    let chord = old.chords[c0].or(old.chords[c1]);
    LeafData { value, prim, grad, centroid, class, chord, cells }
}

/// Nearest old single-fluid cell of the given fluid, searched outward from
/// the leaf's cells within five leaf diameters.
fn nearest_donor(old: &OldMesh, ld: &LeafData, fluid: FluidClass) -> Option<usize> {
    let m = old.mesh;
    let start = ld.cells[0];
    let reach = 5.0 * 2.0 * m.geom[start].diameter;
    let mut seen = FxHashMap::default();
    let mut q = VecDeque::new();
    for &c in ld.cells.iter().filter(|&&c| c != usize::MAX) {
        seen.insert(c, ());
        q.push_back(c);
    }
    let mut best: Option<(f64, usize)> = None;
    while let Some(c) = q.pop_front() {
        if old.class[c] == fluid {
            let d = geometry::dist(m.geom[c].centroid, ld.centroid);
            if best.map_or(true, |(bd, bc)| d < bd || (d == bd && c < bc)) {
                best = Some((d, c));
            }
        }
        for nb in m.neighbors[c] {
            if let Neighbor::Cell(i) = nb {
                if !seen.contains_key(&i) && geometry::dist(m.geom[i].centroid, ld.centroid) <= reach {
                    seen.insert(i, ());
                    q.push_back(i);
                }
            }
        }
    }
    best.map(|b| b.1)
}
