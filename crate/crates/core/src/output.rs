//! Snapshot writers: one CSV row or VTK cell per active triangle.

use crate::error::Result;
use crate::interface::InterfaceState;
use crate::mesh::{Bathymetry, TriMesh};
use crate::reconstruction::Desingularization;
use crate::scenario::OutputFormat;
use crate::solver::Simulation;
use crate::state::{State, FRAC, HR, HU, HV, PHI, W};
use std::io::Write;
use std::path::Path;

/// Everything a snapshot shows.
pub struct SnapshotView<'a> {
    pub mesh: &'a TriMesh,
    pub bathy: &'a Bathymetry,
    pub state: &'a State,
    pub interface: &'a InterfaceState,
    pub desing: &'a Desingularization,
    pub time: f64,
}

pub const CSV_HEADER: &str = "id,x,y,level,class,w,hu,hv,hrho,rho,phi,f,seg_x0,seg_y0,seg_x1,seg_y1";

impl SnapshotView<'_> {
    fn density(&self, j: usize) -> f64 {
        let u = &self.state.u[j];
        let h = (u[W] - self.bathy.center[j]).max(0.0);
        self.desing.ratio(h, u[HR])
    }

    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for j in 0..self.mesh.n_cells() {
            let u = &self.state.u[j];
            let c = self.mesh.geom[j].centroid;
            let cls = self.interface.class[j];
            write!(
                out,
                "{j},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                c[0],
                c[1],
                self.mesh.level[j],
                cls.label(),
                u[W],
                u[HU],
                u[HV],
                u[HR],
                self.density(j),
                u[PHI],
                u[FRAC]
            )?;
            match &self.interface.segments[j] {
                Some(s) => writeln!(out, ",{:.16e},{:.16e},{:.16e},{:.16e}", s.a[0], s.a[1], s.b[0], s.b[1])?,
                None => writeln!(out, ",,,,")?,
            }
        }
        Ok(())
    }

    /// Legacy ASCII VTK unstructured grid with cell data.
    pub fn write_vtk(&self, out: &mut impl Write) -> Result<()> {
        let m = self.mesh;
        let n = m.n_cells();
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "shallow water snapshot t={:.16e}", self.time)?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
        writeln!(out, "POINTS {} double", m.n_vertices())?;
        for p in &m.vertices {
            writeln!(out, "{:.16e} {:.16e} 0", p[0], p[1])?;
        }
        writeln!(out, "CELLS {n} {}", 4 * n)?;
        for c in &m.cells {
            writeln!(out, "3 {} {} {}", c[0], c[1], c[2])?;
        }
        writeln!(out, "CELL_TYPES {n}")?;
        for _ in 0..n {
            writeln!(out, "5")?;
        }
        writeln!(out, "CELL_DATA {n}")?;
        let scalar = |out: &mut dyn Write, name: &str, f: &dyn Fn(usize) -> f64| -> Result<()> {
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for j in 0..n {
                writeln!(out, "{:.16e}", f(j))?;
            }
            Ok(())
        };
        let u = &self.state.u;
        scalar(out, "w", &|j| u[j][W])?;
        scalar(out, "hu", &|j| u[j][HU])?;
        scalar(out, "hv", &|j| u[j][HV])?;
        scalar(out, "hrho", &|j| u[j][HR])?;
        scalar(out, "rho", &|j| self.density(j))?;
        scalar(out, "phi", &|j| u[j][PHI])?;
        scalar(out, "f", &|j| u[j][FRAC])?;
        scalar(out, "bottom", &|j| self.bathy.center[j])?;
        writeln!(out, "SCALARS level int 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for j in 0..n {
            writeln!(out, "{}", m.level[j])?;
        }
        writeln!(out, "SCALARS class int 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for j in 0..n {
            writeln!(out, "{}", self.interface.class[j].code())?;
        }
        Ok(())
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        match format {
            OutputFormat::Csv => self.write_csv(&mut w)?,
            OutputFormat::Vtk => self.write_vtk(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }
}

/// Write the current state of a simulation.
pub fn write_snapshot(sim: &Simulation, path: &Path, format: OutputFormat) -> Result<()> {
    let iface = sim.interface();
    SnapshotView { mesh: &sim.mesh, bathy: &sim.bathy, state: &sim.state, interface: &iface, desing: &sim.operator().desing, time: sim.time }.write(path, format)
}
