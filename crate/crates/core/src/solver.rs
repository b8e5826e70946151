//! The time loop: local-time-stepping SSPRK2 advance, density correction
//! and residual-driven remeshing.

use crate::amr::{cell_indicator, flag_cells, flags_to_requests, project_state, weak_local_residual, AmrSettings, OldMesh, ProjectionReport};
use crate::cu::{BoundaryKind, RhsWorkspace, Selection, SpatialOperator};
use crate::error::{Result, SwedError};
use crate::interface::{classify, correct_densities, vertex_levelset, FluidClass, InterfaceState, Phases};
use crate::mesh::{sample_bathymetry, Bathymetry, BottomProfile, MeshHierarchy, TriMesh};
use crate::state::{PhysicsParams, State, Vars, FRAC, HR, NVAR, W};
use crate::time::{level_dt, reference_dt, LevelSchedule, MAX_HALVINGS};
use std::time::{Duration, Instant};

/// Everything the time loop needs besides the initial data.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub physics: PhysicsParams,
    /// Densities of fluid 1 (`phi > 0`) and fluid 2.
    pub rho: [f64; 2],
    pub bottom: BottomProfile,
    pub boundary: BoundaryKind,
    /// Evolve the level set and volume fraction and treat mixed cells.
    pub track_interface: bool,
    /// Reset single-fluid densities after every global step.
    pub correct_density: bool,
    /// `None` keeps the base mesh.
    pub amr: Option<AmrSettings>,
    /// Step used when all local speeds vanish.
    pub still_dt: f64,
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        if !(self.rho[0] > 0.0 && self.rho[1] > 0.0 && self.rho.iter().all(|r| r.is_finite())) {
            return Err(SwedError::Config(format!("fluid densities must be positive, got {:?}", self.rho)));
        }
        if !(self.still_dt > 0.0 && self.still_dt.is_finite()) {
            return Err(SwedError::Config(format!("still_dt must be positive, got {}", self.still_dt)));
        }
        if let Some(a) = &self.amr {
            a.validate()?;
        }
        Ok(())
    }
}

/// Running totals over a simulation.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub steps: usize,
    /// Level substeps taken (accepted ones).
    pub substeps: usize,
    /// Substeps repeated with a halved step after a positivity failure.
    pub halvings: usize,
    /// Smallest depth and `h rho` seen after any Runge-Kutta stage.
    pub min_depth: f64,
    pub min_hrho: f64,
    pub max_cells: usize,
    /// Sum over steps of the active cell count.
    pub cell_steps: usize,
    pub unassigned_mass: f64,
    pub projection: ProjectionReport,
    /// Wall-clock time spent advancing and correcting.
    pub evolve: Duration,
    /// Wall-clock time spent on indicators, remeshing and projection.
    pub grid: Duration,
}

/// Outcome of one global step.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub dt: f64,
    pub a_max: f64,
    pub levels: usize,
    pub cells: usize,
}

pub struct Simulation {
    pub settings: SolverSettings,
    pub hierarchy: MeshHierarchy,
    pub mesh: TriMesh,
    pub bathy: Bathymetry,
    pub state: State,
    pub time: f64,
    pub stats: RunStats,
    op: SpatialOperator,
    schedule: LevelSchedule,
    ws: RhsWorkspace,
}

fn add_report(a: &mut ProjectionReport, b: &ProjectionReport) {
    a.copied += b.copied;
    a.averaged += b.averaged;
    a.interpolated += b.interpolated;
    a.from_donors += b.from_donors;
    a.donor_fallbacks += b.donor_fallbacks;
}

/// Failure inside a level substep that a smaller step may cure.
enum SubstepError {
    Positivity { cell: usize, what: &'static str },
    Fatal(SwedError),
}

impl From<SwedError> for SubstepError {
    fn from(e: SwedError) -> Self {
        SubstepError::Fatal(e)
    }
}

impl Simulation {
    /// Start from the given base mesh and initial averages.
    pub fn new(settings: SolverSettings, mesh: TriMesh, bathy: Bathymetry, state: State) -> Result<Self> {
        settings.validate()?;
        if state.len() != mesh.n_cells() || bathy.center.len() != mesh.n_cells() {
            return Err(SwedError::InvalidData(format!(
                "state has {} cells and bathymetry {} for a mesh of {}",
                state.len(),
                bathy.center.len(),
                mesh.n_cells()
            )));
        }
        if let Some(j) = state.u.iter().position(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(SwedError::InvalidData(format!("non-finite initial value in cell {j}")));
        }
        let hierarchy = MeshHierarchy::new(&mesh);
        let op = SpatialOperator::new(&mesh, settings.physics, settings.track_interface, settings.rho).with_boundary(settings.boundary);
        let schedule = LevelSchedule::new(&mesh);
        let n = mesh.n_cells();
        let stats = RunStats { min_depth: f64::INFINITY, min_hrho: f64::INFINITY, max_cells: n, ..Default::default() };
        Ok(Simulation { settings, hierarchy, mesh, bathy, state, time: 0.0, stats, op, schedule, ws: RhsWorkspace::default() })
    }

    pub fn operator(&self) -> &SpatialOperator {
        &self.op
    }

    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    /// Classification and chords of the current state.
    pub fn interface(&self) -> InterfaceState {
        InterfaceState::build(&self.mesh, &self.state)
    }

    /// Vertex level set and cell classes of the current state.
    fn classification(&self) -> (Vec<f64>, Vec<FluidClass>) {
        if self.settings.track_interface {
            let vphi = vertex_levelset(&self.mesh, &self.state);
            let class = classify(&self.mesh, &vphi);
            (vphi, class)
        } else {
            (Vec::new(), vec![FluidClass::Fluid1; self.mesh.n_cells()])
        }
    }

    /// Advance to `t_end` (or less if that is more than one step away).
    pub fn step(&mut self, t_end: f64) -> Result<StepInfo> {
        let remaining = t_end - self.time;
        if !(remaining > 0.0) {
            return Err(SwedError::InvalidArgument(format!("step requested to t = {t_end} from t = {}", self.time)));
        }
        let t0 = Instant::now();
        let (vphi, class) = self.classification();
        let ph = Phases { class: &class, vertex_phi: &vphi };

        let old = self.state.clone();
        let n = self.mesh.n_cells();
        let mut rhs0 = vec![[0.0; NVAR]; n];
        let a_max = self.op.eval(&self.mesh, &self.bathy, ph, &old.u, Selection::All, &mut self.ws, &mut rhs0)?;
        let mut dt = reference_dt(self.schedule.r_max, a_max, self.settings.physics.sigma, self.settings.still_dt);
        if dt >= remaining || remaining - dt < 1e-12 * remaining {
            dt = remaining;
        }
        let levels = self.schedule.n_levels();
        let new = self.advance(ph, &old.u, &rhs0, a_max, dt)?;
        self.state.u = new;
        self.time = if dt == remaining { t_end } else { self.time + dt };

        if self.settings.track_interface && self.settings.correct_density {
            let class = classify(&self.mesh, &vertex_levelset(&self.mesh, &self.state));
            let r = correct_densities(&self.mesh, &self.bathy, &mut self.state, &class, self.settings.rho);
            self.stats.unassigned_mass += r.unassigned_mass;
        }
        self.stats.steps += 1;
        self.stats.cell_steps += n;
        self.stats.evolve += t0.elapsed();

        if let Some(amr) = self.settings.amr {
            let t1 = Instant::now();
            self.remesh(&amr, &old, dt)?;
            self.stats.grid += t1.elapsed();
        }
        self.stats.max_cells = self.stats.max_cells.max(self.mesh.n_cells());
        Ok(StepInfo { dt, a_max, levels, cells: n })
    }

    /// Step until `t_end`, calling `observe` after every step.
    pub fn run_until(&mut self, t_end: f64, mut observe: impl FnMut(&Simulation, &StepInfo)) -> Result<()> {
        while self.time < t_end {
            let info = self.step(t_end).map_err(|e| match e {
                SwedError::PositivityLost { .. } => e,
                other => SwedError::Internal(format!("step {} at t = {}: {other}", self.stats.steps + 1, self.time)),
            })?;
            observe(self, &info);
        }
        Ok(())
    }

    /// Weak local residual indicator of the step `old -> current state`.
    pub fn indicator(&self, old: &State, dt: f64) -> Vec<f64> {
        let res = weak_local_residual(&self.mesh, &self.bathy, &self.op.desing, self.settings.physics.rho0, old, &self.state, dt);
        cell_indicator(&self.mesh, &res)
    }

    fn remesh(&mut self, amr: &AmrSettings, old: &State, dt: f64) -> Result<()> {
        let e = self.indicator(old, dt);
        let flags = flag_cells(&e, &self.mesh, amr);
        let (refine, coarsen) = flags_to_requests(&self.mesh, &self.hierarchy, &flags);
        if refine.is_empty() && coarsen.is_empty() {
            return Ok(());
        }
        let iface = InterfaceState::build(&self.mesh, &self.state);
        let class = if self.settings.track_interface { iface.class.clone() } else { vec![FluidClass::Fluid1; self.mesh.n_cells()] };
        let mut recon = RhsWorkspace::default();
        let ph = Phases { class: &class, vertex_phi: &iface.vertex_phi };
        self.op.reconstruct_all(&self.mesh, &self.bathy, ph, &self.state.u, &mut recon);

        let outcome = self.hierarchy.adapt(&refine, &coarsen);
        if outcome.refined == 0 && outcome.coarsened == 0 {
            return Ok(());
        }
        let new_mesh = self.hierarchy.active_mesh()?;
        let bottom = self.settings.bottom;
        let new_bathy = sample_bathymetry(&new_mesh, |x, y| bottom.eval(x, y))?;
        let chords = if self.settings.track_interface { iface.segments.clone() } else { vec![None; self.mesh.n_cells()] };
        let (state, report) = project_state(
            &OldMesh { mesh: &self.mesh, state: &self.state, recon: &recon, class: &class, chords: &chords },
            &self.hierarchy,
            &new_mesh,
            &new_bathy,
        )?;
        add_report(&mut self.stats.projection, &report);
        self.op = SpatialOperator::new(&new_mesh, self.settings.physics, self.settings.track_interface, self.settings.rho).with_boundary(self.settings.boundary);
        self.schedule = LevelSchedule::new(&new_mesh);
        self.mesh = new_mesh;
        self.bathy = new_bathy;
        self.state = state;
        Ok(())
    }

    /// Check a stage on `cells`, recording the smallest depth and `h rho`.
    fn check(&mut self, u: &[Vars], cells: Option<&[usize]>) -> std::result::Result<(), SubstepError> {
        let mut probe = |j: usize| -> std::result::Result<(), SubstepError> {
            let v = &u[j];
            if v.iter().any(|x| !x.is_finite()) {
                return Err(SubstepError::Fatal(SwedError::Internal(format!("non-finite value in cell {j} at t = {}", self.time))));
            }
            let h = v[W] - self.bathy.center[j];
            let tol = 1e-13 * (1.0 + v[W].abs());
            if h < -tol {
                return Err(SubstepError::Positivity { cell: j, what: "negative depth" });
            }
            if v[HR] < -tol * self.settings.physics.rho0 {
                return Err(SubstepError::Positivity { cell: j, what: "negative h rho" });
            }
            self.stats.min_depth = self.stats.min_depth.min(h);
            self.stats.min_hrho = self.stats.min_hrho.min(v[HR]);
            Ok(())
        };
        match cells {
            None => (0..u.len()).try_for_each(&mut probe),
            Some(c) => c.iter().try_for_each(|&j| probe(j)),
        }
    }

    /// Advance every level from `self.time` to `self.time + dt`.
    fn advance(&mut self, ph: Phases, u0: &[Vars], rhs0: &[Vars], a_max: f64, dt: f64) -> Result<Vec<Vars>> {
        let n = u0.len();
        let nl = self.schedule.n_levels();
        let t_start = self.time;
        let t_stop = t_start + dt;
        let mut t_prev = vec![t_start; nl];
        let mut t_cur = vec![t_start; nl];
        let mut prev = u0.to_vec();
        let mut cur = u0.to_vec();
        let mut snap = u0.to_vec();
        let mut k1 = vec![[0.0; NVAR]; n];
        let mut k2 = vec![[0.0; NVAR]; n];
        let mut fresh = vec![true; nl];
        let schedule = self.schedule.clone();
        let level_of = &schedule.level;
        let done = |tc: f64| t_stop - tc <= 1e-14 * dt;

        loop {
            let next = (0..nl).filter(|&l| !schedule.cells[l].is_empty() && !done(t_cur[l])).min_by(|&a, &b| t_cur[a].total_cmp(&t_cur[b]).then(a.cmp(&b)));
            let Some(l) = next else { break };
            let tau = t_cur[l];
            let cells = &schedule.cells[l];
            let sel = if nl == 1 {
                Selection::All
            } else {
                Selection::Subset { cells, ring: &schedule.ring[l], edges: &schedule.edges[l] }
            };

            let mu = if fresh[l] {
                for &j in cells {
                    k1[j] = rhs0[j];
                }
                fresh[l] = false;
                0.0
            } else {
                fill_snapshot(&mut snap, &prev, &cur, level_of, &t_prev, &t_cur, tau);
                let a = self.op.eval(&self.mesh, &self.bathy, ph, &snap, sel, &mut self.ws, &mut k1)?;
                if a_max > 0.0 {
                    a / a_max
                } else {
                    0.0
                }
            };
            let mut h = level_dt(dt, l as u8, mu);
            if done(tau + h) || tau + h > t_stop {
                h = t_stop - tau;
            }

            let mut attempt = 0;
            loop {
                let t_mid = tau + h;
                fill_snapshot(&mut snap, &prev, &cur, level_of, &t_prev, &t_cur, t_mid);
                for &j in cells {
                    snap[j] = euler(&cur[j], &k1[j], h);
                }
                let mut result = self.check(&snap, if nl == 1 { None } else { Some(cells) });
                if result.is_ok() {
                    self.op.eval(&self.mesh, &self.bathy, ph, &snap, sel, &mut self.ws, &mut k2)?;
                    for &j in cells {
                        let s = euler(&snap[j], &k2[j], h);
                        let mut v = [0.0; NVAR];
                        for m in 0..NVAR {
                            v[m] = 0.5 * cur[j][m] + 0.5 * s[m];
                        }
                        v[FRAC] = v[FRAC].clamp(0.0, 1.0);
                        snap[j] = v;
                    }
                    result = self.check(&snap, if nl == 1 { None } else { Some(cells) });
                }
                match result {
                    Ok(()) => break,
                    Err(SubstepError::Fatal(e)) => return Err(e),
                    Err(SubstepError::Positivity { cell, what }) => {
                        if attempt == MAX_HALVINGS {
                            return Err(SwedError::PositivityLost { cell, time: tau, what: format!("{what} after {MAX_HALVINGS} step halvings") });
                        }
                        attempt += 1;
                        self.stats.halvings += 1;
                        h *= 0.5;
                    }
                }
            }
            for &j in cells {
                prev[j] = cur[j];
                cur[j] = snap[j];
            }
            t_prev[l] = tau;
            t_cur[l] = if done(tau + h) { t_stop } else { tau + h };
            self.stats.substeps += 1;
        }
        Ok(cur)
    }
}

#[inline]
fn euler(u: &Vars, k: &Vars, h: f64) -> Vars {
    let mut v = [0.0; NVAR];
    for m in 0..NVAR {
        v[m] = u[m] + h * k[m];
    }
    v[FRAC] = v[FRAC].clamp(0.0, 1.0);
    v
}

/// State of every cell at time `tau`: cells whose level has reached `tau`
/// hold their latest value; the others are interpolated linearly between
/// their two most recent substates.
fn fill_snapshot(snap: &mut [Vars], prev: &[Vars], cur: &[Vars], level: &[u8], t_prev: &[f64], t_cur: &[f64], tau: f64) {
    for j in 0..snap.len() {
        let l = level[j] as usize;
        let (a, b) = (t_prev[l], t_cur[l]);
        if b <= tau || b <= a {
            snap[j] = cur[j];
        } else {
            let s = ((tau - a) / (b - a)).clamp(0.0, 1.0);
            let (p, c) = (&prev[j], &cur[j]);
            for m in 0..NVAR {
                snap[j][m] = p[m] + s * (c[m] - p[m]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform, Domain};
    use crate::state::PHI;

    fn lake(profile: BottomProfile, nx: usize) -> (TriMesh, Bathymetry, State) {
        let m = build_uniform(nx, nx, Domain::SQUARE).unwrap();
        let b = sample_bathymetry(&m, |x, y| profile.eval(x, y)).unwrap();
        let mut s = State::zeros(m.n_cells());
        for j in 0..m.n_cells() {
            let h = 2.0 - b.center[j];
            s.u[j] = [2.0, 0.0, 0.0, h * 997.0, 1.0, 1.0];
        }
        (m, b, s)
    }

    fn settings(profile: BottomProfile) -> SolverSettings {
        SolverSettings {
            physics: PhysicsParams::default(),
            rho: [997.0, 997.0],
            bottom: profile,
            boundary: BoundaryKind::Transmissive,
            track_interface: false,
            correct_density: false,
            amr: None,
            still_dt: 1e-3,
        }
    }

    #[test]
    fn lake_at_rest_is_preserved() {
        let (m, b, s) = lake(BottomProfile::TwoHumps, 10);
        let mut sim = Simulation::new(settings(BottomProfile::TwoHumps), m, b, s.clone()).unwrap();
        sim.step(1.0).unwrap();
        for (a, b) in sim.state.u.iter().zip(&s.u) {
            assert!((a[W] - b[W]).abs() < 1e-13 && a[1].abs() < 1e-13 && a[PHI] == b[PHI]);
        }
    }

    #[test]
    fn step_lands_on_end_time() {
        let (m, b, s) = lake(BottomProfile::Flat, 4);
        let mut sim = Simulation::new(settings(BottomProfile::Flat), m, b, s).unwrap();
        let mut dts = Vec::new();
        sim.run_until(0.1, |_, i| dts.push(i.dt)).unwrap();
        assert_eq!(sim.time, 0.1);
        assert!(dts.len() > 2 && dts.iter().all(|&d| d > 0.0), "{dts:?}");
    }

    #[test]
    fn snapshot_interpolates_lagging_levels() {
        let prev = vec![[0.0; NVAR], [1.0; NVAR]];
        let cur = vec![[2.0; NVAR], [3.0; NVAR]];
        let mut snap = vec![[0.0; NVAR]; 2];
        fill_snapshot(&mut snap, &prev, &cur, &[0, 1], &[0.0, 0.5], &[1.0, 0.5], 0.25);
        assert_eq!(snap[0][0], 0.5);
        assert_eq!(snap[1][0], 3.0);
    }
}
