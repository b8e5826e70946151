//! Scenario driver: full runs with snapshot output, L1 errors against a
//! reference run, convergence sweeps and the uniform-vs-adaptive benchmark.

use crate::error::{Result, SwedError};
use crate::mesh::{PointLocator, TriMesh};
use crate::output::write_snapshot;
use crate::scenario::{OutputFormat, ScenarioConfig};
use crate::solver::{RunStats, Simulation};
use crate::state::{State, HR, HU, HV, W};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Where and how often to write snapshots.
#[derive(Debug, Clone)]
pub struct OutputPlan {
    pub dir: PathBuf,
    pub format: OutputFormat,
    /// Number of output intervals; snapshots are written at `k T / n`.
    pub intervals: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub end_time: f64,
    pub stats: RunStats,
    pub final_cells: usize,
    /// `(t, active cells)` after every step, starting with the initial mesh.
    pub cell_counts: Vec<(f64, usize)>,
    /// Wall-clock seconds of the whole run, setup and output included.
    pub total_secs: f64,
    pub evolve_secs: f64,
    pub grid_secs: f64,
    pub snapshots: Vec<PathBuf>,
}

impl RunReport {
    /// Time-averaged number of active cells.
    pub fn mean_cells(&self) -> f64 {
        let c = &self.cell_counts;
        if c.len() < 2 || self.end_time <= 0.0 {
            return c.first().map_or(0.0, |x| x.1 as f64);
        }
        let mut s = 0.0;
        for w in c.windows(2) {
            s += (w[1].0 - w[0].0) * w[0].1 as f64;
        }
        s / self.end_time
    }
}

/// Run a scenario to its end time, writing snapshots if `output` is given.
pub fn run(cfg: &ScenarioConfig, output: Option<&OutputPlan>) -> Result<(Simulation, RunReport)> {
    let start = Instant::now();
    let mut sim = cfg.simulation()?;
    let t_end = cfg.end_time;
    let mut snapshots = Vec::new();
    let mut times = Vec::new();
    if let Some(plan) = output {
        std::fs::create_dir_all(&plan.dir)?;
        let n = plan.intervals.max(1);
        times = (0..=n).map(|k| if k == n { t_end } else { t_end * k as f64 / n as f64 }).collect();
        times.dedup();
    }
    let write = |sim: &Simulation, k: usize, snapshots: &mut Vec<PathBuf>| -> Result<()> {
        let plan = output.expect("snapshot without plan");
        let ext = match plan.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Vtk => "vtk",
        };
        let path = plan.dir.join(format!("{}_{k:04}.{ext}", cfg.scenario.name()));
        write_snapshot(sim, &path, plan.format)?;
        snapshots.push(path);
        Ok(())
    };

    let mut cell_counts = vec![(0.0, sim.mesh.n_cells())];
    let mut next = 0;
    if times.first() == Some(&0.0) {
        write(&sim, 0, &mut snapshots)?;
        next = 1;
    }
    while sim.time < t_end {
        let target = times.get(next).copied().unwrap_or(t_end);
        sim.run_until(target, |s, _| cell_counts.push((s.time, s.mesh.n_cells())))?;
        if next < times.len() {
            write(&sim, next, &mut snapshots)?;
            next += 1;
        }
    }
    let stats = sim.stats.clone();
    let report = RunReport {
        scenario: cfg.scenario.name().to_string(),
        end_time: t_end,
        final_cells: sim.mesh.n_cells(),
        cell_counts,
        total_secs: start.elapsed().as_secs_f64(),
        evolve_secs: stats.evolve.as_secs_f64(),
        grid_secs: stats.grid.as_secs_f64(),
        stats,
        snapshots,
    };
    Ok((sim, report))
}

/// A finished run used as the exact solution.
pub struct Reference {
    pub mesh: TriMesh,
    pub state: State,
    locator: PointLocator,
}

impl Reference {
    pub fn new(mesh: TriMesh, state: State) -> Self {
        let locator = PointLocator::new(&mesh);
        Reference { mesh, state, locator }
    }

    pub fn from_simulation(sim: Simulation) -> Self {
        Reference::new(sim.mesh, sim.state)
    }
}

/// Per-variable L1 errors `(w, hu, hv, hrho)`: the sum over cells of
/// `|T_j| |u_j - u_ref(x_j)|`, where `u_ref` is the reference average of
/// the reference cell containing the barycenter `x_j`.
pub fn l1_error(mesh: &TriMesh, state: &State, reference: &Reference) -> Result<[f64; 4]> {
    let mut e = [0.0; 4];
    for j in 0..mesh.n_cells() {
        let g = &mesh.geom[j];
        let r = reference.locator.locate(&reference.mesh, g.centroid).ok_or_else(|| {
            SwedError::InvalidData(format!("barycenter ({}, {}) of cell {j} lies outside the reference mesh", g.centroid[0], g.centroid[1]))
        })?;
        for (k, &m) in [W, HU, HV, HR].iter().enumerate() {
            e[k] += g.area * (state.u[j][m] - reference.state.u[r][m]).abs();
        }
    }
    Ok(e)
}

/// Observed order between two resolutions `n1 < n2`.
pub fn rate(e1: f64, e2: f64, n1: usize, n2: usize) -> f64 {
    (e1 / e2).ln() / (n2 as f64 / n1 as f64).ln()
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub cells: usize,
    pub l1: [f64; 4],
    /// Rate of `w` relative to the previous row.
    pub rate_w: Option<f64>,
    pub secs: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub reference_n: usize,
    pub reference_secs: f64,
    pub rows: Vec<ConvergenceRow>,
}

/// Uniform runs at each `levels` entry (`nx = ny = N`) against a uniform
/// reference run at `reference_n`.
pub fn convergence(cfg: &ScenarioConfig, levels: &[usize], reference_n: usize) -> Result<ConvergenceReport> {
    if levels.is_empty() {
        return Err(SwedError::InvalidArgument("no resolutions given".into()));
    }
    if let Some(&n) = levels.iter().find(|&&n| n >= reference_n) {
        return Err(SwedError::InvalidArgument(format!("resolution {n} is not coarser than the reference {reference_n}")));
    }
    let uniform = |n: usize| {
        let mut c = cfg.clone();
        c.nx = n;
        c.ny = n;
        c.adaptive = false;
        c
    };
    let (reference, reference_secs) = {
        let (sim, rep) = run(&uniform(reference_n), None)?;
        (Reference::from_simulation(sim), rep.total_secs)
    };
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for n in sorted {
        let (sim, rep) = run(&uniform(n), None)?;
        let l1 = l1_error(&sim.mesh, &sim.state, &reference)?;
        let rate_w = rows.last().map(|p| rate(p.l1[0], l1[0], p.n, n));
        rows.push(ConvergenceRow { n, cells: sim.mesh.n_cells(), l1, rate_w, secs: rep.total_secs });
    }
    Ok(ConvergenceReport { reference_n, reference_secs, rows })
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub uniform: RunReport,
    pub adaptive: RunReport,
    pub max_level: u8,
    /// Uniform over adaptive total wall-clock time.
    pub r_cpu_total: f64,
    /// The same ratio with grid generation left out of the adaptive time.
    pub r_cpu_evolve: f64,
}

/// Uniform run at the configured `nx`, `ny` against an adaptive run from
/// `nx / 2^M` with `M = levels`, so both share the finest resolution.
pub fn benchmark(cfg: &ScenarioConfig, levels: u8) -> Result<BenchmarkReport> {
    let f = 1usize << levels;
    if cfg.nx % f != 0 || cfg.ny % f != 0 {
        return Err(SwedError::InvalidArgument(format!("base grid {}x{} is not divisible by 2^{levels}", cfg.nx, cfg.ny)));
    }
    let mut u = cfg.clone();
    u.adaptive = false;
    let mut a = cfg.clone();
    a.adaptive = levels > 0;
    a.max_level = levels;
    a.nx /= f;
    a.ny /= f;
    let (_, uniform) = run(&u, None)?;
    let (_, adaptive) = run(&a, None)?;
    let r_cpu_total = uniform.total_secs / adaptive.total_secs;
    let r_cpu_evolve = (uniform.total_secs - uniform.grid_secs) / (adaptive.total_secs - adaptive.grid_secs);
    Ok(BenchmarkReport { uniform, adaptive, max_level: levels, r_cpu_total, r_cpu_evolve })
}

/// Output plan from the config, with optional command-line overrides.
pub fn output_plan(cfg: &ScenarioConfig, dir: Option<&Path>, format: Option<OutputFormat>, intervals: Option<usize>) -> OutputPlan {
    OutputPlan {
        dir: dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.output_dir)),
        format: format.unwrap_or(cfg.format),
        intervals: intervals.unwrap_or(cfg.snapshots),
    }
}
