//! Circular dam break with a density jump on a uniform grid.
//!
//! Usage: `cargo run --example dam_break [N]`

use swed::scenario::{ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let cfg = ScenarioConfig { nx: n, ny: n, ..ScenarioConfig::preset(ScenarioId::Example1Flat) };
    let mut sim = cfg.simulation()?;
    let start = std::time::Instant::now();
    sim.run_until(cfg.end_time, |_, _| {})?;
    let s = &sim.stats;
    println!("cells {}  steps {}  wall {:.2?}", sim.mesh.n_cells(), s.steps, start.elapsed());
    println!("min depth {:.6}  min h*rho {:.6}", s.min_depth, s.min_hrho);
    let wmax = sim.state.u.iter().map(|v| v[0]).fold(f64::MIN, f64::max);
    let wmin = sim.state.u.iter().map(|v| v[0]).fold(f64::MAX, f64::min);
    println!("w in [{wmin:.4}, {wmax:.4}]  unassigned mass {:.3e}", s.unassigned_mass);
    Ok(())
}
