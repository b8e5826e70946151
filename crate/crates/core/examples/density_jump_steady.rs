//! Two fluids of different density at rest, joined along a circle with
//! equal pressure `h^2 rho` on both sides. The adaptive solver keeps the
//! state steady and does not refine.
//!
//! Usage: `cargo run --release --example density_jump_steady [N]`

use swed::interface::FluidClass;
use swed::scenario::{ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let cfg = ScenarioConfig { nx: n, ny: n, adaptive: true, max_level: 1, ..ScenarioConfig::preset(ScenarioId::Example2) };
    let mut sim = cfg.simulation()?;
    let w0: Vec<f64> = sim.state.u.iter().map(|v| v[0]).collect();
    sim.run_until(cfg.end_time, |_, _| {})?;
    let iface = sim.interface();
    let single = (0..sim.mesh.n_cells()).filter(|&j| iface.class[j] != FluidClass::Mixed);
    let dw = single.map(|j| (sim.state.u[j][0] - w0[j]).abs()).fold(0.0, f64::max);
    println!("t = {}, {} steps, {} cells (max {})", sim.time, sim.stats.steps, sim.mesh.n_cells(), sim.stats.max_cells);
    println!("max |w - w0| over single-fluid cells: {dw:.3e}");
    Ok(())
}
