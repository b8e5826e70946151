//! Circular dam break on an adaptive mesh: the weak local residual drives
//! refinement along the moving waves and the density front.
//!
//! Usage: `cargo run --release --example adaptive_dam_break [N] [LEVELS]`

use swed::scenario::{ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(25);
    let levels: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = ScenarioConfig { nx: n, ny: n, adaptive: true, max_level: levels, ..ScenarioConfig::preset(ScenarioId::Example1Flat) };
    let mut sim = cfg.simulation()?;
    let mut next_report = 0.0;
    sim.run_until(cfg.end_time, |s, info| {
        if s.time >= next_report {
            println!("t = {:.4}  dt = {:.2e}  cells = {:6}  time levels = {}", s.time, info.dt, s.mesh.n_cells(), info.levels);
            next_report += cfg.end_time / 10.0;
        }
    })?;
    let s = &sim.stats;
    println!("uniform fine grid would have {} cells", 2 * (n << levels) * (n << levels));
    println!("evolution {:.2?}, grid {:.2?}, projection {:?}", s.evolve, s.grid, s.projection);
    Ok(())
}
