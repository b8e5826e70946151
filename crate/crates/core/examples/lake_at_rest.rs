//! Still water over two bottom humps stays still.
//!
//! Usage: `cargo run --release --example lake_at_rest [N] [STEPS]`

use swed::scenario::{ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let cfg = ScenarioConfig { nx: n, ny: n, end_time: 10.0, ..ScenarioConfig::preset(ScenarioId::LakeAtRest) };
    let mut sim = cfg.simulation()?;
    for _ in 0..steps {
        sim.step(cfg.end_time)?;
    }
    let w0 = cfg.inside[0];
    let dw = sim.state.u.iter().map(|v| (v[0] - w0).abs()).fold(0.0, f64::max);
    let q = sim.state.u.iter().map(|v| v[1].abs().max(v[2].abs())).fold(0.0, f64::max);
    println!("{} cells, {steps} steps to t = {:.4}", sim.mesh.n_cells(), sim.time);
    println!("max |w - {w0}| = {dw:.3e}, max |hu|,|hv| = {q:.3e}");
    Ok(())
}
