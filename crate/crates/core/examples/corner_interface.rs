//! An L-shaped region of light fluid with a rounded corner over a bottom
//! hump. Prints how many cells carry the interface and writes a CSV
//! snapshot with the interface chords.
//!
//! Usage: `cargo run --release --example corner_interface [N] [OUT.csv]`

use swed::interface::FluidClass;
use swed::output::write_snapshot;
use swed::scenario::{OutputFormat, ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(40);
    let out = args.next().unwrap_or_else(|| "corner_interface.csv".into());
    let cfg = ScenarioConfig { nx: n, ny: n, end_time: 0.1, ..ScenarioConfig::preset(ScenarioId::Example3) };
    let mut sim = cfg.simulation()?;
    let mixed = |s: &swed::solver::Simulation| s.interface().class.iter().filter(|&&c| c == FluidClass::Mixed).count();
    println!("t = 0.0000: {} mixed cells", mixed(&sim));
    for k in 1..=4 {
        sim.run_until(cfg.end_time * k as f64 / 4.0, |_, _| {})?;
        println!("t = {:.4}: {} mixed cells", sim.time, mixed(&sim));
    }
    write_snapshot(&sim, std::path::Path::new(&out), OutputFormat::Csv)?;
    println!("wrote {out}");
    Ok(())
}
