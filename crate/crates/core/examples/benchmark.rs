//! Wall-clock ratio of a uniform run to an adaptive run that reaches the
//! same finest resolution.
//!
//! Usage: `cargo run --release --example benchmark [example1-flat|example2] [N] [LEVELS]`

use swed::driver::benchmark;
use swed::scenario::{ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let mut args = std::env::args().skip(1);
    let id = match args.next().as_deref() {
        Some("example1-flat") => ScenarioId::Example1Flat,
        _ => ScenarioId::Example2,
    };
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let levels: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let cfg = ScenarioConfig { nx: n, ny: n, ..ScenarioConfig::preset(id) };
    let b = benchmark(&cfg, levels)?;
    for (name, r) in [("uniform", &b.uniform), ("adaptive", &b.adaptive)] {
        println!("{name:>8}: mean cells {:8.0}  total {:7.3} s  grid {:7.3} s", r.mean_cells(), r.total_secs, r.grid_secs);
    }
    println!("R_CPU total {:.2}, without grid generation {:.2}", b.r_cpu_total, b.r_cpu_evolve);
    Ok(())
}
