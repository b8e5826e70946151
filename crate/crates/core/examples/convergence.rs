//! L1 errors of the dam break on uniform grids against a finer uniform run.
//!
//! Usage: `cargo run --release --example convergence [N1,N2,...] [NREF]`

use swed::driver::convergence;
use swed::scenario::{ScenarioConfig, ScenarioId};

fn main() -> swed::Result<()> {
    let mut args = std::env::args().skip(1);
    let levels: Vec<usize> = args.next().map(|s| s.split(',').filter_map(|x| x.parse().ok()).collect()).unwrap_or_else(|| vec![25, 50]);
    let reference = args.next().and_then(|s| s.parse().ok()).unwrap_or(2 * levels.iter().max().copied().unwrap_or(50));
    let cfg = ScenarioConfig::preset(ScenarioId::Example1Flat);
    let rep = convergence(&cfg, &levels, reference)?;
    println!("reference N = {}", rep.reference_n);
    for r in &rep.rows {
        let rate = r.rate_w.map_or("   -".into(), |x| format!("{x:.2}"));
        println!("N = {:4}  L1(w) = {:.4e}  rate {rate}", r.n, r.l1[0]);
    }
    Ok(())
}
