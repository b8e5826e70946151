//! Run a scenario from a TOML config and write CSV or VTK snapshots, the
//! same as `swed run`.
//!
//! Usage: `cargo run --release --example snapshot_output CONFIG [OUT_DIR]`

use swed::driver::{output_plan, run};
use swed::scenario::ScenarioConfig;

fn main() -> swed::Result<()> {
    let mut args = std::env::args().skip(1);
    let Some(path) = args.next() else {
        eprintln!("usage: snapshot_output CONFIG [OUT_DIR]");
        std::process::exit(2);
    };
    let cfg = ScenarioConfig::load(&path)?;
    let dir = args.next().map(std::path::PathBuf::from);
    let plan = output_plan(&cfg, dir.as_deref(), None, None);
    let (_, report) = run(&cfg, Some(&plan))?;
    for p in &report.snapshots {
        println!("{}", p.display());
    }
    Ok(())
}
