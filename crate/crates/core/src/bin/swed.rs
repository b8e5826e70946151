use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use swed::driver::{self, benchmark, convergence, output_plan};
use swed::scenario::{OutputFormat, ScenarioConfig};

/// Environment variable capping the number of worker threads.
const THREADS_VAR: &str = "SWED_THREADS";

#[derive(Parser)]
#[command(name = "swed", version, about = "Adaptive central-upwind solver for variable-density shallow water on triangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Vtk,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to its end time and write snapshots.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Number of output intervals; snapshots at k T / N.
        #[arg(long)]
        snapshots: Option<usize>,
    },
    /// L1 errors of uniform runs against a finer uniform reference.
    Convergence {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        /// Reference resolution; twice the finest level by default.
        #[arg(long)]
        reference: Option<usize>,
    },
    /// Uniform run at the configured grid against an adaptive run with M levels.
    Benchmark {
        config: PathBuf,
        #[arg(long)]
        levels: u8,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_VAR} must be a positive integer, got 0"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn execute(cli: Cli) -> swed::Result<()> {
    match cli.command {
        Command::Run { config, out, format, snapshots } => {
            let cfg = ScenarioConfig::load(&config)?;
            let format = format.map(|f| match f {
                Format::Csv => OutputFormat::Csv,
                Format::Vtk => OutputFormat::Vtk,
            });
            let plan = output_plan(&cfg, out.as_deref(), format, snapshots);
            let (_, r) = driver::run(&cfg, Some(&plan))?;
            println!("scenario      {}", r.scenario);
            println!("end time      {}", r.end_time);
            println!("steps         {} ({} substeps, {} halvings)", r.stats.steps, r.stats.substeps, r.stats.halvings);
            println!("cells         final {}, max {}, mean {:.0}", r.final_cells, r.stats.max_cells, r.mean_cells());
            println!("min depth     {:e}", r.stats.min_depth);
            println!("min h*rho     {:e}", r.stats.min_hrho);
            println!("wall clock    {:.3} s (evolution {:.3} s, grid {:.3} s)", r.total_secs, r.evolve_secs, r.grid_secs);
            println!("snapshots     {} in {}", r.snapshots.len(), plan.dir.display());
        }
        Command::Convergence { config, levels, reference } => {
            let cfg = ScenarioConfig::load(&config)?;
            let finest = levels.iter().copied().max().unwrap_or(0);
            let reference_n = reference.unwrap_or(2 * finest);
            let rep = convergence(&cfg, &levels, reference_n)?;
            println!("reference N = {} ({:.1} s)", rep.reference_n, rep.reference_secs);
            println!("{:>6} {:>9} {:>12} {:>6} {:>12} {:>12} {:>12} {:>9}", "N", "cells", "L1(w)", "rate", "L1(hu)", "L1(hv)", "L1(hrho)", "time[s]");
            for r in &rep.rows {
                let rate = r.rate_w.map_or("-".to_string(), |x| format!("{x:.2}"));
                println!("{:>6} {:>9} {:>12.4e} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>9.2}", r.n, r.cells, r.l1[0], rate, r.l1[1], r.l1[2], r.l1[3], r.secs);
            }
        }
        Command::Benchmark { config, levels } => {
            let cfg = ScenarioConfig::load(&config)?;
            let b = benchmark(&cfg, levels)?;
            println!("{:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "run", "cells", "max cells", "total[s]", "evolve[s]", "grid[s]");
            for (name, r) in [("uniform", &b.uniform), ("adaptive", &b.adaptive)] {
                println!("{:>10} {:>10.0} {:>10} {:>10.3} {:>10.3} {:>10.3}", name, r.mean_cells(), r.stats.max_cells, r.total_secs, r.evolve_secs, r.grid_secs);
            }
            println!("R_CPU total {:.2}, without grid generation {:.2}", b.r_cpu_total, b.r_cpu_evolve);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
