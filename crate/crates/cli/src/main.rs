use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scaledgauge_cli::config::ExperimentConfig;
use scaledgauge_cli::experiments::Experiment;
use scaledgauge_cli::{run, write_reports, RunError, EXIT_CHECK_FAILED, EXIT_PASS};

#[derive(Parser)]
#[command(name = "scaledgauge", version, about = "Scaled number structures and gauge fields on a lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output-dir` in the configuration
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides `seed` in the configuration
    #[arg(long)]
    seed: Option<u64>,
    /// Experiments run concurrently by `all`
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Field axioms and analytic functions in scaled structures
    Axioms(Common),
    /// Link inversion, path reversal and plaquette loops
    Transport(Common),
    /// Plaquette curl and staircase path spread
    Integrability(Common),
    /// Covariant vs first-order derivative convergence
    DerivativeConvergence(Common),
    /// Scaled Hilbert space correspondences
    Hilbert(Common),
    /// Abelian covariance, field strength and the A = 0 limit
    GaugeAbelian(Common),
    /// SU(2) links and transformation laws
    GaugeSu2(Common),
    /// Transported Lagrangian action and its anchor dependence
    Action(Common),
    /// Every experiment above
    All(Common),
}

impl Command {
    fn split(self) -> (Vec<Experiment>, Common) {
        match self {
            Command::Axioms(c) => (vec![Experiment::Axioms], c),
            Command::Transport(c) => (vec![Experiment::Transport], c),
            Command::Integrability(c) => (vec![Experiment::Integrability], c),
            Command::DerivativeConvergence(c) => (vec![Experiment::DerivativeConvergence], c),
            Command::Hilbert(c) => (vec![Experiment::Hilbert], c),
            Command::GaugeAbelian(c) => (vec![Experiment::GaugeAbelian], c),
            Command::GaugeSu2(c) => (vec![Experiment::GaugeSu2], c),
            Command::Action(c) => (vec![Experiment::Action], c),
            Command::All(c) => (Experiment::ALL.to_vec(), c),
        }
    }
}

fn execute(experiments: &[Experiment], common: &Common) -> Result<i32, RunError> {
    let cfg = ExperimentConfig::load(&common.config, experiments)?;
    let seed = common.seed.unwrap_or(cfg.seed);
    let out = common.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let reports = run(experiments, &cfg, seed, common.workers)?;
    write_reports(&reports, &out)?;
    let mut code = EXIT_PASS;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {} ({} checks, {:.2}s)", r.experiment, r.checks.len(), r.duration.as_secs_f64());
        for c in r.failures() {
            code = EXIT_CHECK_FAILED;
            println!("  failed: {} observed={:e} expected={:e} tolerance={:e}", c.name, c.observed, c.expected, c.tolerance);
        }
    }
    println!("reports written to {}", out.display());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiments, common) = cli.command.split();
    let code = match execute(&experiments, &common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
