use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qtraj_cli::{parse_config, run, CliError, Command, Result};

#[derive(Parser)]
#[command(name = "qtraj", version, about = "Master-equation and quantum-trajectory runs")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Integrate the master equation (RK4) and write master.csv.
    EvolveMaster(Common),
    /// Write trajectory_<i>.csv (and jumps_<i>.csv for jump runs).
    Trajectory(Common),
    /// Write the ensemble-mean projector as ensemble_mean.csv.
    Ensemble(Common),
    /// Compare trajectories before and after the configured transform.
    InvarianceCheck(Common),
    /// Stroboscopic (x, p) samples of one trajectory, written to poincare.csv.
    Poincare(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `out_path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

fn execute(cmd: Command, args: Common) -> Result<()> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|source| CliError::Read { path: args.config.clone(), source })?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from(&cfg.out_path));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = pool.install(|| run(cmd, &cfg, &out))?;
    if let Some(summary) = report.summary {
        println!("{summary}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Sub::EvolveMaster(a) => (Command::EvolveMaster, a),
        Sub::Trajectory(a) => (Command::Trajectory, a),
        Sub::Ensemble(a) => (Command::Ensemble, a),
        Sub::InvarianceCheck(a) => (Command::InvarianceCheck, a),
        Sub::Poincare(a) => (Command::Poincare, a),
    };
    match execute(cmd, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
