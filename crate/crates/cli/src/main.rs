use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bqp_cli::{cmd_analyze, cmd_probe, cmd_render, cmd_run, init_threads, CliError, Config};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bqp", version, about = "Boussinesq temperature-patch simulator and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `outputs.dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute diagnostics.csv from the snapshots of a finished run.
    Analyze {
        run_dir: PathBuf,
        /// Defaults to `<run_dir>/analysis`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an inequality probe or the transport-diffusion sweep.
    Probe {
        /// Probe id (`lemma_A1`, `lemma_A3`, `prop_A5`, `eq_1_5`, `compat_omega`,
        /// `compat_theta`, `transdiff`) or `all`.
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "probes")]
        out: PathBuf,
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write PGM images of θ and ω for every snapshot of a run.
    Render {
        run_dir: PathBuf,
        /// Defaults to `<run_dir>/images`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(Some(&config))?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.outputs.dir));
            let s = cmd_run(&cfg, &dir)?;
            println!("run={} steps={} records={}", s.dir.display(), s.steps, s.records.len());
        }
        Command::Analyze { run_dir, out } => {
            let out = out.unwrap_or_else(|| run_dir.join("analysis"));
            let path = cmd_analyze(&run_dir, &out)?;
            println!("diagnostics={}", path.display());
        }
        Command::Probe {
            lemma,
            config,
            out,
            ensemble_size,
            seed,
        } => {
            let cfg = load(config.as_deref())?;
            for o in cmd_probe(&cfg, &lemma, &out, ensemble_size, seed)? {
                println!("{} file={}", o.summary_line(), o.path.display());
            }
        }
        Command::Render { run_dir, out } => {
            let out = out.unwrap_or_else(|| run_dir.join("images"));
            let files = cmd_render(&run_dir, &out)?;
            println!("images={} dir={}", files.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprintln!("error[config]: {}", e.to_string().lines().next().unwrap_or("bad arguments"));
            return ExitCode::from(1);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            if let CliError::Runtime {
                last_snapshot: Some(p), ..
            } = &e
            {
                eprintln!("last_snapshot={}", p.display());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
