use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};
use spm_cli::{load_config, run, write_outputs, CliError, Command, ExitCode};

#[derive(Parser)]
#[command(name = "spm", version, about = "Set partition modulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Experiment config (key = value lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Output file; overrides the config's `output`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Build a codebook and print its rate, distances and patterns.
    Codebook,
    /// Clique selection on the Hamming graph (or an edge-list graph).
    Select,
    /// Monte Carlo bit error rate.
    Ber,
    /// Union bound on the bit error rate.
    Bound,
    /// Exact rates over a range of N.
    Rate,
    /// Monte Carlo achievable rate.
    RateMc,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Codebook => Command::Codebook,
            Cmd::Select => Command::Select,
            Cmd::Ber => Command::Ber,
            Cmd::Bound => Command::Bound,
            Cmd::Rate => Command::Rate,
            Cmd::RateMc => Command::RateMc,
        }
    }
}

fn fail(code: ExitCode, msg: impl std::fmt::Display) -> ! {
    eprintln!("spm: {msg}");
    process::exit(code as i32);
}

fn main() {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(w) = cli.workers {
        if w == 0 {
            fail(ExitCode::Config, "--workers must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            fail(ExitCode::Failure, e);
        }
    }
    let Some(config_path) = cli.config else {
        fail(ExitCode::Config, "--config PATH is required");
    };
    let seed = match std::env::var("SPM_SEED") {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(e) => fail(ExitCode::Config, format!("SPM_SEED: {e}")),
        },
        Err(_) => None,
    };

    let command: Command = cli.command.into();
    let result = load_config(&config_path, seed).and_then(|cfg| {
        log::info!("{} with seed {} (config {})", command.name(), cfg.seed, &cfg.hash[..12]);
        let outcome = run(command, &cfg)?;
        let out = cli.out.as_deref().or(cfg.output.as_deref());
        for p in write_outputs(command, &cfg, &outcome, out)? {
            log::info!("wrote {}", p.display());
        }
        Ok::<_, CliError>(outcome)
    });
    match result {
        Ok(outcome) => {
            let code = outcome.exit_code();
            match code {
                ExitCode::NonConvergence => eprintln!("spm: some points did not reach min_errors"),
                ExitCode::BudgetExhausted => eprintln!("spm: search budget exhausted"),
                _ => {}
            }
            process::exit(code as i32);
        }
        Err(e) => fail(e.exit_code(), e),
    }
}
