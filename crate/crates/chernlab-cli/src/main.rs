//! chernlab: reproducible Haldane-model runs from JSON configs.
//!
//! ```text
//! chernlab <command> [--config PATH] [--out DIR] [--threads N] [--seed U64]
//!
//! commands: bands | chern | curvature-map | phase-diagram | wannier |
//!           marker | selfcheck
//! exit codes: 0 ok, 1 invariant failure, 2 bad config, 3 numerical
//!             non-convergence
//! ```
//!
//! Without a config file every command runs the reference regime
//! (t₁ = 1, t₂ = ¼, φ = π/2, M = 0). Thread count resolution: --threads
//! flag, then CHERNLAB_THREADS, then the config, then the machine.

mod commands;
mod config;
mod output;

use chernlab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

struct Cli {
    command: String,
    config: Option<String>,
    out: PathBuf,
    threads: Option<usize>,
    seed: Option<u64>,
}

const USAGE: &str = "usage: chernlab <bands|chern|curvature-map|phase-diagram|wannier|marker|selfcheck> \
                     [--config PATH] [--out DIR] [--threads N] [--seed U64]";

fn parse_args(mut args: impl Iterator<Item = String>) -> Result<Cli, String> {
    let command = args.next().ok_or(USAGE.to_string())?;
    let mut cli = Cli {
        command,
        config: None,
        out: PathBuf::from("out"),
        threads: None,
        seed: None,
    };
    while let Some(flag) = args.next() {
        let mut value = |name: &str| {
            args.next().ok_or_else(|| format!("{name} needs a value\n{USAGE}"))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(value("--config")?),
            "--out" => cli.out = PathBuf::from(value("--out")?),
            "--threads" => {
                cli.threads = Some(
                    value("--threads")?
                        .parse()
                        .map_err(|e| format!("bad --threads: {e}"))?,
                )
            }
            "--seed" => {
                cli.seed =
                    Some(value("--seed")?.parse().map_err(|e| format!("bad --seed: {e}"))?)
            }
            other => return Err(format!("unknown flag {other}\n{USAGE}")),
        }
    }
    Ok(cli)
}

fn resolve_threads(flag: Option<usize>, config_threads: usize) -> usize {
    if let Some(n) = flag {
        if n > 0 {
            return n;
        }
    }
    if let Ok(env) = std::env::var("CHERNLAB_THREADS") {
        if let Ok(n) = env.parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    if config_threads > 0 {
        return config_threads;
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Exit-code mapping: precondition and input problems are the caller's
/// (2); iteration caps and lost resolution are the solver's (3).
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::NotHermitian { .. }
        | Error::NonFinite
        | Error::GaplessPoint { .. }
        | Error::FermiOnEigenvalue { .. }
        | Error::IllConditioned { .. }
        | Error::DiscontinuousFrame { .. } => 2,
        Error::NoConvergence { .. }
        | Error::UnderResolved { .. }
        | Error::UnresolvedInteger { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args().skip(1)) {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("cannot create output directory {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    let started = std::time::Instant::now();
    let result: Result<(Vec<String>, bool), String> = run(&cli);
    match result {
        Ok((lines, ok)) => {
            for line in lines {
                println!("{line}");
            }
            eprintln!("chernlab {} finished in {:.2?}", cli.command, started.elapsed());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            // Config errors arrive as strings; library errors are tagged
            // with their exit class.
            let (code, text) = msg
                .split_once('\u{1}')
                .map(|(c, t)| (c.parse().unwrap_or(2), t.to_string()))
                .unwrap_or((2, msg));
            eprintln!("error: {text}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<(Vec<String>, bool), String> {
    let lib = |e: Error| format!("{}\u{1}{e}", exit_code_for(&e));
    match cli.command.as_str() {
        "bands" => {
            let cfg: config::BandsConfig = config::load(cli.config.as_deref())?;
            commands::cmd_bands(&cfg, &cli.out).map(|l| (l, true)).map_err(lib)
        }
        "chern" => {
            let cfg: config::ChernConfig = config::load(cli.config.as_deref())?;
            commands::cmd_chern(&cfg, &cli.out).map(|l| (l, true)).map_err(lib)
        }
        "curvature-map" => {
            let cfg: config::CurvatureMapConfig = config::load(cli.config.as_deref())?;
            commands::cmd_curvature_map(&cfg, &cli.out).map(|l| (l, true)).map_err(lib)
        }
        "phase-diagram" => {
            let cfg: config::PhaseDiagramConfig = config::load(cli.config.as_deref())?;
            let threads = resolve_threads(cli.threads, cfg.threads);
            commands::cmd_phase_diagram(&cfg, &cli.out, threads)
                .map(|l| (l, true))
                .map_err(lib)
        }
        "wannier" => {
            let cfg: config::WannierConfig = config::load(cli.config.as_deref())?;
            commands::cmd_wannier(&cfg, &cli.out).map(|l| (l, true)).map_err(lib)
        }
        "marker" => {
            let cfg: config::MarkerConfig = config::load(cli.config.as_deref())?;
            commands::cmd_marker(&cfg, &cli.out).map(|l| (l, true)).map_err(lib)
        }
        "selfcheck" => {
            let mut cfg: config::SelfcheckConfig = config::load(cli.config.as_deref())?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            commands::cmd_selfcheck(&cfg, &cli.out).map_err(lib)
        }
        other => Err(format!("unknown command {other}\n{USAGE}")),
    }
}
