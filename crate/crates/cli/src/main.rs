mod cache;
mod commands;
mod config;
mod output;
mod suite;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use modsym::Cusp;

use commands::SourceArgs;
use config::{parse_cusp, GlobalArgs, Parity, RunConfig};
use suite::SuiteName;

#[derive(Parser, Debug)]
#[command(
    name = "modsym",
    version,
    about = "Period functions, pseudo-measures and Hecke operators on rational cusps"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continued fraction of a rational in [0, 1).
    Cf { x: String },
    /// Canonical primitive chain from ∞ to a left cusp.
    Chain {
        #[arg(allow_hyphen_values = true)]
        beta: String,
    },
    Measure {
        #[command(subcommand)]
        command: MeasureCommand,
    },
    Transfer {
        #[command(subcommand)]
        command: TransferCommand,
    },
    Hecke {
        #[command(subcommand)]
        command: HeckeCommand,
    },
    Levy {
        #[command(subcommand)]
        command: LevyCommand,
    },
    /// Brjuno-type sums B and b at a real number or p/q.
    Brjuno {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 400)]
        depth: usize,
    },
    /// L′(ρ) of the weight 12 cusp form, optionally with the Brjuno-integral checks.
    Lderiv {
        /// Fourier coefficients used.
        #[arg(long, default_value_t = 2000)]
        terms: usize,
        #[arg(long)]
        brjuno: bool,
    },
    Symbols {
        #[command(subcommand)]
        command: SymbolsCommand,
    },
    /// Run a self-check suite; exits non-zero on any failure.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
    },
}

#[derive(Subcommand, Debug)]
enum MeasureCommand {
    /// μ(α, β)(z) at the --z points.
    Eval {
        #[arg(long, value_parser = parse_cusp, allow_hyphen_values = true)]
        alpha: Cusp,
        #[arg(long, value_parser = parse_cusp, allow_hyphen_values = true)]
        beta: Cusp,
        #[command(flatten)]
        source: SourceArgs,
    },
}

#[derive(Subcommand, Debug)]
enum TransferCommand {
    /// Search s = 1/2 + iR for transfer-operator eigenvalue ±1.
    Scan {
        #[arg(long, value_enum)]
        parity: Parity,
        #[arg(long)]
        r_lo: f64,
        #[arg(long)]
        r_hi: f64,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
    },
    /// Sample the period function of a (cached) eigen datum.
    Periodfn {
        #[arg(long, value_enum)]
        parity: Parity,
        #[arg(long)]
        r: f64,
    },
}

#[derive(Subcommand, Debug)]
enum HeckeCommand {
    /// λ_m by three independent routes.
    Check {
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[command(flatten)]
        source: SourceArgs,
    },
}

#[derive(Subcommand, Debug)]
enum LevyCommand {
    /// ∫ l_r dx against the interval sum for r = q^-k.
    Identity {
        #[arg(long, default_value_t = 4)]
        k: i32,
    },
    /// Interval-sum Mellin transform against the eigenvalue Dirichlet series.
    Mellin {
        #[arg(long)]
        mmax: Option<u64>,
        #[command(flatten)]
        source: SourceArgs,
    },
}

#[derive(Subcommand, Debug)]
enum SymbolsCommand {
    /// Modular symbol of the weight 12 cusp form between two left cusps.
    Classical {
        #[arg(long, value_parser = parse_cusp, allow_hyphen_values = true)]
        alpha: Cusp,
        #[arg(long, value_parser = parse_cusp, allow_hyphen_values = true)]
        beta: Cusp,
        /// Also check modularity under g = a,b,c,d in S.
        #[arg(long)]
        g: Option<String>,
    },
}

fn dispatch(cfg: &RunConfig, command: &Command) -> Result<(&'static str, output::Report)> {
    Ok(match command {
        Command::Cf { x } => ("cf", commands::cf(x)?),
        Command::Chain { beta } => ("chain", commands::chain(beta)?),
        Command::Measure {
            command: MeasureCommand::Eval { alpha, beta, source },
        } => ("measure eval", commands::measure_eval(cfg, alpha, beta, source)?),
        Command::Transfer {
            command:
                TransferCommand::Scan {
                    parity,
                    r_lo,
                    r_hi,
                    step,
                },
        } => (
            "transfer scan",
            commands::transfer_scan(cfg, *parity, *r_lo, *r_hi, *step)?,
        ),
        Command::Transfer {
            command: TransferCommand::Periodfn { parity, r },
        } => ("transfer periodfn", commands::transfer_periodfn(cfg, *parity, *r)?),
        Command::Hecke {
            command: HeckeCommand::Check { m, source },
        } => ("hecke check", commands::hecke_check(cfg, *m, source)?),
        Command::Levy {
            command: LevyCommand::Identity { k },
        } => ("levy identity", commands::levy_identity(cfg, *k)?),
        Command::Levy {
            command: LevyCommand::Mellin { mmax, source },
        } => ("levy mellin", commands::levy_mellin(cfg, *mmax, source)?),
        Command::Brjuno { x, depth } => ("brjuno", commands::brjuno(x, *depth)?),
        Command::Lderiv { terms, brjuno } => ("lderiv", commands::lderiv(cfg, *terms, *brjuno)?),
        Command::Symbols {
            command: SymbolsCommand::Classical { alpha, beta, g },
        } => (
            "symbols classical",
            commands::symbols_classical(cfg, alpha, beta, g.as_deref())?,
        ),
        Command::Suite { name } => ("suite", suite::run(*name)?),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let start = Instant::now();
    let (name, report) = dispatch(&cfg, &cli.command)?;
    let env = output::envelope(name, cfg.echo(), &report, start.elapsed());
    if let Err(e) = output::write(std::io::stdout().lock(), cfg.format, &env, report.table.as_ref()) {
        // A closed pipe (e.g. `| head`) is not an error of the computation.
        let closed = e.chain().any(|c| {
            c.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
        }) || e
            .downcast_ref::<csv::Error>()
            .is_some_and(|c| matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe))
            || e.downcast_ref::<serde_json::Error>()
                .is_some_and(|j| j.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe));
        if !closed {
            return Err(e);
        }
    }
    Ok(if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
