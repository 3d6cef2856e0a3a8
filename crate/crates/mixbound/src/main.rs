use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixbound::commands::{self, Outcome};
use mixbound::parallel;
use mixbound::{exit, CliError, CliResult, Format, RunConfig};

/// Mixing-time bounds for finite Markov chains from evolving sets,
/// conductance and f-congestion.
#[derive(Parser)]
#[command(name = "mixbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report file (default: standard output).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Report format (default: from the output extension, else json).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: MIXBOUND_THREADS, else available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Comparison tolerance for the loaded chain.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Holding, reversibility, stationary law and extremal set quantities.
    Analyze {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        kernels: Option<Vec<String>>,
        #[command(flatten)]
        common: Common,
    },
    /// Conductance, Psi and congestion profiles with witnesses.
    Profile {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        kernels: Option<Vec<String>>,
        #[command(flatten)]
        common: Common,
    },
    /// Every applicable mixing bound against the exact mixing time.
    Bound {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
        /// Cap on the exact mixing-time search.
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the inequality suites; exits 4 if any inequality fails.
    Verify {
        /// A single chain; without it, random chains plus the example catalog.
        input: Option<PathBuf>,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Deliberately break a check (flip-sandwich-sign).
        #[arg(long)]
        mutate: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of the Doob-transform expectation of f(pi(S_n)).
    Simulate {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<usize>>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// tv, entropy, l2 or hellinger.
        #[arg(long)]
        functional: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact law of the evolving set (or its Doob transform) after some steps.
    Evolve {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<usize>>,
        #[arg(long)]
        steps: Option<usize>,
        /// doob or plain.
        #[arg(long)]
        process: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Writes a chain file for a named example.
    Generate {
        name: Option<String>,
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
        /// List generators and their parameters.
        #[arg(long)]
        list: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn with_common(common: Common, flags: RunConfig) -> CliResult<RunConfig> {
    let flags = RunConfig {
        output: common.output,
        format: common.format,
        threads: common.threads,
        tol: common.tol,
        ..flags
    };
    let base = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    Ok(base.overlay(flags))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

type Runner = fn(&RunConfig, usize) -> CliResult<Outcome>;

fn run(cli: Cli) -> CliResult<u8> {
    let (name, common, flags, runner): (&str, Common, RunConfig, Runner) = match cli.command {
        Command::Analyze { input, kernels, common } => {
            ("analyze", common, RunConfig { input, kernels, ..Default::default() }, commands::analyze)
        }
        Command::Profile { input, kernels, common } => {
            ("profile", common, RunConfig { input, kernels, ..Default::default() }, commands::profile)
        }
        Command::Bound { input, eps, metrics, n_max, common } => {
            ("bound", common, RunConfig { input, eps, metrics, n_max, ..Default::default() }, commands::bound)
        }
        Command::Verify { input, random, seed, mutate, common } => {
            ("verify", common, RunConfig { input, random, seed, mutate, ..Default::default() }, commands::verify)
        }
        Command::Simulate { input, start, steps, samples, seed, functional, common } => (
            "simulate",
            common,
            RunConfig { input, start, steps, samples, seed, functional, ..Default::default() },
            commands::simulate,
        ),
        Command::Evolve { input, start, steps, process, common } => {
            ("evolve", common, RunConfig { input, start, steps, process, ..Default::default() }, commands::evolve)
        }
        Command::Generate { name, params, list, output } => {
            if list {
                let text: String =
                    commands::GENERATORS.iter().map(|(n, p)| format!("{n}\t{p}\n")).collect();
                write_out(output.as_ref(), &text)?;
                return Ok(exit::SUCCESS);
            }
            let name = name.ok_or_else(|| CliError::input("generator name required (see --list)"))?;
            write_out(output.as_ref(), &commands::generate(&name, &params)?)?;
            return Ok(exit::SUCCESS);
        }
    };
    let cfg = with_common(common, flags)?;
    cfg.validate(name)?;
    let workers = parallel::worker_count(cfg.threads);
    let outcome = runner(&cfg, workers)?;
    let format = cfg.format();
    write_out(cfg.output.as_ref(), &outcome.report.render(format))?;
    if format == Format::Csv || cfg.output.is_some() {
        for note in &outcome.report.notes {
            eprintln!("note: {note}");
        }
    }
    Ok(if outcome.passed { exit::SUCCESS } else { exit::VERIFICATION })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT } else { exit::SUCCESS });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mixbound: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
