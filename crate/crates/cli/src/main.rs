//! `resonance-atlas`: find, track and classify resonances of a two-level
//! system coupled to a continuum, and write the data of the figure presets.

mod args;
mod commands;
mod config;
mod output;

use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::args::{
    Common, CriticalParams, DiscreteParams, FindParams, HydrogenParams, SelftestParams, SweepParams,
};
use crate::config::Layered;
use crate::output::{ensure_dir, write_atomic, Failure, Outcome};

#[derive(Parser)]
#[command(name = "resonance-atlas", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Run<P: Args> {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: P,
}

#[derive(Subcommand)]
enum Command {
    /// Locate every zero of the resolvent and label it.
    #[command(allow_negative_numbers = true)]
    Find(Run<FindParams>),
    /// Track zeros along a parameter path and write one CSV per branch.
    #[command(allow_negative_numbers = true)]
    Sweep(Run<SweepParams>),
    /// Solve for the coupling at which two resonances merge.
    #[command(allow_negative_numbers = true)]
    Critical(Run<CriticalParams>),
    /// Eigenvalues of the discretized and narrow-continuum models.
    #[command(allow_negative_numbers = true)]
    Discrete(Run<DiscreteParams>),
    /// Constants, resonances and lifetimes of circular hydrogen transitions.
    Hydrogen(Run<HydrogenParams>),
    /// Run the regression suite over the reference values.
    Selftest(Run<SelftestParams>),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Find(_) => "find",
            Command::Sweep(_) => "sweep",
            Command::Critical(_) => "critical",
            Command::Discrete(_) => "discrete",
            Command::Hydrogen(_) => "hydrogen",
            Command::Selftest(_) => "selftest",
        }
    }
}

fn merged<P: Args + Layered + DeserializeOwned + Default>(
    run: Run<P>,
    name: &str,
) -> Result<(Common, P), Failure> {
    let root = Cli::command();
    let cmd = root
        .find_subcommand(name)
        .expect("every subcommand is registered");
    let file: P = config::section(run.common.config.as_deref(), name, cmd)?;
    Ok((run.common, run.params.layer(file)))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("RESONANCE_ATLAS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "RESONANCE_ATLAS_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the worker pool: {e}")))
}

fn dispatch(command: Command) -> Result<(Common, Outcome), Failure> {
    let name = command.name();
    let default_dir = |c: &Common| c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    Ok(match command {
        Command::Find(r) => {
            let (c, p) = merged(r, name)?;
            (c, commands::find(p)?)
        }
        Command::Sweep(r) => {
            let (c, p) = merged(r, name)?;
            let out = commands::sweep(p, &default_dir(&c))?;
            (c, out)
        }
        Command::Critical(r) => {
            let (c, p) = merged(r, name)?;
            (c, commands::critical(p)?)
        }
        Command::Discrete(r) => {
            let (c, p) = merged(r, name)?;
            let out = commands::discrete(p, &default_dir(&c))?;
            (c, out)
        }
        Command::Hydrogen(r) => {
            let (c, p) = merged(r, name)?;
            (c, commands::hydrogen(p)?)
        }
        Command::Selftest(r) => {
            let (c, p) = merged(r, name)?;
            (c, commands::selftest(p)?)
        }
    })
}

fn finish(name: &str, common: &Common, outcome: Outcome) -> Result<Option<Failure>, Failure> {
    let json = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    if let Some(dir) = &common.out {
        ensure_dir(dir)?;
        write_atomic(
            &dir.join(format!("{name}.json")),
            format!("{json}\n").as_bytes(),
        )?;
    }
    if !common.quiet {
        let text = if common.json {
            format!("{json}\n")
        } else {
            outcome.lines.iter().map(|l| format!("{l}\n")).collect()
        };
        match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                return Err(Failure::Usage(format!("cannot write to stdout: {e}")))
            }
            _ => {}
        }
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let result = configure_threads()
        .and_then(|_| dispatch(cli.command))
        .and_then(|(common, outcome)| finish(name, &common, outcome));
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(f)) | Err(f) => {
            eprintln!("resonance-atlas {name}: {f}");
            f.exit_code()
        }
    }
}
