//! `rodtaper`: batch runs of the tapered-rod toolkit from a JSON config.
//!
//! Exit status: 0 ok, 2 config error, 3 solver error, 4 invariant failure.

mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_overrides, RunConfig};
use pipeline::{Failure, Pipeline, Stage};

#[derive(Parser, Debug)]
#[command(
    name = "rodtaper",
    version,
    about = "Asymptotic 1D model of a linearly tapered elastic rod",
    after_help = "Any config field can be overridden with a dotted flag, e.g. `--rod.L 2` or `--section.shape=ellipse`."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON run configuration; defaults are used for missing fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides outputs.dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the randomized sweeps (overrides seed).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// No progress messages on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Principal frame and moments of the section.
    Section(Common),
    /// Saint-Venant torsion function and stiffness K.
    Torsion(Common),
    /// Limit 1D problems for the configured forces.
    Solve1d(Common),
    /// A priori estimate probes on the built-in clamped families.
    Probe(Common),
    /// 3D convergence study over rod.epsilon_list.
    Verify3d(Common),
    /// Every stage; probe and verify3d as enabled in `outputs`.
    All(Common),
}

const OWN_FLAGS: [&str; 6] = ["config", "out", "seed", "quiet", "help", "version"];

/// Config overrides are `--dotted.name value` flags anywhere on the line;
/// every long flag not listed in [`OWN_FLAGS`] is split off before clap
/// sees the rest.
fn split_overrides(args: impl Iterator<Item = String>) -> (Vec<String>, Vec<String>) {
    let (mut plain, mut overrides) = (Vec::new(), Vec::new());
    let mut args = args.into_iter();
    while let Some(a) = args.next() {
        let key = a.strip_prefix("--").map(|k| k.split('=').next().unwrap_or(k));
        if key.is_none_or(|k| k.is_empty() || OWN_FLAGS.contains(&k)) {
            plain.push(a);
            continue;
        }
        let inline = a.contains('=');
        overrides.push(a);
        if !inline {
            overrides.extend(args.next());
        }
    }
    (plain, overrides)
}

fn main() -> ExitCode {
    let (args, overrides) = split_overrides(std::env::args());
    let cli = Cli::parse_from(args);
    let (stage, common) = match cli.command {
        Command::Section(c) => (Stage::Section, c),
        Command::Torsion(c) => (Stage::Torsion, c),
        Command::Solve1d(c) => (Stage::Solve1d, c),
        Command::Probe(c) => (Stage::Probe, c),
        Command::Verify3d(c) => (Stage::Verify3d, c),
        Command::All(c) => (Stage::All, c),
    };
    if let Some(n) = std::env::var("RODTAPER_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = parse_overrides(&overrides).and_then(|o| RunConfig::load(common.config.as_deref(), &o));
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(d) = common.out {
        cfg.outputs.dir = d;
    }
    let out = cfg.outputs.dir.clone();
    let mut p = Pipeline::new(cfg, out, common.quiet);
    match p.run(stage) {
        Ok(()) if p.passed() => ExitCode::SUCCESS,
        Ok(()) => {
            let failed: Vec<&str> = p.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            eprintln!("invariant failure: {}", failed.join(", "));
            ExitCode::from(4)
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            let invariant = e.chain().any(|c| matches!(c.downcast_ref(), Some(rodtaper::Error::Invariant(_))));
            ExitCode::from(if invariant { 4 } else { 3 })
        }
    }
}
