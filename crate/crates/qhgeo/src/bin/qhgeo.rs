//! Command-line front end: runs an experiment, writes its report and output
//! files under the out-dir, and exits 0 when every verdict passed, 1 when
//! any failed, 2 on configuration or input errors.

use clap::{Args, Parser, Subcommand};
use qhgeo::config::ExperimentConfig;
use qhgeo::experiments;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qhgeo", version, about = "Quasihyperbolic geometry experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// RNG seed (overrides the config's seed; default 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket the quasihyperbolic distance between two points.
    Distance(Common),
    /// Trace a metric ball boundary.
    Ball(Common),
    /// Starlikeness check for a single ball.
    Starlike(Common),
    /// Convexity check for a single ball.
    Convex(Common),
    /// Non-convexity witness search in the punctured sup-norm plane.
    Witness(Common),
    /// The broken-line ball counterexample end to end.
    Counterexample(Common),
    /// Cumulative-average ratio bound for random step functions.
    Holder(Common),
    /// Average-path inequality in the punctured Euclidean plane.
    Avgpath(Common),
    /// Small-scale conformality of k and j on punctured space.
    Conformality(Common),
    /// j-ball intersection identity over finite puncture sets.
    JballIntersection(Common),
    /// Moduli of convexity and smoothness estimates.
    Moduli(Common),
    /// Theorem suites (which = thm31 | thm41 | thm44 | fig3).
    Suite(Common),
}

impl Command {
    fn split(&self) -> (&'static str, &Common) {
        match self {
            Command::Distance(c) => ("distance", c),
            Command::Ball(c) => ("ball", c),
            Command::Starlike(c) => ("starlike", c),
            Command::Convex(c) => ("convex", c),
            Command::Witness(c) => ("witness", c),
            Command::Counterexample(c) => ("counterexample", c),
            Command::Holder(c) => ("holder", c),
            Command::Avgpath(c) => ("avgpath", c),
            Command::Conformality(c) => ("conformality", c),
            Command::JballIntersection(c) => ("jball-intersection", c),
            Command::Moduli(c) => ("moduli", c),
            Command::Suite(c) => ("suite", c),
        }
    }
}

fn execute(name: &str, common: &Common) -> qhgeo::Result<bool> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::empty(),
    };
    if let Some(seed) = common.seed {
        cfg.set("seed", seed);
    }
    if let Some(dir) = &common.out_dir {
        cfg.set("out_dir", dir.display());
    }
    let output = experiments::run(name, &cfg)?;
    let out_dir = cfg.out_dir();
    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(out_dir.join("report.txt"), output.report.to_text())?;
    for (file, contents) in &output.files {
        std::fs::write(out_dir.join(file), contents)?;
    }
    print!("{}", output.report.to_text());
    Ok(output.report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = cli.command.split();
    match execute(name, common) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
