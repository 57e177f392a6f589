use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use planeforest::experiments::{
    run_experiment, verify, ExperimentConfig, EXPERIMENT_NAMES,
};
use planeforest::paths::{enumerate_bridges_capped, fp_bridge_count, multinomial};
use planeforest::sampler::{sample_forest, SeededRng};
use planeforest::DegreeSequence;

#[derive(Parser)]
#[command(
    name = "planeforest",
    about = "Uniform random plane forests with prescribed degree sequences and their scaling limits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw uniform forests for a degree sequence, one JSON forest per line.
    Sample(SampleArgs),
    /// Enumerate the lattice bridges (or first-passage bridges) of a small
    /// degree sequence.
    Enumerate(EnumerateArgs),
    /// Run the exhaustive small-n verification suites.
    Verify(VerifyArgs),
    /// Run a named experiment (or `all`) from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// DegreeSequence JSON file: {"counts": {"0": 7, "1": 2, ...}}
    #[arg(long)]
    degrees: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of forests to draw.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    degrees: PathBuf,
    /// Only paths staying above -c before the endpoint.
    #[arg(long)]
    first_passage: bool,
    /// Print decoded forests instead of increment paths (implies
    /// --first-passage).
    #[arg(long)]
    forests: bool,
    /// Refuse sequences with more vertices than this.
    #[arg(long, default_value_t = 10)]
    cap: u64,
    /// Print only the counts.
    #[arg(long)]
    count_only: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    max_n: u64,
    #[arg(long, default_value_t = 5)]
    max_degree: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of the experiment names, or `all`.
    name: String,
    /// ExperimentConfig JSON file (see README for the schema).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Sample(args) => {
            let s: DegreeSequence =
                serde_json::from_str(&std::fs::read_to_string(&args.degrees)?)?;
            let mut out: Box<dyn Write> = match &args.out {
                Some(path) => Box::new(std::fs::File::create(path)?),
                None => Box::new(std::io::stdout().lock()),
            };
            for replicate in 0..args.count {
                let mut rng = SeededRng::new(args.seed, replicate);
                let forest = sample_forest(&s, &mut rng);
                writeln!(out, "{}", serde_json::to_string(&forest)?)?;
            }
            Ok(true)
        }
        Command::Enumerate(args) => {
            let s: DegreeSequence =
                serde_json::from_str(&std::fs::read_to_string(&args.degrees)?)?;
            let bridges = enumerate_bridges_capped(&s, args.cap)?;
            let first_passage = args.first_passage || args.forests;
            let mut stdout = std::io::stdout().lock();
            let mut kept = 0u64;
            for bridge in &bridges {
                if first_passage && !bridge.is_first_passage() {
                    continue;
                }
                kept += 1;
                if args.count_only {
                    continue;
                }
                if args.forests {
                    let forest = planeforest::forests::decode(bridge)?;
                    writeln!(stdout, "{}", serde_json::to_string(&forest)?)?;
                } else {
                    writeln!(stdout, "{}", serde_json::to_string(bridge)?)?;
                }
            }
            eprintln!(
                "bridges={} first_passage={} expected_bridges={} expected_first_passage={}",
                bridges.len(),
                kept,
                multinomial(&s),
                fp_bridge_count(&s)
            );
            Ok(true)
        }
        Command::Verify(args) => {
            let outcomes = verify::run_all_suites(args.max_n, args.max_degree)?;
            let mut all = true;
            for o in &outcomes {
                println!(
                    "{}: {} ({} sequences, {})",
                    o.name,
                    if o.pass { "PASS" } else { "FAIL" },
                    o.sequences,
                    o.detail
                );
                all &= o.pass;
            }
            Ok(all)
        }
        Command::Experiment(args) => {
            let mut cfg: ExperimentConfig =
                serde_json::from_str(&std::fs::read_to_string(&args.config)?)?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if let Some(out) = &args.out {
                cfg.output_dir = Some(out.display().to_string());
            }
            let names: Vec<&str> = if args.name == "all" {
                EXPERIMENT_NAMES.to_vec()
            } else {
                vec![args.name.as_str()]
            };
            let mut all = true;
            for name in names {
                let report = run_experiment(name, &cfg)?;
                if let Some(dir) = &cfg.output_dir {
                    report.write_to_dir(&std::path::Path::new(dir).join(name))?;
                }
                for v in &report.verdicts {
                    println!(
                        "{name}: {} {} (value {:.6} {} threshold {:.6})",
                        v.name,
                        if v.pass { "PASS" } else { "FAIL" },
                        v.value,
                        v.comparison,
                        v.threshold
                    );
                }
                all &= report.all_pass();
            }
            Ok(all)
        }
    }
}
