use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use unibandit::analysis::{concentration_check, ConcentrationConfig, SamplingRule};
use unibandit::config::GraphSpec;
use unibandit::harness::ResultTable;
use unibandit::presets;
use unibandit::{emit_csv, lower_bound_c, run_experiment, BanditError, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "unibandit", version, about = "Unimodal bandit simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's run count.
        #[arg(long)]
        runs: Option<u64>,
        /// CSV destination; defaults to the config's `out`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the asymptotic regret constant c(theta) of an instance.
    LowerBound {
        /// Line graph on K arms.
        #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
        line: Option<usize>,
        /// Edge list with 1-based arms, e.g. `1-2,2-3,2-4`.
        #[arg(long)]
        edges: Option<String>,
        /// Comma-separated arm means.
        #[arg(long, value_delimiter = ',', required = true)]
        means: Vec<f64>,
    },
    /// Monte Carlo check of the deviation bound at a stopping time.
    ValidateConcentration {
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        #[arg(long, default_value_t = 50)]
        samples: u64,
        #[arg(long, default_value_t = 0.1)]
        deviation: f64,
        #[arg(long, default_value_t = 500)]
        horizon: u64,
        #[arg(long, value_enum, default_value_t = RuleArg::Both)]
        rule: RuleArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// UCB, KL-UCB, UCB-U and OSUB on the 17-arm triangle.
    Table1 {
        #[arg(long, default_value_t = 50)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sliding-window policies on the moving triangle, T = 20/sigma per speed.
    SweepSigma {
        #[arg(long, value_delimiter = ',', default_values_t = presets::DEFAULT_SIGMAS)]
        sigmas: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    AlwaysOn,
    WhileBehind,
    Both,
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, runs, out, threads } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(runs) = runs {
                cfg.runs = runs;
            }
            let out = out.or_else(|| cfg.output.clone());
            let table = run_experiment(&cfg, threads)?;
            write_table(&table, out.as_deref())
        }
        Command::LowerBound { line, edges, means } => {
            let graph = match (line, edges) {
                (Some(k), _) => GraphSpec::Line(k),
                (None, Some(list)) => GraphSpec::Edges {
                    arms: means.len(),
                    edges: parse_edges(&list)?,
                },
                (None, None) => unreachable!("clap requires one of --line / --edges"),
            }
            .build()?;
            println!("{}", lower_bound_c(&graph, &means)?);
            Ok(())
        }
        Command::ValidateConcentration {
            bound,
            samples,
            deviation,
            horizon,
            rule,
            trials,
            seed,
        } => {
            let rules: &[SamplingRule] = match rule {
                RuleArg::AlwaysOn => &[SamplingRule::AlwaysOn],
                RuleArg::WhileBehind => &[SamplingRule::WhileBehind],
                RuleArg::Both => &[SamplingRule::AlwaysOn, SamplingRule::WhileBehind],
            };
            let mut violated = false;
            println!("rule,trials,hits,empirical,bound,std_error,within");
            for &rule in rules {
                let cfg = ConcentrationConfig {
                    bound,
                    samples,
                    deviation,
                    horizon,
                    rule,
                    trials,
                    seed,
                };
                let r = concentration_check(&cfg)?;
                let ok = r.empirical <= r.bound + 3.0 * r.std_error;
                violated |= !ok;
                println!(
                    "{},{},{},{:.6},{:.6},{:.6},{}",
                    match rule {
                        SamplingRule::AlwaysOn => "always-on",
                        SamplingRule::WhileBehind => "while-behind",
                    },
                    r.trials,
                    r.hits,
                    r.empirical,
                    r.bound,
                    r.std_error,
                    ok
                );
            }
            if violated {
                return Err(BanditError::Config(
                    "empirical frequency exceeds the bound by more than 3 standard errors".into(),
                ));
            }
            Ok(())
        }
        Command::Table1 { runs, seed, horizon, out, threads } => {
            let table = run_experiment(&presets::table1(horizon, runs, seed), threads)?;
            write_table(&table, out.as_deref())
        }
        Command::SweepSigma { sigmas, runs, seed, out, threads } => {
            let mut all = ResultTable::default();
            for cfg in presets::sweep_sigma(&sigmas, runs, seed) {
                all.rows.extend(run_experiment(&cfg, threads)?.rows);
            }
            write_table(&all, out.as_deref())
        }
    }
}

fn write_table(table: &ResultTable, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => emit_csv(table, path),
        None => {
            print!("{}", table.to_csv());
            Ok(())
        }
    }
}

/// Parses `1-2,2-3` into 1-based pairs.
fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(|pair| {
            let (a, b) = pair
                .trim()
                .split_once('-')
                .ok_or_else(|| BanditError::Config(format!("edge '{pair}' is not of the form a-b")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| BanditError::Config(format!("bad arm index '{s}' in edge '{pair}'")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}
