use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rescue_coop::analytic::{compare, Evaluation};
use rescue_coop::bt::{build_needs_tree, NeedsTreeConfig};
use rescue_coop::harness::report::{csv_string, write_csv, write_json};
use rescue_coop::harness::{
    builtin_scenarios, load_mission_file, load_scenario, run_experiment, run_experiment_with_threads, validate_analytic,
    Scenario, BUILTIN_SCENARIOS,
};
use rescue_coop::model::{check_dominance, DominanceConfig, ProfileSet, RobotClass};
use rescue_coop::optimizer::{optimize_team, BudgetMode};
use rescue_coop::sim::build_world;

#[derive(Parser)]
#[command(name = "rescue-coop", version, about = "Heterogeneous multi-robot rescue simulator and team analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials of one or more scenario files.
    Simulate {
        /// Scenario TOML files.
        paths: Vec<PathBuf>,
        /// Also run the four built-in reproduction scenarios.
        #[arg(long)]
        builtin: bool,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        /// Trial i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for trials.csv, aggregate.csv and experiment.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the trial fan-out (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Write the event trace of the first scenario's first trial here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Closed-form utility and energy for the compositions in a mission file.
    Analytic {
        mission: PathBuf,
        /// Compare only these two named compositions.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        compare: Option<Vec<String>>,
        /// Directory for reports.{json,csv} and comparisons.{json,csv}.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best composition within a robot budget.
    Optimize {
        #[arg(long)]
        budget: u32,
        #[arg(long)]
        mission: PathBuf,
        /// Allow any team size from 1 to the budget instead of exactly the budget.
        #[arg(long)]
        at_most: bool,
        /// Directory for optimization.json and ranking.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check of E[1/(T+1)] and E[T] for Poisson encounter counts.
    Validate {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0, 5.0])]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; `.json` selects JSON, anything else CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in capability profiles and the four scenario files.
    DumpDefaults {
        /// Write the scenario files into this directory instead of printing them.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Print the needs behavior tree.
    Tree,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            paths,
            builtin,
            trials,
            seed,
            out,
            threads,
            trace,
        } => {
            let mut scenarios: Vec<Scenario> = paths.iter().map(load_scenario).collect::<Result<_, _>>()?;
            if builtin {
                scenarios.extend(builtin_scenarios());
            }
            if scenarios.is_empty() {
                bail!("no scenarios given; pass scenario files or --builtin");
            }
            if let Some(path) = trace {
                let mut world = build_world(&scenarios[0], seed)?;
                world.enable_trace();
                while !world.is_finished() {
                    world.step();
                }
                let text: String = world.trace().iter().map(|e| format!("{e}\n")).collect();
                fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            }
            let result = match threads {
                Some(n) => run_experiment_with_threads(&scenarios, trials, seed, n)?,
                None => run_experiment(&scenarios, trials, seed)?,
            };
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_csv(result.trials.as_slice(), &dir.join("trials.csv"))?;
                    write_csv(result.aggregates.as_slice(), &dir.join("aggregate.csv"))?;
                    write_json(&result, &dir.join("experiment.json"))?;
                    print!("{}", csv_string(result.aggregates.as_slice())?);
                }
                None => print!("{}", csv_string(result.aggregates.as_slice())?),
            }
        }
        Command::Analytic { mission, compare: pair, out } => {
            let file = load_mission_file(&mission)?;
            for v in check_dominance(&file.profiles, &DominanceConfig::default()) {
                eprintln!("warning: profiles violate {}: {}", v.relation.describe(), v.failed.join(", "));
            }
            if file.compositions.is_empty() {
                bail!("{} lists no [[composition]] entries", mission.display());
            }
            let evals: Vec<Evaluation> = file
                .compositions
                .iter()
                .map(|c| Evaluation::compute(&c.name, c.composition, &file.mission, &file.profiles))
                .collect::<Result<_, _>>()?;
            let find = |name: &str| {
                evals
                    .iter()
                    .find(|e| e.name == name)
                    .with_context(|| format!("no composition named `{name}`"))
            };
            let comparisons = match pair.as_deref() {
                Some([a, b]) => vec![compare(find(a)?, find(b)?)?],
                _ => {
                    let mut all = Vec::new();
                    for a in &evals {
                        for b in &evals {
                            if a.name != b.name && b.report.expected_utility > 0.0 {
                                all.push(compare(a, b)?);
                            }
                        }
                    }
                    all
                }
            };
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_json(&evals, &dir.join("reports.json"))?;
                    write_csv(evals.as_slice(), &dir.join("reports.csv"))?;
                    write_json(&comparisons, &dir.join("comparisons.json"))?;
                    write_csv(comparisons.as_slice(), &dir.join("comparisons.csv"))?;
                    print!("{}", csv_string(evals.as_slice())?);
                }
                None => {
                    let doc = serde_json::json!({ "reports": evals, "comparisons": comparisons });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
        }
        Command::Optimize {
            budget,
            mission,
            at_most,
            out,
        } => {
            let file = load_mission_file(&mission)?;
            let mode = if at_most { BudgetMode::AtMost } else { BudgetMode::Exact };
            let result = optimize_team(budget, mode, &file.mission, &file.profiles)?;
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_json(&result, &dir.join("optimization.json"))?;
                    write_csv(&result, &dir.join("ranking.csv"))?;
                    println!(
                        "best {} expected_utility={} expected_energy={} ({} feasible of {})",
                        result.best,
                        result.report.expected_utility,
                        result.report.expected_energy,
                        result.feasible_count,
                        result.evaluated_count
                    );
                }
                None => println!("{}", serde_json::to_string_pretty(&result)?),
            }
        }
        Command::Validate {
            lambdas,
            samples,
            seed,
            out,
        } => {
            let report = validate_analytic(&lambdas, samples, seed)?;
            match out {
                Some(path) if path.extension().is_some_and(|e| e == "json") => write_json(&report, &path)?,
                Some(path) => write_csv(&report, &path)?,
                None => print!("{}", csv_string(&report)?),
            }
        }
        Command::DumpDefaults { write } => {
            let profiles = ProfileSet::default();
            match write {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    for (name, text) in BUILTIN_SCENARIOS {
                        let path = dir.join(name);
                        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    write_json(&profiles, &dir.join("profiles.json"))?;
                }
                None => {
                    println!("# built-in capability profiles");
                    for class in RobotClass::ALL {
                        println!("# {class}: {}", serde_json::to_string(profiles.get(class))?);
                    }
                    for (name, text) in BUILTIN_SCENARIOS {
                        println!("\n# ---- {name} ----");
                        print!("{text}");
                    }
                }
            }
        }
        Command::Tree => print!("{}", build_needs_tree(&NeedsTreeConfig::default())?.dump()),
    }
    Ok(())
}
