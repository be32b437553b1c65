//! Scenario ingestion, multi-trial experiments, Monte Carlo validation of
//! the closed forms, statistics and report emission.

pub mod experiment;
pub mod mission;
pub mod report;
pub mod scenario;
pub mod stats;
pub mod validate;

pub use experiment::{run_experiment, run_experiment_with_threads, AggregateStats, ExperimentResult, TrialRecord};
pub use mission::{load_mission_file, parse_mission_file, MissionFile, NamedComposition};
pub use report::{emit, write_csv, write_json, CsvTable, Format};
pub use scenario::{builtin_scenarios, load_scenario, parse_scenario, Scenario, BUILTIN_SCENARIOS};
pub use stats::SummaryStats;
pub use validate::{validate_analytic, ValidationReport, ValidationRow};
