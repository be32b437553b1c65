use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::stats::SummaryStats;
use crate::error::HarnessError;
use crate::sim::{run_trial, TrialMetrics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub trial: u32,
    pub seed: u64,
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub scenario: String,
    pub n_trials: usize,
    pub rescued_units: SummaryStats,
    pub total_energy: SummaryStats,
    /// Over the trials that rescued at least one unit.
    pub energy_per_unit: SummaryStats,
}

impl AggregateStats {
    pub fn from_trials(scenario: &str, trials: &[&TrialRecord]) -> Self {
        let pick = |f: &dyn Fn(&TrialMetrics) -> Option<f64>| -> Vec<f64> {
            trials.iter().filter_map(|t| f(&t.metrics)).collect()
        };
        AggregateStats {
            scenario: scenario.to_string(),
            n_trials: trials.len(),
            rescued_units: SummaryStats::from_values(&pick(&|m| Some(m.rescued_units as f64))),
            total_energy: SummaryStats::from_values(&pick(&|m| Some(m.total_energy_spent))),
            energy_per_unit: SummaryStats::from_values(&pick(&|m| m.energy_per_unit)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub base_seed: u64,
    /// Scenario-major, then trial index.
    pub trials: Vec<TrialRecord>,
    /// One row per scenario, in input order.
    pub aggregates: Vec<AggregateStats>,
}

impl ExperimentResult {
    pub fn aggregate(&self, scenario: &str) -> Option<&AggregateStats> {
        self.aggregates.iter().find(|a| a.scenario == scenario)
    }
}

/// Runs `trials` seeded trials (seeds `base_seed + i`) of every scenario on the
/// current rayon pool. Results are keyed by position, so the output does not
/// depend on scheduling.
pub fn run_experiment(scenarios: &[Scenario], trials: u32, base_seed: u64) -> Result<ExperimentResult, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::InvalidArgument("trials must be >= 1".into()));
    }
    for (i, s) in scenarios.iter().enumerate() {
        if scenarios[..i].iter().any(|o| o.name == s.name) {
            return Err(HarnessError::DuplicateScenario(s.name.clone()));
        }
        s.validate(&s.name)?;
    }

    let jobs: Vec<(usize, u32)> = (0..scenarios.len()).flat_map(|s| (0..trials).map(move |t| (s, t))).collect();
    let outcomes: Vec<Result<TrialRecord, HarnessError>> = jobs
        .par_iter()
        .map(|&(s, trial)| {
            let scenario = &scenarios[s];
            let seed = base_seed.wrapping_add(trial as u64);
            run_trial(scenario, seed)
                .map(|metrics| TrialRecord {
                    scenario: scenario.name.clone(),
                    trial,
                    seed,
                    metrics,
                })
                .map_err(|e| HarnessError::ScenarioFailed {
                    scenario: scenario.name.clone(),
                    reason: e.to_string(),
                })
        })
        .collect();
    let records = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;

    let aggregates = scenarios
        .iter()
        .map(|s| {
            let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.scenario == s.name).collect();
            AggregateStats::from_trials(&s.name, &rows)
        })
        .collect();
    Ok(ExperimentResult {
        base_seed,
        trials: records,
        aggregates,
    })
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    scenarios: &[Scenario],
    trials: u32,
    base_seed: u64,
    threads: usize,
) -> Result<ExperimentResult, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| HarnessError::InvalidArgument(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_experiment(scenarios, trials, base_seed))
}
