//! Exhaustive team-composition search: maximize expected utility over every
//! composition within a robot budget, subject to the mission requirement.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::analytic::{evaluate, AnalyticReport};
use crate::error::ModelError;
use crate::model::{aggregate_capability, MissionSpec, ProfileSet, TeamComposition};

/// Largest budget the exhaustive search accepts.
pub const MAX_BUDGET: u32 = 60;

/// Requirement components understood by [`is_feasible`]: delivered capacity
/// and delivered resources.
pub const REQUIREMENT_DIMENSIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    /// Exactly `budget` robots.
    Exact,
    /// Between one and `budget` robots.
    AtMost,
}

/// All compositions for the budget, lexicographic in (x, y, z).
pub fn enumerate_compositions(budget: u32, mode: BudgetMode) -> Result<Vec<TeamComposition>, ModelError> {
    if budget == 0 {
        return Err(ModelError::BudgetOutOfRange { budget, max: MAX_BUDGET });
    }
    let mut out = Vec::new();
    for x in 0..=budget {
        for y in 0..=budget - x {
            for z in 0..=budget - x - y {
                let c = TeamComposition::new(x, y, z);
                let keep = match mode {
                    BudgetMode::Exact => c.size() == budget,
                    BudgetMode::AtMost => c.size() >= 1,
                };
                if keep {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// Expected cumulative delivery `expected_rounds × (total_cap, total_res)`
/// must dominate the requirement vector componentwise.
pub fn is_feasible(comp: &TeamComposition, mission: &MissionSpec, profiles: &ProfileSet) -> Result<bool, ModelError> {
    let report = evaluate(comp, mission, profiles)?;
    feasible_from_report(&report, &mission.requirement)
}

fn feasible_from_report(report: &AnalyticReport, requirement: &[f64]) -> Result<bool, ModelError> {
    if requirement.len() > REQUIREMENT_DIMENSIONS {
        return Err(ModelError::UnsupportedRequirement {
            got: requirement.len(),
            max: REQUIREMENT_DIMENSIONS,
        });
    }
    let delivered = [
        report.expected_rounds * report.aggregate.total_cap,
        report.expected_rounds * report.aggregate.total_res,
    ];
    Ok(requirement.iter().zip(delivered).all(|(need, got)| got >= *need))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedComposition {
    pub composition: TeamComposition,
    pub report: AnalyticReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: TeamComposition,
    pub report: AnalyticReport,
    pub feasible_count: usize,
    pub evaluated_count: usize,
    /// Every feasible composition, best first.
    pub ranking: Vec<RankedComposition>,
}

/// Total order used for ranking: higher utility first, then lower energy,
/// then the lexicographically smaller composition.
pub fn rank_order(a: &RankedComposition, b: &RankedComposition) -> Ordering {
    b.report
        .expected_utility
        .total_cmp(&a.report.expected_utility)
        .then_with(|| a.report.expected_energy.total_cmp(&b.report.expected_energy))
        .then_with(|| a.composition.cmp(&b.composition))
}

pub fn optimize_team(
    budget: u32,
    mode: BudgetMode,
    mission: &MissionSpec,
    profiles: &ProfileSet,
) -> Result<OptimizationResult, ModelError> {
    if budget == 0 || budget > MAX_BUDGET {
        return Err(ModelError::BudgetOutOfRange { budget, max: MAX_BUDGET });
    }
    mission.validate()?;
    profiles.validate()?;
    let candidates = enumerate_compositions(budget, mode)?;
    optimize_over(&candidates, mission, profiles).map_err(|e| match e {
        ModelError::NoFeasibleComposition { .. } => ModelError::NoFeasibleComposition { budget },
        other => other,
    })
}

/// Argmax over an explicit candidate list; the result does not depend on the
/// order of `candidates`.
pub fn optimize_over(
    candidates: &[TeamComposition],
    mission: &MissionSpec,
    profiles: &ProfileSet,
) -> Result<OptimizationResult, ModelError> {
    let mut ranking = Vec::new();
    for comp in candidates {
        // guards against empty compositions in caller-provided lists
        aggregate_capability(comp, profiles)?;
        let report = evaluate(comp, mission, profiles)?;
        if feasible_from_report(&report, &mission.requirement)? {
            ranking.push(RankedComposition { composition: *comp, report });
        }
    }
    ranking.sort_by(rank_order);
    let best = ranking.first().cloned().ok_or(ModelError::NoFeasibleComposition {
        budget: candidates.iter().map(TeamComposition::size).max().unwrap_or(0),
    })?;
    Ok(OptimizationResult {
        best: best.composition,
        report: best.report,
        feasible_count: ranking.len(),
        evaluated_count: candidates.len(),
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CapabilityProfile, RobotClass};

    fn mission(requirement: Vec<f64>) -> MissionSpec {
        MissionSpec {
            t_n: 300.0,
            l: 10.0,
            n: 12,
            c: 1.0,
            t_c: 0.5,
            e_c: 0.2,
            e_t: 5.0,
            requirement,
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        let two = enumerate_compositions(2, BudgetMode::Exact).unwrap();
        let expected: Vec<_> = [(0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0)]
            .iter()
            .map(|&(x, y, z)| TeamComposition::new(x, y, z))
            .collect();
        assert_eq!(two, expected);
        assert_eq!(enumerate_compositions(1, BudgetMode::Exact).unwrap().len(), 3);
        // C(11, 2)
        assert_eq!(enumerate_compositions(9, BudgetMode::Exact).unwrap().len(), 55);
        // C(5, 3) − 1 nonempty compositions of size ≤ 2
        assert_eq!(enumerate_compositions(2, BudgetMode::AtMost).unwrap().len(), 9);
        assert!(enumerate_compositions(0, BudgetMode::Exact).is_err());
    }

    fn three_carriers_cap8() -> ProfileSet {
        let mut set = ProfileSet::default();
        set.carrier = CapabilityProfile {
            v: 2.0,
            sen: 4.0,
            cap: 8.0,
            res: 100.0,
            ..crate::model::default_profile(RobotClass::Carrier)
        };
        set
    }

    #[test]
    fn feasibility_against_requirement() {
        let set = three_carriers_cap8();
        let comp = TeamComposition::new(3, 0, 0);
        assert!(is_feasible(&comp, &mission(vec![]), &set).unwrap());
        // ≈ 27.27 rounds × 24 capacity ≈ 654.5
        assert!(!is_feasible(&comp, &mission(vec![1000.0]), &set).unwrap());
        assert!(is_feasible(&comp, &mission(vec![600.0]), &set).unwrap());
        assert!(matches!(
            is_feasible(&comp, &mission(vec![1.0, 1.0, 1.0]), &set),
            Err(ModelError::UnsupportedRequirement { got: 3, .. })
        ));
    }

    #[test]
    fn impossible_requirement_has_no_solution() {
        let set = ProfileSet::default();
        let err = optimize_team(3, BudgetMode::Exact, &mission(vec![1e12]), &set).unwrap_err();
        assert_eq!(err, ModelError::NoFeasibleComposition { budget: 3 });
    }

    #[test]
    fn budget_guard() {
        let set = ProfileSet::default();
        assert!(optimize_team(0, BudgetMode::Exact, &mission(vec![]), &set).is_err());
        assert!(optimize_team(61, BudgetMode::Exact, &mission(vec![]), &set).is_err());
    }

    #[test]
    fn ranking_is_sorted_and_best_first() {
        let set = ProfileSet::default();
        let r = optimize_team(4, BudgetMode::AtMost, &mission(vec![]), &set).unwrap();
        assert_eq!(r.ranking[0].composition, r.best);
        assert!(r.ranking.windows(2).all(|w| rank_order(&w[0], &w[1]) != Ordering::Greater));
        assert_eq!(r.evaluated_count, 34);
        assert_eq!(r.feasible_count, 34);
    }
}
