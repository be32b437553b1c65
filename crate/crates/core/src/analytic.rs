//! Closed-form expectations for a rescue group.
//!
//! Obstacle encounters per round follow a Poisson law with rate
//! `c·n / sen_total`. A round costs `2l/v` travel plus `2·t_c` per encounter
//! plus one unit of rescue-handling time, so the expected number of rounds
//! inside a budget `t_n` is `t_n · E[1/(T+1)]` with `T ~ Poisson(λ)`, which
//! evaluates to `t_n · (1 − e^{−λ})/λ`. Expected utility multiplies that by
//! the per-round throughput `min(total_cap, total_res)`; expected energy adds
//! the fixed travel energy, the expected obstacle energy, and one point per
//! rescued unit.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{aggregate_capability, AggregateCapability, MissionSpec, ProfileSet, TeamComposition};

/// Poisson encounter rate `c·n / sen_total`; zero for infinite sensing or no obstacles.
pub fn encounter_rate(c: f64, n: u32, sen_total: f64) -> Result<f64, ModelError> {
    if sen_total.is_nan() || sen_total <= 0.0 {
        return Err(ModelError::invalid("sen_total", format!("must be > 0, got {sen_total}")));
    }
    if n == 0 || sen_total.is_infinite() {
        return Ok(0.0);
    }
    Ok(c * f64::from(n) / sen_total)
}

/// Expected per-round travel-plus-obstacle time: `2l/v + 2·t_c·c·n/sen_total`.
pub fn round_trip_lambda(mission: &MissionSpec, group_v: f64, sen_total: f64) -> Result<f64, ModelError> {
    if !(group_v.is_finite() && group_v > 0.0) {
        return Err(ModelError::invalid("group_v", format!("must be finite and > 0, got {group_v}")));
    }
    let rate = encounter_rate(mission.c, mission.n, sen_total)?;
    Ok(2.0 * mission.l / group_v + 2.0 * mission.t_c * rate)
}

/// `E[1/(T+1)]` for `T ~ Poisson(λ)`, i.e. `(1 − e^{−λ})/λ`, with the
/// continuous limit 1 at λ = 0.
pub fn poisson_reciprocal_expectation(lambda: f64) -> Result<f64, ModelError> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(ModelError::invalid("lambda", format!("must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if lambda.is_infinite() {
        return Ok(0.0);
    }
    // expm1 keeps full precision for small λ
    Ok(-(-lambda).exp_m1() / lambda)
}

pub fn expected_rounds(t_n: f64, lambda: f64) -> Result<f64, ModelError> {
    if !(t_n.is_finite() && t_n > 0.0) {
        return Err(ModelError::invalid("t_n", format!("must be finite and > 0, got {t_n}")));
    }
    Ok(t_n * poisson_reciprocal_expectation(lambda)?)
}

/// Units rescued per round: bounded by both carrying capacity and resources.
pub fn effective_throughput(total_cap: f64, total_res: f64) -> f64 {
    total_cap.min(total_res)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    /// Expected per-round time (Poisson parameter of the round time).
    pub lambda_round: f64,
    pub expected_rounds: f64,
    pub throughput_per_round: f64,
    pub expected_utility: f64,
    pub expected_energy: f64,
    /// Expected obstacle encounters per one-way trip.
    pub encounter_rate: f64,
    pub aggregate: AggregateCapability,
}

impl AnalyticReport {
    /// Expected energy per expected rescued unit; `None` when nothing is rescued.
    pub fn energy_per_unit(&self) -> Option<f64> {
        (self.expected_utility > 0.0).then(|| self.expected_energy / self.expected_utility)
    }
}

/// Full closed-form evaluation of one composition.
pub fn evaluate(comp: &TeamComposition, mission: &MissionSpec, profiles: &ProfileSet) -> Result<AnalyticReport, ModelError> {
    mission.validate()?;
    let aggregate = aggregate_capability(comp, profiles)?;
    let lambda = round_trip_lambda(mission, aggregate.min_v, aggregate.total_sen)?;
    let rate = encounter_rate(mission.c, mission.n, aggregate.total_sen)?;
    let rounds = expected_rounds(mission.t_n, lambda)?;
    let throughput = effective_throughput(aggregate.total_cap, aggregate.total_res);
    let utility = rounds * throughput;
    let energy = mission.e_t + 2.0 * rate * mission.e_c + utility;
    Ok(AnalyticReport {
        lambda_round: lambda,
        expected_rounds: rounds,
        throughput_per_round: throughput,
        expected_utility: utility,
        expected_energy: energy,
        encounter_rate: rate,
        aggregate,
    })
}

pub fn expected_utility(comp: &TeamComposition, mission: &MissionSpec, profiles: &ProfileSet) -> Result<f64, ModelError> {
    evaluate(comp, mission, profiles).map(|r| r.expected_utility)
}

pub fn expected_energy(comp: &TeamComposition, mission: &MissionSpec, profiles: &ProfileSet) -> Result<f64, ModelError> {
    evaluate(comp, mission, profiles).map(|r| r.expected_energy)
}

/// A report bound to the composition and mission it was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub name: String,
    pub composition: TeamComposition,
    pub mission: MissionSpec,
    pub report: AnalyticReport,
}

impl Evaluation {
    pub fn compute(
        name: impl Into<String>,
        composition: TeamComposition,
        mission: &MissionSpec,
        profiles: &ProfileSet,
    ) -> Result<Self, ModelError> {
        Ok(Evaluation {
            name: name.into(),
            composition,
            mission: mission.clone(),
            report: evaluate(&composition, mission, profiles)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominant {
    A,
    B,
    Tie,
}

/// Structural relations a comparison exemplifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonNote {
    HomogeneousPair,
    HeterogeneousPair,
    HeterogeneousVsHomogeneous,
    /// A carrier+supplier mix out-rescues an equal-size pure carrier group.
    MixedCarrierSupplierExceedsCarriers,
    /// The mixed group spends less energy per rescued unit.
    MixedCheaperPerUnit,
    EqualExpectedEnergy,
    SelfComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: String,
    pub b: String,
    /// `E(U)_a / E(U)_b`.
    pub utility_ratio: f64,
    /// `E(E)_a − E(E)_b`, percent.
    pub energy_difference: f64,
    /// `E(E)_a/E(U)_a − E(E)_b/E(U)_b`; absent when either group rescues nothing.
    pub energy_per_unit_difference: Option<f64>,
    pub dominant: Dominant,
    pub notes: Vec<ComparisonNote>,
}

pub fn compare(a: &Evaluation, b: &Evaluation) -> Result<ComparisonReport, ModelError> {
    if a.mission != b.mission {
        return Err(ModelError::MissionMismatch);
    }
    let (ua, ub) = (a.report.expected_utility, b.report.expected_utility);
    if !(ub > 0.0) {
        return Err(ModelError::invalid("b.expected_utility", "must be > 0 to form a ratio"));
    }
    let utility_ratio = ua / ub;
    let energy_difference = a.report.expected_energy - b.report.expected_energy;
    let energy_per_unit_difference = match (a.report.energy_per_unit(), b.report.energy_per_unit()) {
        (Some(ea), Some(eb)) => Some(ea - eb),
        _ => None,
    };
    let dominant = if ua > ub {
        Dominant::A
    } else if ub > ua {
        Dominant::B
    } else {
        Dominant::Tie
    };

    let (ca, cb) = (a.composition, b.composition);
    let mut notes = Vec::new();
    if ca == cb {
        notes.push(ComparisonNote::SelfComparison);
    }
    match (ca.is_homogeneous(), cb.is_homogeneous()) {
        (true, true) => notes.push(ComparisonNote::HomogeneousPair),
        (false, false) => notes.push(ComparisonNote::HeterogeneousPair),
        _ => notes.push(ComparisonNote::HeterogeneousVsHomogeneous),
    }
    let carrier_supplier_mix = ca.x > 0 && ca.y > 0 && ca.z == 0;
    let pure_carriers = cb.y == 0 && cb.z == 0 && cb.x > 0;
    if carrier_supplier_mix && pure_carriers && ca.size() == cb.size() && utility_ratio > 1.0 {
        notes.push(ComparisonNote::MixedCarrierSupplierExceedsCarriers);
    }
    if !ca.is_homogeneous() && cb.is_homogeneous() && energy_per_unit_difference.is_some_and(|d| d < 0.0) {
        notes.push(ComparisonNote::MixedCheaperPerUnit);
    }
    if energy_difference == 0.0 {
        notes.push(ComparisonNote::EqualExpectedEnergy);
    }

    Ok(ComparisonReport {
        a: a.name.clone(),
        b: b.name.clone(),
        utility_ratio,
        energy_difference,
        energy_per_unit_difference,
        dominant,
        notes,
    })
}
