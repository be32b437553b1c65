use proptest::prelude::*;

use rescue_coop::analytic::{
    compare, encounter_rate, evaluate, expected_rounds, poisson_reciprocal_expectation, Dominant, Evaluation,
};
use rescue_coop::harness::parse_mission_file;
use rescue_coop::model::{MissionSpec, ProfileSet, TeamComposition};
use rescue_coop::optimizer::{enumerate_compositions, optimize_over, optimize_team, BudgetMode};
use rescue_coop::ModelError;

/// `E[1/(T+1)]` summed term by term over the Poisson pmf.
fn series(lambda: f64) -> f64 {
    let mut term = (-lambda).exp();
    let mut sum = 0.0;
    for k in 0..400u32 {
        sum += term / f64::from(k + 1);
        term *= lambda / f64::from(k + 1);
    }
    sum
}

fn mission(n: u32, t_c: f64) -> MissionSpec {
    MissionSpec {
        t_n: 300.0,
        l: 30.0,
        n,
        c: 1.0,
        t_c,
        e_c: 1.5,
        e_t: 5.0,
        requirement: vec![],
    }
}

#[test]
fn reciprocal_expectation_matches_series() {
    for lambda in [1e-9, 1e-4, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 60.0] {
        let got = poisson_reciprocal_expectation(lambda).unwrap();
        let want = series(lambda);
        assert!((got - want).abs() <= 1e-12 * want.max(1e-300), "λ={lambda}: {got} vs {want}");
    }
    assert_eq!(poisson_reciprocal_expectation(0.0).unwrap(), 1.0);
    assert!(poisson_reciprocal_expectation(-1.0).is_err());
    assert!(poisson_reciprocal_expectation(f64::NAN).is_err());
}

#[test]
fn infinite_sensing_removes_encounters() {
    assert_eq!(encounter_rate(1.0, 8, f64::INFINITY).unwrap(), 0.0);
    assert_eq!(encounter_rate(1.0, 0, 10.0).unwrap(), 0.0);
    assert_eq!(encounter_rate(2.0, 8, 4.0).unwrap(), 4.0);
    assert!(encounter_rate(1.0, 8, 0.0).is_err());
}

#[test]
fn hand_computed_carrier_team() {
    let m = mission(8, 3.0);
    let r = evaluate(&TeamComposition::new(6, 0, 0), &m, &ProfileSet::default()).unwrap();
    // sen_total 60, rate 8/60, λ = 60 + 6·8/60 = 60.8
    let lambda: f64 = 60.0 + 0.8;
    assert!((r.lambda_round - lambda).abs() < 1e-12);
    let rounds = 300.0 * (1.0 - (-lambda).exp()) / lambda;
    assert!((r.expected_rounds - rounds).abs() < 1e-9);
    // throughput min(48, 12)
    assert_eq!(r.throughput_per_round, 12.0);
    assert!((r.expected_energy - (5.0 + 2.0 * (8.0 / 60.0) * 1.5 + rounds * 12.0)).abs() < 1e-9);
}

#[test]
fn comparison_prefers_higher_utility() {
    let m = mission(8, 3.0);
    let p = ProfileSet::default();
    let a = Evaluation::compute("a", TeamComposition::new(3, 0, 3), &m, &p).unwrap();
    let b = Evaluation::compute("b", TeamComposition::new(6, 0, 0), &m, &p).unwrap();
    let c = compare(&a, &b).unwrap();
    assert!((c.utility_ratio - a.report.expected_utility / b.report.expected_utility).abs() < 1e-12);
    assert_eq!(c.energy_difference, a.report.expected_energy - b.report.expected_energy);
    let same = compare(&a, &a).unwrap();
    assert_eq!(same.utility_ratio, 1.0);
    assert_eq!(same.dominant, Dominant::Tie);
}

#[test]
fn example_mission_file_parses() {
    let f = parse_mission_file(include_str!("../missions/example.toml"), "example.toml").unwrap();
    assert_eq!(f.compositions.len(), 3);
    assert_eq!(f.mission.requirement, vec![100.0, 10.0]);
}

#[test]
fn budget_limits() {
    let m = mission(8, 3.0);
    let p = ProfileSet::default();
    assert!(matches!(optimize_team(0, BudgetMode::Exact, &m, &p), Err(ModelError::BudgetOutOfRange { .. })));
    assert!(matches!(optimize_team(61, BudgetMode::Exact, &m, &p), Err(ModelError::BudgetOutOfRange { .. })));
    let mut hard = m.clone();
    hard.requirement = vec![1e12];
    assert!(matches!(
        optimize_team(3, BudgetMode::AtMost, &hard, &p),
        Err(ModelError::NoFeasibleComposition { budget: 3 })
    ));
}

proptest! {
    #[test]
    fn reciprocal_expectation_is_bounded_and_decreasing(a in 0.0f64..200.0, b in 0.0f64..200.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f_lo = poisson_reciprocal_expectation(lo).unwrap();
        let f_hi = poisson_reciprocal_expectation(hi).unwrap();
        prop_assert!(f_lo > 0.0 && f_lo <= 1.0);
        prop_assert!(f_hi <= f_lo);
        prop_assert!(f_hi >= (1.0 + hi).recip() - 1e-15);
    }

    #[test]
    fn rounds_scale_with_budget(t_n in 1.0f64..1e4, lambda in 0.0f64..100.0, k in 1.0f64..10.0) {
        let one = expected_rounds(t_n, lambda).unwrap();
        let many = expected_rounds(t_n * k, lambda).unwrap();
        prop_assert!((many - k * one).abs() <= 1e-9 * many.max(1.0));
    }

    #[test]
    fn utility_is_rounds_times_throughput(
        x in 0u32..8, y in 0u32..8, z in 0u32..8, n in 0u32..30, t_c in 0.0f64..10.0,
    ) {
        prop_assume!(x + y + z > 0);
        let r = evaluate(&TeamComposition::new(x, y, z), &mission(n, t_c), &ProfileSet::default()).unwrap();
        prop_assert_eq!(r.expected_utility, r.expected_rounds * r.throughput_per_round);
        prop_assert!(r.expected_energy >= 5.0 + r.expected_utility);
        prop_assert!(r.expected_rounds <= 300.0);
    }

    #[test]
    fn adding_an_observer_never_slows_encounters(x in 1u32..8, n in 1u32..30) {
        let m = mission(n, 3.0);
        let p = ProfileSet::default();
        let without = evaluate(&TeamComposition::new(x, 0, 0), &m, &p).unwrap();
        let with = evaluate(&TeamComposition::new(x, 0, 1), &m, &p).unwrap();
        prop_assert_eq!(with.encounter_rate, 0.0);
        prop_assert!(with.lambda_round <= without.lambda_round);
    }

    #[test]
    fn optimizer_ignores_candidate_order(budget in 1u32..7, shuffle in any::<u64>(), cap_req in 0.0f64..400.0) {
        let mut m = mission(8, 3.0);
        m.requirement = vec![cap_req];
        let p = ProfileSet::default();
        let mut candidates = enumerate_compositions(budget, BudgetMode::AtMost).unwrap();
        let forward = optimize_over(&candidates, &m, &p);
        let len = candidates.len();
        let mut s = shuffle;
        for i in (1..len).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            candidates.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = optimize_over(&candidates, &m, &p);
        match (forward, shuffled) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.best, b.best);
                prop_assert_eq!(a.ranking, b.ranking);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.map(|r| r.best), b.map(|r| r.best)),
        }
    }

    #[test]
    fn optimizer_best_beats_every_feasible_candidate(budget in 1u32..9) {
        let m = mission(8, 3.0);
        let p = ProfileSet::default();
        let result = optimize_team(budget, BudgetMode::Exact, &m, &p).unwrap();
        for c in enumerate_compositions(budget, BudgetMode::Exact).unwrap() {
            let u = evaluate(&c, &m, &p).unwrap().expected_utility;
            prop_assert!(u <= result.report.expected_utility);
        }
        prop_assert_eq!(result.evaluated_count as u32, (budget + 1) * (budget + 2) / 2);
    }
}
