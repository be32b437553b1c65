//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p rescue-coop --test acceptance`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rescue_coop::analytic::{compare, evaluate, Evaluation};
use rescue_coop::harness::report::csv_string;
use rescue_coop::harness::{builtin_scenarios, run_experiment, run_experiment_with_threads, validate_analytic};
use rescue_coop::model::{CapabilityProfile, MissionSpec, ProfileSet, TeamComposition};
use rescue_coop::optimizer::{optimize_team, BudgetMode};
use rescue_coop::sim::{build_world, sample_encounters, Blackboard, Intent, Phase, SimBindings, Targets, Vec2};
use rescue_coop::bt::{build_needs_tree, tick, NeedsTreeConfig};

const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const DRAWS: u64 = 1_000_000;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// E[1/(T+1)] by summing the Poisson series directly.
fn reciprocal_series(lambda: f64) -> f64 {
    let mut term = (-lambda).exp();
    let mut sum = 0.0;
    for k in 0..200 {
        sum += term / (k as f64 + 1.0);
        term *= lambda / (k as f64 + 1.0);
    }
    sum
}

fn criterion_1() -> Outcome {
    let mut worst_err: f64 = 0.0;
    let mut worst_time: f64 = 0.0;
    for (i, &lambda) in LAMBDAS.iter().enumerate() {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + i as u64);
        let mut acc = 0.0;
        for _ in 0..DRAWS {
            acc += 1.0 / (sample_encounters(lambda, &mut rng).unwrap() as f64 + 1.0);
        }
        worst_time = worst_time.max(start.elapsed().as_secs_f64());
        let oracle = reciprocal_series(lambda);
        worst_err = worst_err.max((acc / DRAWS as f64 - oracle).abs() / oracle);
    }
    outcome(
        worst_err < 0.01 && worst_time < 10.0,
        format!("max rel err {worst_err:.2e} (tol 1e-2), slowest lambda {worst_time:.2}s (limit 10s)"),
    )
}

fn criterion_2() -> Outcome {
    let report = validate_analytic(&LAMBDAS, DRAWS, SEED).unwrap();
    let mean = report.rows.iter().map(|r| r.mean_rel_error).fold(0.0, f64::max);
    let var = report.rows.iter().map(|r| r.var_rel_error).fold(0.0, f64::max);
    let series = report
        .rows
        .iter()
        .map(|r| (r.analytic - reciprocal_series(r.lambda)).abs())
        .fold(0.0, f64::max);
    outcome(
        mean < 0.01 && var < 0.02 && series < 1e-12,
        format!("max mean rel err {mean:.2e} (tol 1e-2), max variance rel err {var:.2e} (tol 2e-2)"),
    )
}

fn mission() -> MissionSpec {
    MissionSpec {
        t_n: 300.0,
        l: 10.0,
        n: 12,
        c: 1.0,
        t_c: 0.5,
        e_c: 0.2,
        e_t: 5.0,
        requirement: vec![],
    }
}

/// cap_c ≫ res_c = k, res_s ≫ cap_s = k, cap_o = res_o = k, with carriers and
/// suppliers sharing speed and sensing.
fn symmetric_profiles(k: f64) -> ProfileSet {
    ProfileSet {
        carrier: CapabilityProfile { v: 1.0, com: 20.0, sen: 10.0, eng: 100.0, res: k, cap: 8.0 * k },
        supplier: CapabilityProfile { v: 1.0, com: 20.0, sen: 10.0, eng: 90.0, res: 50.0 * k, cap: k },
        observer: CapabilityProfile { v: 10.0, com: 200.0, sen: f64::INFINITY, eng: 20.0, res: k, cap: k },
    }
}

fn criterion_3() -> Outcome {
    let m = mission();
    let p = ProfileSet::default();
    let mut worst: f64 = 0.0;
    for x in 0..=4 {
        for y in 0..=4 {
            for z in 0..=4 {
                let c = TeamComposition::new(x, y, z);
                if c.size() == 0 {
                    continue;
                }
                let r = evaluate(&c, &m, &p).unwrap();
                worst = worst.max((r.expected_utility - r.expected_rounds * r.throughput_per_round).abs());
            }
        }
    }

    let sym = symmetric_profiles(2.0);
    let mut pure_gap: f64 = 0.0;
    let mut mixed_gap: f64 = 0.0;
    for k in 1..=6 {
        let hc = evaluate(&TeamComposition::new(k, 0, 0), &m, &sym).unwrap();
        let hs = evaluate(&TeamComposition::new(0, k, 0), &m, &sym).unwrap();
        pure_gap = pure_gap.max((hc.expected_energy - hs.expected_energy).abs());
        for z in 1..=3 {
            let co = evaluate(&TeamComposition::new(k, 0, z), &m, &sym).unwrap();
            let so = evaluate(&TeamComposition::new(0, k, z), &m, &sym).unwrap();
            mixed_gap = mixed_gap.max((co.expected_energy - so.expected_energy).abs());
        }
    }
    outcome(
        worst <= 1e-12 && pure_gap == 0.0 && mixed_gap == 0.0,
        format!(
            "utility-product gap {worst:.1e} (tol 1e-12); carriers vs suppliers energy gap {pure_gap}; carrier+observer vs supplier+observer gap {mixed_gap}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let m = mission();
    let p = ProfileSet::default();
    let mut worst_ratio = f64::INFINITY;
    let mut worst_epu = f64::NEG_INFINITY;
    for size in 2..=8 {
        for y in 1..size {
            let a = Evaluation::compute("mixed", TeamComposition::new(size - y, y, 0), &m, &p).unwrap();
            let b = Evaluation::compute("carriers", TeamComposition::new(size, 0, 0), &m, &p).unwrap();
            let r = compare(&a, &b).unwrap();
            worst_ratio = worst_ratio.min(r.utility_ratio);
            worst_epu = worst_epu.max(r.energy_per_unit_difference.unwrap());
        }
    }
    outcome(
        worst_ratio > 1.0 + 1e-9 && worst_epu < -1e-9,
        format!("min utility ratio {worst_ratio:.6} (> 1), max energy-per-unit difference {worst_epu:.6} (< 0)"),
    )
}

struct OracleRow {
    comp: TeamComposition,
    utility: f64,
    energy: f64,
}

/// Closed forms recomputed from the profile numbers, then a plain argmax.
fn brute_force(budget: u32, exact: bool, m: &MissionSpec, p: &ProfileSet) -> Option<TeamComposition> {
    let mut rows = Vec::new();
    for x in 0..=budget {
        for y in 0..=budget {
            for z in 0..=budget {
                let size = x + y + z;
                if size == 0 || size > budget || (exact && size != budget) {
                    continue;
                }
                let counts = [(x, &p.carrier), (y, &p.supplier), (z, &p.observer)];
                let (mut cap, mut res, mut sen, mut v) = (0.0, 0.0, 0.0, f64::INFINITY);
                for (k, prof) in counts {
                    if k == 0 {
                        continue;
                    }
                    cap += f64::from(k) * prof.cap;
                    res += f64::from(k) * prof.res;
                    sen += f64::from(k) * prof.sen;
                    v = f64::min(v, prof.v);
                }
                let rate = if m.n == 0 || sen.is_infinite() { 0.0 } else { m.c * f64::from(m.n) / sen };
                let lambda = 2.0 * m.l / v + 2.0 * m.t_c * rate;
                let f = if lambda == 0.0 { 1.0 } else { -(-lambda).exp_m1() / lambda };
                let rounds = m.t_n * f;
                let utility = rounds * cap.min(res);
                let energy = m.e_t + 2.0 * rate * m.e_c + utility;
                let delivered = [rounds * cap, rounds * res];
                if m.requirement.iter().zip(delivered).all(|(need, got)| got >= *need) {
                    rows.push(OracleRow { comp: TeamComposition::new(x, y, z), utility, energy });
                }
            }
        }
    }
    let mut best: Option<&OracleRow> = None;
    for row in &rows {
        best = match best {
            None => Some(row),
            Some(b) => {
                let better = row.utility > b.utility
                    || (row.utility == b.utility && row.energy < b.energy)
                    || (row.utility == b.utility && row.energy == b.energy && (row.comp.x, row.comp.y, row.comp.z) < (b.comp.x, b.comp.y, b.comp.z));
                Some(if better { row } else { b })
            }
        };
    }
    best.map(|b| b.comp)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut missions = vec![mission()];
    missions.push(MissionSpec { n: 0, ..mission() });
    missions.push(MissionSpec { requirement: vec![2000.0, 3000.0], ..mission() });
    missions.push(MissionSpec { requirement: vec![1e9], ..mission() });
    let mut tied = ProfileSet::default();
    tied.supplier = tied.carrier;
    let profile_sets = [ProfileSet::default(), symmetric_profiles(2.0), tied];

    let (mut checked, mut mismatches) = (0, Vec::new());
    for m in &missions {
        for p in &profile_sets {
            for budget in 1..=5 {
                for (mode, exact) in [(BudgetMode::Exact, true), (BudgetMode::AtMost, false)] {
                    let got = optimize_team(budget, mode, m, p).ok().map(|r| r.best);
                    let want = brute_force(budget, exact, m, p);
                    checked += 1;
                    if got != want {
                        mismatches.push(format!("budget {budget} {mode:?}: {got:?} vs {want:?}"));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches.is_empty() && secs < 1.0,
        format!("{checked} searches, {} mismatches {:?}, {secs:.3}s (limit 1s)", mismatches.len(), mismatches),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let scenarios = builtin_scenarios();
    let result = run_experiment(&scenarios, 10, 0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let stat = |i: usize| result.aggregate(&scenarios[i].name).unwrap();
    let rescued: Vec<f64> = (0..4).map(|i| stat(i).rescued_units.mean.unwrap()).collect();
    let sd: Vec<f64> = (0..4).map(|i| stat(i).rescued_units.sd.unwrap()).collect();
    let epu: Vec<f64> = (0..4).map(|i| stat(i).energy_per_unit.mean.unwrap()).collect();

    let a = (0..3).all(|i| rescued[3] > rescued[i]);
    let b = (0..3).all(|i| epu[3] < epu[i]);
    let c = (0..3).all(|i| sd[3] <= sd[i]);
    let c_strict = (0..3).all(|i| sd[3] < sd[i]);
    let d = rescued[1] > rescued[0] && epu[1] > epu[0];
    let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
    outcome(
        a && b && c && d && secs < 60.0,
        format!(
            "mean rescued {rescued:?}; sd {sd:?}; mean energy/unit [{:.4}, {:.4}, {:.4}, {:.4}]; (a) {} (b) {} (c) {}{} (d) {}; {secs:.1}s (limit 60s)",
            epu[0],
            epu[1],
            epu[2],
            epu[3],
            flag(a),
            flag(b),
            flag(c),
            if c && !c_strict { " [tied at the minimum]" } else { "" },
            flag(d)
        ),
    )
}

fn board_from(seed: u64) -> Blackboard {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = Targets {
        site: Vec2::new(30.0, 0.0),
        shelter: Vec2::new(0.0, 0.0),
        charger: Vec2::new(-10.0, 0.0),
    };
    let spots = [targets.site, targets.shelter, targets.charger, Vec2::new(12.0, 1.0)];
    let mut b = Blackboard::nominal(0, spots[rng.random_range(0..4)], targets);
    b.energy = rng.random_range(0.0..=100.0);
    b.capacity = rng.random_range(0..=8);
    b.load = rng.random_range(0..=b.capacity);
    b.blocked_ticks = rng.random_range(0..20);
    b.victims_available = rng.random_bool(0.8);
    b.phase = match rng.random_range(0..7) {
        0 => Phase::ToSite,
        1 => Phase::Rescuing { remaining_ticks: rng.random_range(1..10) },
        2 => Phase::ToShelter,
        3 => Phase::Unloading,
        4 => Phase::ToCharge,
        5 => Phase::Charging { remaining_ticks: rng.random_range(1..100) },
        _ => Phase::Idle,
    };
    if rng.random_bool(0.5) {
        b.others.push((1, b.position + Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))));
    }
    b
}

fn criterion_7() -> Outcome {
    let tree = build_needs_tree(&NeedsTreeConfig::default()).unwrap();
    let bindings = SimBindings::default();
    let mut violations = Vec::new();
    let boards = 20_000;
    for seed in 0..boards {
        let mut b = board_from(seed);
        tick(&tree, &mut b, &bindings).unwrap();
        let first_effect = b.executed.get(1).copied();
        let expected = if b.imminent_collision {
            Some("evade")
        } else if b.energy < b.charge_threshold || b.phase.is_charging() {
            Some("go_charge")
        } else if b.capacity == 0 {
            Some("request_reassignment")
        } else {
            Some("assess_utility")
        };
        let low = b.energy < b.charge_threshold || b.phase.is_charging();
        let rescued_while_low = low && matches!(b.intent, Intent::Rescue | Intent::Unload);
        if first_effect != expected || b.effector_count() > 1 || rescued_while_low {
            violations.push(seed);
        }
    }

    // charge discipline in a running world: six observers drain below the
    // threshold late in the mission
    let scenario = builtin_scenarios().remove(1);
    let mut world = build_world(&scenario, 7).unwrap();
    let n = world.robots.len();
    let mut low = vec![false; n];
    let mut charging_ticks = vec![0u32; n];
    let mut completed = Vec::new();
    let mut bad_actions = 0;
    while !world.is_finished() {
        let intents = world.gather_intents();
        for (i, r) in world.robots.iter().enumerate() {
            if r.energy < r.charge_threshold {
                low[i] = true;
            }
            if low[i] && matches!(intents[i], Intent::Rescue | Intent::Unload) {
                bad_actions += 1;
            }
        }
        world.step();
        for (i, r) in world.robots.iter().enumerate() {
            if r.phase.is_charging() {
                charging_ticks[i] += 1;
            } else if charging_ticks[i] > 0 {
                // the completing tick itself is still part of the hold
                completed.push(charging_ticks[i] + 1);
                charging_ticks[i] = 0;
                low[i] = false;
            }
        }
    }
    let ten_seconds = (10.0 / world.dt).round() as u32;
    let holds_ok = !completed.is_empty() && completed.iter().all(|&t| t == ten_seconds);
    outcome(
        violations.is_empty() && bad_actions == 0 && holds_ok,
        format!(
            "{boards} random boards, {} preemption violations; {} completed charges, holds {:?} ticks (want {ten_seconds}); {bad_actions} rescue/unload actions while low",
            violations.len(),
            completed.len(),
            completed.iter().collect::<std::collections::BTreeSet<_>>()
        ),
    )
}

fn criterion_8() -> Outcome {
    let scenarios = builtin_scenarios();
    let run = |threads: usize| {
        let r = run_experiment_with_threads(&scenarios, 10, 42, threads).unwrap();
        csv_string(r.trials.as_slice()).unwrap()
    };
    let a = run(1);
    let b = run(1);
    let c = run(8);
    outcome(
        a == b && a == c,
        format!("trial CSV {} bytes; repeat identical: {}; 1 vs 8 threads identical: {}", a.len(), a == b, a == c),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("poisson reciprocal identity", criterion_1),
        ("poisson moments", criterion_2),
        ("analytic identities", criterion_3),
        ("mixed vs homogeneous comparison", criterion_4),
        ("optimizer matches brute force", criterion_5),
        ("simulation orderings", criterion_6),
        ("behavior tree properties", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
