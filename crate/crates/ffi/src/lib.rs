//! C ABI over the rescue-coop library.
//!
//! Scenarios and worlds are opaque handles created and released through this
//! API. Every fallible call returns an [`RcStatus`]; on failure the message
//! is kept per thread and can be fetched with [`rc_last_error_message`].
//! Strings returned to the caller must be released with [`rc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rescue_coop::analytic::{evaluate, AnalyticReport};
use rescue_coop::harness::{builtin_scenarios, load_scenario, parse_scenario, Scenario};
use rescue_coop::model::{CapabilityProfile, MissionSpec, ProfileSet, RobotClass, TeamComposition};
use rescue_coop::optimizer::{optimize_team, BudgetMode};
use rescue_coop::sim::{build_world, run_trial, Phase, TrialMetrics, WorldState};
use rescue_coop::{ModelError, ScenarioError, SimError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Scenario or mission text could not be parsed.
    Parse = 3,
    /// A value is out of its allowed range.
    Range = 4,
    Io = 5,
    /// The closed-form model rejected its inputs.
    Model = 6,
    /// The world could not be built.
    Sim = 7,
    IndexOutOfRange = 8,
    Panic = 9,
}

/// Opaque validated scenario.
pub struct RcScenario(Scenario);

/// Opaque simulation state.
pub struct RcWorld(WorldState);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcTrialMetrics {
    pub rescued_units: u64,
    pub total_energy_spent: f64,
    /// NaN when nothing was rescued.
    pub energy_per_unit: f64,
    pub rounds_completed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcRobotClass {
    Carrier = 0,
    Supplier = 1,
    Observer = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcPhase {
    ToSite = 0,
    Rescuing = 1,
    ToShelter = 2,
    Unloading = 3,
    ToCharge = 4,
    Charging = 5,
    Idle = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcRobot {
    pub id: u32,
    pub class: RcRobotClass,
    pub phase: RcPhase,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
    pub load: u32,
    pub capacity: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcProfile {
    pub v: f64,
    pub com: f64,
    /// `INFINITY` for whole-map perception.
    pub sen: f64,
    pub eng: f64,
    pub res: f64,
    pub cap: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcProfileSet {
    pub carrier: RcProfile,
    pub supplier: RcProfile,
    pub observer: RcProfile,
}

/// Mission parameters. `requirement` points at `requirement_len` values and
/// may be null when the length is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcMission {
    pub t_n: f64,
    pub l: f64,
    pub n: u32,
    pub c: f64,
    pub t_c: f64,
    pub e_c: f64,
    pub e_t: f64,
    pub requirement: *const f64,
    pub requirement_len: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RcComposition {
    pub carrier: u32,
    pub supplier: u32,
    pub observer: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RcAnalyticReport {
    pub lambda_round: f64,
    pub expected_rounds: f64,
    pub throughput_per_round: f64,
    pub expected_utility: f64,
    pub expected_energy: f64,
    pub encounter_rate: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

struct Failure(RcStatus, String);

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let status = match e {
            ScenarioError::Io { .. } => RcStatus::Io,
            ScenarioError::Parse { .. } => RcStatus::Parse,
            ScenarioError::Range { .. } => RcStatus::Range,
        };
        Failure(status, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Scenario(inner) => inner.into(),
            other => Failure(RcStatus::Sim, other.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(RcStatus::Model, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RcStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RcStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure(RcStatus::Panic, msg))
    });
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RcStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
            status
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(RcStatus::InvalidUtf8, format!("`{what}` is not UTF-8: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn boxed<T>(out: &mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message of the last failed call on this thread, or null if the last call
/// succeeded. Release with [`rc_string_free`].
#[no_mangle]
pub extern "C" fn rc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_deref() {
        Some(msg) => CString::new(msg.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn rc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates scenario TOML. `origin` labels error messages and
/// may be null.
///
/// # Safety
/// `toml` and `origin` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_from_toml(
    toml: *const c_char,
    origin: *const c_char,
    out: *mut *mut RcScenario,
) -> RcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(toml, "toml")?;
        let origin = if origin.is_null() { "<ffi>" } else { str_arg(origin, "origin")? };
        boxed(out, RcScenario(parse_scenario(text, origin)?));
        Ok(())
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_load(path: *const c_char, out: *mut *mut RcScenario) -> RcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        boxed(out, RcScenario(load_scenario(str_arg(path, "path")?)?));
        Ok(())
    })
}

/// Number of built-in reproduction scenarios.
#[no_mangle]
pub extern "C" fn rc_builtin_scenario_count() -> usize {
    rescue_coop::harness::BUILTIN_SCENARIOS.len()
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_builtin(index: usize, out: *mut *mut RcScenario) -> RcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let scenario = builtin_scenarios().into_iter().nth(index).ok_or_else(|| {
            Failure(
                RcStatus::IndexOutOfRange,
                format!("built-in scenario {index} does not exist (have {})", rc_builtin_scenario_count()),
            )
        })?;
        boxed(out, RcScenario(scenario));
        Ok(())
    })
}

/// Scenario name. Release with [`rc_string_free`].
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_name(scenario: *const RcScenario) -> *mut c_char {
    match scenario.as_ref() {
        Some(s) => CString::new(s.0.name.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_free(scenario: *mut RcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

fn trial_metrics(m: &TrialMetrics) -> RcTrialMetrics {
    RcTrialMetrics {
        rescued_units: m.rescued_units,
        total_energy_spent: m.total_energy_spent,
        energy_per_unit: m.energy_per_unit.unwrap_or(f64::NAN),
        rounds_completed: m.rounds_completed,
    }
}

/// Runs one full seeded trial.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_run_trial(scenario: *const RcScenario, seed: u64, out: *mut RcTrialMetrics) -> RcStatus {
    guard(|| {
        let scenario = ref_arg(scenario, "scenario")?;
        let out = out_arg(out, "out")?;
        *out = trial_metrics(&run_trial(&scenario.0, seed)?);
        Ok(())
    })
}

/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_world_new(scenario: *const RcScenario, seed: u64, out: *mut *mut RcWorld) -> RcStatus {
    guard(|| {
        let scenario = ref_arg(scenario, "scenario")?;
        let out = out_arg(out, "out")?;
        boxed(out, RcWorld(build_world(&scenario.0, seed)?));
        Ok(())
    })
}

/// Advances up to `ticks` ticks, stopping at the end of the mission.
///
/// # Safety
/// `world` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_world_step(world: *mut RcWorld, ticks: u64) -> RcStatus {
    guard(|| {
        let world = out_arg(world, "world")?;
        for _ in 0..ticks {
            if world.0.is_finished() {
                break;
            }
            world.0.step();
        }
        Ok(())
    })
}

/// Simulated seconds elapsed; NaN for a null handle.
///
/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_world_clock(world: *const RcWorld) -> f64 {
    world.as_ref().map_or(f64::NAN, |w| w.0.clock())
}

/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_world_is_finished(world: *const RcWorld) -> bool {
    world.as_ref().is_none_or(|w| w.0.is_finished())
}

/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_world_robot_count(world: *const RcWorld) -> usize {
    world.as_ref().map_or(0, |w| w.0.robots.len())
}

/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_world_robot(world: *const RcWorld, index: usize, out: *mut RcRobot) -> RcStatus {
    guard(|| {
        let world = ref_arg(world, "world")?;
        let out = out_arg(out, "out")?;
        let r = world.0.robots.get(index).ok_or_else(|| {
            Failure(
                RcStatus::IndexOutOfRange,
                format!("robot {index} does not exist (have {})", world.0.robots.len()),
            )
        })?;
        *out = RcRobot {
            id: r.id as u32,
            class: match r.class {
                RobotClass::Carrier => RcRobotClass::Carrier,
                RobotClass::Supplier => RcRobotClass::Supplier,
                RobotClass::Observer => RcRobotClass::Observer,
            },
            phase: match r.phase {
                Phase::ToSite => RcPhase::ToSite,
                Phase::Rescuing { .. } => RcPhase::Rescuing,
                Phase::ToShelter => RcPhase::ToShelter,
                Phase::Unloading => RcPhase::Unloading,
                Phase::ToCharge => RcPhase::ToCharge,
                Phase::Charging { .. } => RcPhase::Charging,
                Phase::Idle => RcPhase::Idle,
            },
            x: r.position.x,
            y: r.position.y,
            energy: r.energy,
            load: r.load,
            capacity: r.capacity,
        };
        Ok(())
    })
}

/// Metrics of the world as it stands.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_world_metrics(world: *const RcWorld, out: *mut RcTrialMetrics) -> RcStatus {
    guard(|| {
        let world = ref_arg(world, "world")?;
        *out_arg(out, "out")? = trial_metrics(&world.0.metrics());
        Ok(())
    })
}

/// # Safety
/// `world` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_world_free(world: *mut RcWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

impl From<CapabilityProfile> for RcProfile {
    fn from(p: CapabilityProfile) -> Self {
        RcProfile {
            v: p.v,
            com: p.com,
            sen: p.sen,
            eng: p.eng,
            res: p.res,
            cap: p.cap,
        }
    }
}

impl From<RcProfile> for CapabilityProfile {
    fn from(p: RcProfile) -> Self {
        CapabilityProfile {
            v: p.v,
            com: p.com,
            sen: p.sen,
            eng: p.eng,
            res: p.res,
            cap: p.cap,
        }
    }
}

/// Fills `out` with the built-in capability profiles.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_default_profiles(out: *mut RcProfileSet) -> RcStatus {
    guard(|| {
        let d = ProfileSet::default();
        *out_arg(out, "out")? = RcProfileSet {
            carrier: d.carrier.into(),
            supplier: d.supplier.into(),
            observer: d.observer.into(),
        };
        Ok(())
    })
}

unsafe fn mission_arg(m: *const RcMission) -> Result<MissionSpec, Failure> {
    let m = ref_arg(m, "mission")?;
    let requirement = match (m.requirement.is_null(), m.requirement_len) {
        (_, 0) => Vec::new(),
        (true, _) => return Err(null("mission.requirement")),
        (false, len) => std::slice::from_raw_parts(m.requirement, len).to_vec(),
    };
    Ok(MissionSpec {
        t_n: m.t_n,
        l: m.l,
        n: m.n,
        c: m.c,
        t_c: m.t_c,
        e_c: m.e_c,
        e_t: m.e_t,
        requirement,
    })
}

unsafe fn profiles_arg(p: *const RcProfileSet) -> Result<ProfileSet, Failure> {
    let set = match p.as_ref() {
        None => ProfileSet::default(),
        Some(p) => ProfileSet {
            carrier: p.carrier.into(),
            supplier: p.supplier.into(),
            observer: p.observer.into(),
        },
    };
    set.validate()?;
    Ok(set)
}

fn report(r: &AnalyticReport) -> RcAnalyticReport {
    RcAnalyticReport {
        lambda_round: r.lambda_round,
        expected_rounds: r.expected_rounds,
        throughput_per_round: r.throughput_per_round,
        expected_utility: r.expected_utility,
        expected_energy: r.expected_energy,
        encounter_rate: r.encounter_rate,
    }
}

/// Closed-form evaluation of one composition. `profiles` may be null for the
/// built-in profiles.
///
/// # Safety
/// `mission` must be valid; `profiles` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_analytic_evaluate(
    composition: RcComposition,
    mission: *const RcMission,
    profiles: *const RcProfileSet,
    out: *mut RcAnalyticReport,
) -> RcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mission = mission_arg(mission)?;
        let profiles = profiles_arg(profiles)?;
        let comp = TeamComposition::new(composition.carrier, composition.supplier, composition.observer);
        *out = report(&evaluate(&comp, &mission, &profiles)?);
        Ok(())
    })
}

/// Best composition of exactly `budget` robots, or of one to `budget` robots
/// when `at_most` is set. `profiles` may be null.
///
/// # Safety
/// `mission` must be valid; `profiles` null or valid; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rc_optimize(
    budget: u32,
    at_most: bool,
    mission: *const RcMission,
    profiles: *const RcProfileSet,
    best: *mut RcComposition,
    best_report: *mut RcAnalyticReport,
) -> RcStatus {
    guard(|| {
        let best = out_arg(best, "best")?;
        let best_report = out_arg(best_report, "best_report")?;
        let mission = mission_arg(mission)?;
        let profiles = profiles_arg(profiles)?;
        let mode = if at_most { BudgetMode::AtMost } else { BudgetMode::Exact };
        let result = optimize_team(budget, mode, &mission, &profiles)?;
        *best = RcComposition {
            carrier: result.best.x,
            supplier: result.best.y,
            observer: result.best.z,
        };
        *best_report = report(&result.report);
        Ok(())
    })
}
