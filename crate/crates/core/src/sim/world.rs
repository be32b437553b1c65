use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agent::{Blackboard, Intent, MoveMode, Phase, SimBindings, Targets};
use super::geom::Vec2;
use super::negotiate::{negotiate_conflicts, MoveIntent, Resolution};
use crate::bt::{build_needs_tree, tick, BtNode, NeedsTreeConfig};
use crate::error::SimError;
use crate::harness::scenario::{Scenario, VictimsMode};
use crate::model::RobotClass;

pub const FULL_ENERGY: f64 = 100.0;
const PLACEMENT_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Vec2,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sites {
    pub shelter: Vec2,
    pub rescue_site: Vec2,
    pub charge_station: Vec2,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RobotMetrics {
    pub id: usize,
    pub class: Option<RobotClass>,
    pub rescued_units: u64,
    pub energy_spent: f64,
    pub rounds: u64,
    pub distance: f64,
    pub charges: u64,
    pub encounters: u64,
    pub held_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub id: usize,
    pub class: RobotClass,
    pub position: Vec2,
    /// Meters per second after any cooperation adjustment.
    pub velocity_cap: f64,
    pub energy: f64,
    pub load: u32,
    pub phase: Phase,
    /// Percent of battery per moving step.
    pub per_step_energy: f64,
    pub capacity: u32,
    /// Effective perception range; infinite when perception is shared.
    pub sense_range: f64,
    pub charge_threshold: f64,
    pub charge_ticks: u32,
    pub targets: Targets,
    /// Ticks left standing still after an obstacle encounter.
    pub stall_ticks: u32,
    /// Consecutive ticks held by negotiation.
    pub blocked_ticks: u32,
    inside: Vec<bool>,
    pub stats: RobotMetrics,
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub rescued_units: u64,
    pub total_energy_spent: f64,
    /// `None` when nothing was rescued.
    pub energy_per_unit: Option<f64>,
    pub rounds_completed: u64,
    pub per_robot: Vec<RobotMetrics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TraceKind {
    Move { x: f64, y: f64, energy: f64 },
    Evade { x: f64, y: f64, energy: f64 },
    Conflict { x: f64, y: f64 },
    Encounter { obstacle: usize, energy: f64 },
    ChargeStart { energy: f64 },
    ChargeDone,
    Load { units: u32 },
    Unload { units: u32, total: u64 },
}

/// One trace line: `t=<seconds> robot=<id> <event> [key=value ...]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    pub robot: usize,
    pub kind: TraceKind,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={:.1} robot={} ", self.time, self.robot)?;
        match self.kind {
            TraceKind::Move { x, y, energy } => write!(f, "move x={x:.4} y={y:.4} energy={energy:.4}"),
            TraceKind::Evade { x, y, energy } => write!(f, "evade x={x:.4} y={y:.4} energy={energy:.4}"),
            TraceKind::Conflict { x, y } => write!(f, "conflict held_at_x={x:.4} held_at_y={y:.4}"),
            TraceKind::Encounter { obstacle, energy } => write!(f, "encounter obstacle={obstacle} energy={energy:.4}"),
            TraceKind::ChargeStart { energy } => write!(f, "charge_start energy={energy:.4}"),
            TraceKind::ChargeDone => write!(f, "charge_done energy={FULL_ENERGY:.4}"),
            TraceKind::Load { units } => write!(f, "load units={units}"),
            TraceKind::Unload { units, total } => write!(f, "unload units={units} total={total}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct StepParams {
    safety_radius: f64,
    step_length: f64,
    rescue_ticks: u32,
    rescue_time_s: f64,
    evade_after_ticks: u32,
    tackle_ticks: u32,
    tackle_energy: f64,
    duration_ticks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub tick: u64,
    pub dt: f64,
    pub robots: Vec<RobotState>,
    /// `None` means an ample supply.
    pub victims_remaining: Option<u64>,
    pub rescued_total: u64,
    pub obstacles: Vec<Obstacle>,
    pub sites: Sites,
    pub rng: ChaCha8Rng,
    params: StepParams,
    tree: BtNode,
    bindings: SimBindings,
    trace: Option<Vec<TraceEvent>>,
}

fn ticks_for(seconds: f64, dt: f64) -> u32 {
    (seconds / dt).round() as u32
}

/// Places sites, spawns the team next to the shelter, scatters obstacles, and
/// charges every battery to 100 %. Spawn jitter and obstacle layout use two
/// independent streams of the seed, so teams of equal size share obstacle
/// layouts for a given seed.
pub fn build_world(scenario: &Scenario, seed: u64) -> Result<WorldState, SimError> {
    scenario.validate(&scenario.name)?;
    let dt = scenario.dt_s;
    let w = &scenario.world;
    let sites = Sites {
        shelter: w.shelter.into(),
        rescue_site: w.rescue_site.into(),
        charge_station: w.charge_station.into(),
    };
    let shelter_slots = scenario.slots(w.shelter);
    let site_slots = scenario.slots(w.rescue_site);
    let charger_slots = scenario.slots(w.charge_station);

    let shared_perception = scenario.cooperative && scenario.team.iter().any(|c| c.count > 0 && c.sense_range.is_infinite());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obstacle_rng = ChaCha8Rng::seed_from_u64(seed);
    obstacle_rng.set_stream(1);

    let o = &scenario.obstacles;
    let all_slots: Vec<Vec2> = shelter_slots
        .iter()
        .chain(&site_slots)
        .chain(&charger_slots)
        .map(|&p| Vec2::from(p))
        .collect();
    let mut obstacles = Vec::with_capacity(o.count as usize);
    let [lo, hi] = o.region;
    for index in 0..o.count {
        let mut placed = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let p = Vec2::new(
                lo[0] + obstacle_rng.random::<f64>() * (hi[0] - lo[0]),
                lo[1] + obstacle_rng.random::<f64>() * (hi[1] - lo[1]),
            );
            if all_slots.iter().all(|s| s.dist(p) >= o.radius + w.safety_radius) {
                placed = Some(p);
                break;
            }
        }
        let center = placed.ok_or(SimError::ObstaclePlacement {
            index,
            count: o.count,
            attempts: PLACEMENT_ATTEMPTS,
        })?;
        obstacles.push(Obstacle { center, radius: o.radius });
    }

    let mut robots = Vec::with_capacity(scenario.team_size() as usize);
    for spec in &scenario.team {
        let factor = match (scenario.cooperative, spec.class) {
            (true, RobotClass::Carrier) => scenario.cooperation.carrier_speed_factor,
            (true, RobotClass::Observer) => scenario.cooperation.observer_speed_factor,
            _ => 1.0,
        };
        for _ in 0..spec.count {
            let id = robots.len();
            let angle = rng.random::<f64>() * TAU;
            let r = w.start_radius * rng.random::<f64>().sqrt();
            let position = Vec2::from(shelter_slots[id]) + Vec2::new(r * angle.cos(), r * angle.sin());
            let inside = obstacles.iter().map(|ob| position.dist(ob.center) < ob.radius).collect();
            robots.push(RobotState {
                id,
                class: spec.class,
                position,
                velocity_cap: spec.velocity * factor,
                energy: FULL_ENERGY,
                load: 0,
                phase: Phase::ToSite,
                per_step_energy: spec.energy_per_step,
                capacity: spec.capacity,
                sense_range: if shared_perception { f64::INFINITY } else { spec.sense_range },
                charge_threshold: spec.charge_threshold,
                charge_ticks: ticks_for(spec.charge_duration_s, dt),
                targets: Targets {
                    site: site_slots[id].into(),
                    shelter: shelter_slots[id].into(),
                    charger: charger_slots[id].into(),
                },
                stall_ticks: 0,
                blocked_ticks: 0,
                inside,
                stats: RobotMetrics {
                    id,
                    class: Some(spec.class),
                    ..RobotMetrics::default()
                },
            });
        }
    }

    let victims_remaining = match scenario.victims {
        VictimsMode::Ample => None,
        VictimsMode::Bounded { count } => Some(count),
    };
    let tree = build_needs_tree(&NeedsTreeConfig::default()).expect("default needs tree is complete");

    Ok(WorldState {
        tick: 0,
        dt,
        robots,
        victims_remaining,
        rescued_total: 0,
        obstacles,
        sites,
        rng,
        params: StepParams {
            safety_radius: w.safety_radius,
            step_length: w.step_length,
            rescue_ticks: ticks_for(scenario.rescue_time_s, dt),
            rescue_time_s: scenario.rescue_time_s,
            evade_after_ticks: ticks_for(w.evade_after_s, dt),
            tackle_ticks: ticks_for(o.tackle_time_s, dt),
            tackle_energy: o.tackle_energy,
            duration_ticks: (scenario.duration_s / dt - 1e-9).ceil() as u64,
        },
        tree,
        bindings: SimBindings::default(),
        trace: None,
    })
}

impl RobotState {
    /// Shortens a move so that its energy cost does not exceed the battery.
    fn affordable(&self, to: Vec2, step_length: f64) -> Vec2 {
        if self.energy <= 0.0 {
            return self.position;
        }
        if self.per_step_energy <= 0.0 {
            return to;
        }
        let reach = self.energy * step_length / self.per_step_energy;
        self.position.step_toward(to, reach)
    }
}

impl WorldState {
    pub fn clock(&self) -> f64 {
        self.tick as f64 * self.dt
    }

    pub fn duration_ticks(&self) -> u64 {
        self.params.duration_ticks
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.params.duration_ticks
    }

    pub fn safety_radius(&self) -> f64 {
        self.params.safety_radius
    }

    /// Starts recording trace events.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> &[TraceEvent] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Units currently carried by robots.
    pub fn in_transit(&self) -> u64 {
        self.robots.iter().map(|r| r.load as u64).sum()
    }

    fn record(&mut self, robot: usize, kind: TraceKind) {
        let time = self.clock();
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent { time, robot, kind });
        }
    }

    /// Blackboard snapshot for robot `i`, before any leaf runs.
    pub fn blackboard(&self, i: usize) -> Blackboard {
        let r = &self.robots[i];
        Blackboard {
            id: r.id,
            position: r.position,
            energy: r.energy,
            load: r.load,
            capacity: r.capacity,
            phase: r.phase,
            speed: r.velocity_cap,
            dt: self.dt,
            clock: self.clock(),
            charge_threshold: r.charge_threshold,
            sense_range: r.sense_range,
            safety_radius: self.params.safety_radius,
            blocked_ticks: r.blocked_ticks,
            evade_after_ticks: self.params.evade_after_ticks,
            victims_available: self.victims_remaining.is_none_or(|v| v > 0),
            rescue_time_s: self.params.rescue_time_s,
            targets: r.targets,
            others: self
                .robots
                .iter()
                .filter(|o| o.id != r.id)
                .map(|o| (o.id, o.position))
                .collect(),
            ..Blackboard::nominal(r.id, r.position, r.targets)
        }
    }

    /// Phase one: every robot ticks its needs tree.
    pub fn gather_intents(&self) -> Vec<Intent> {
        (0..self.robots.len())
            .map(|i| {
                let mut board = self.blackboard(i);
                tick(&self.tree, &mut board, &self.bindings).expect("simulator registry binds every needs-tree leaf");
                board.intent
            })
            .collect()
    }

    /// Advances the world by one `dt`: gather intents, negotiate, apply.
    pub fn step(&mut self) {
        let intents = self.gather_intents();
        let moves: Vec<MoveIntent> = self
            .robots
            .iter()
            .zip(&intents)
            .map(|(r, intent)| {
                let proposed = match intent {
                    Intent::Move { to, .. } if r.stall_ticks == 0 => r.affordable(*to, self.params.step_length),
                    _ => r.position,
                };
                MoveIntent {
                    id: r.id,
                    energy: r.energy,
                    current: r.position,
                    proposed,
                }
            })
            .collect();
        let resolved = negotiate_conflicts(&moves, self.params.safety_radius);
        for (i, (intent, res)) in intents.into_iter().zip(resolved).enumerate() {
            self.apply(i, intent, res);
        }
        self.tick += 1;
    }

    fn apply(&mut self, i: usize, intent: Intent, res: Resolution) {
        let r = &mut self.robots[i];
        r.stall_ticks = r.stall_ticks.saturating_sub(1);
        match intent {
            Intent::Move { mode, .. } => {
                match mode {
                    MoveMode::ToSite => r.phase = Phase::ToSite,
                    MoveMode::ToShelter => r.phase = Phase::ToShelter,
                    MoveMode::ToCharge => r.phase = Phase::ToCharge,
                    MoveMode::Evade => {}
                }
                if res.held {
                    r.blocked_ticks += 1;
                    r.stats.held_steps += 1;
                    let (x, y) = (r.position.x, r.position.y);
                    self.record(i, TraceKind::Conflict { x, y });
                } else if res.position != r.position {
                    self.advance(i, res.position, mode == MoveMode::Evade);
                }
            }
            Intent::StartCharging => {
                r.phase = Phase::Charging {
                    remaining_ticks: r.charge_ticks,
                };
                r.stats.charges += 1;
                let energy = r.energy;
                self.record(i, TraceKind::ChargeStart { energy });
                self.charge_tick(i);
            }
            Intent::ContinueCharging => self.charge_tick(i),
            Intent::Rescue => {
                if !matches!(r.phase, Phase::Rescuing { .. }) {
                    r.phase = Phase::Rescuing {
                        remaining_ticks: self.params.rescue_ticks,
                    };
                }
                self.rescue_tick(i);
            }
            Intent::Unload => {
                r.phase = Phase::Unloading;
                let units = r.load;
                r.load = 0;
                r.stats.rescued_units += units as u64;
                if units > 0 {
                    r.stats.rounds += 1;
                }
                self.rescued_total += units as u64;
                let total = self.rescued_total;
                self.record(i, TraceKind::Unload { units, total });
            }
            Intent::Idle => r.phase = Phase::Idle,
            Intent::Stay => {}
        }
    }

    fn advance(&mut self, i: usize, to: Vec2, evading: bool) {
        let step_length = self.params.step_length;
        let r = &mut self.robots[i];
        let from = r.position;
        let d = from.dist(to);
        let cost = (r.per_step_energy * d / step_length).min(r.energy);
        r.energy = (r.energy - cost).clamp(0.0, FULL_ENERGY);
        r.stats.energy_spent += cost;
        r.stats.distance += d;
        r.position = to;
        r.blocked_ticks = 0;
        let (x, y, energy) = (to.x, to.y, r.energy);
        self.record(
            i,
            if evading {
                TraceKind::Evade { x, y, energy }
            } else {
                TraceKind::Move { x, y, energy }
            },
        );

        if self.robots[i].sense_range.is_infinite() {
            return;
        }
        for k in 0..self.obstacles.len() {
            let ob = self.obstacles[k];
            let r = &mut self.robots[i];
            let was_inside = r.inside[k];
            r.inside[k] = to.dist(ob.center) < ob.radius;
            if was_inside || Vec2::segment_distance(from, to, ob.center) >= ob.radius {
                continue;
            }
            let cost = self.params.tackle_energy.min(r.energy);
            r.energy = (r.energy - cost).clamp(0.0, FULL_ENERGY);
            r.stats.energy_spent += cost;
            r.stats.encounters += 1;
            r.stall_ticks += self.params.tackle_ticks;
            let energy = r.energy;
            self.record(i, TraceKind::Encounter { obstacle: k, energy });
        }
    }

    fn charge_tick(&mut self, i: usize) {
        let r = &mut self.robots[i];
        let Phase::Charging { remaining_ticks } = r.phase else {
            return;
        };
        if remaining_ticks <= 1 {
            r.energy = FULL_ENERGY;
            r.phase = Phase::Idle;
            self.record(i, TraceKind::ChargeDone);
        } else {
            r.phase = Phase::Charging {
                remaining_ticks: remaining_ticks - 1,
            };
        }
    }

    fn rescue_tick(&mut self, i: usize) {
        let r = &mut self.robots[i];
        let Phase::Rescuing { remaining_ticks } = r.phase else {
            return;
        };
        if remaining_ticks > 1 {
            r.phase = Phase::Rescuing {
                remaining_ticks: remaining_ticks - 1,
            };
            return;
        }
        let room = (r.capacity - r.load) as u64;
        let units = match self.victims_remaining.as_mut() {
            None => room,
            Some(left) => {
                let take = room.min(*left);
                *left -= take;
                take
            }
        } as u32;
        let r = &mut self.robots[i];
        r.load += units;
        r.phase = Phase::ToShelter;
        self.record(i, TraceKind::Load { units });
    }

    pub fn metrics(&self) -> TrialMetrics {
        let per_robot: Vec<RobotMetrics> = self.robots.iter().map(|r| r.stats.clone()).collect();
        let total_energy_spent: f64 = per_robot.iter().map(|m| m.energy_spent).sum();
        let rescued_units = self.rescued_total;
        TrialMetrics {
            rescued_units,
            total_energy_spent,
            energy_per_unit: (rescued_units > 0).then(|| total_energy_spent / rescued_units as f64),
            rounds_completed: per_robot.iter().map(|m| m.rounds).sum(),
            per_robot,
        }
    }
}

/// Builds a world and steps it until the clock reaches the scenario duration.
pub fn run_trial(scenario: &Scenario, seed: u64) -> Result<TrialMetrics, SimError> {
    let mut world = build_world(scenario, seed)?;
    while !world.is_finished() {
        world.step();
    }
    Ok(world.metrics())
}
