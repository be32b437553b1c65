//! Blackboard and leaf registry connecting the needs tree to the simulator.

use serde::{Deserialize, Serialize};

use super::geom::Vec2;
use crate::bt::{Bindings, NeedsTreeConfig, NodeStatus, LEARNING_PLACEHOLDER};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    ToSite,
    Rescuing { remaining_ticks: u32 },
    ToShelter,
    Unloading,
    ToCharge,
    Charging { remaining_ticks: u32 },
    Idle,
}

impl Phase {
    pub fn is_charging(&self) -> bool {
        matches!(self, Phase::Charging { .. })
    }

    pub fn remaining_seconds(&self, dt: f64) -> Option<f64> {
        match *self {
            Phase::Rescuing { remaining_ticks } | Phase::Charging { remaining_ticks } => {
                Some(remaining_ticks as f64 * dt)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    /// Go to the rescue site and pick up victims.
    Fetch,
    /// Carry the current load to the shelter.
    Deliver,
    /// Keep handling victims at the site.
    ContinueRescue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveMode {
    ToSite,
    ToShelter,
    ToCharge,
    Evade,
}

/// What a robot asks the world to do this step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Intent {
    Stay,
    Move { to: Vec2, mode: MoveMode },
    StartCharging,
    ContinueCharging,
    Rescue,
    Unload,
    Idle,
}

impl Intent {
    pub fn is_move(&self) -> bool {
        matches!(self, Intent::Move { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub site: Vec2,
    pub shelter: Vec2,
    pub charger: Vec2,
}

/// Per-robot view used by one tree tick. The first block is a snapshot of
/// robot and world state; the rest is written by the leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct Blackboard {
    pub id: usize,
    pub position: Vec2,
    pub energy: f64,
    pub load: u32,
    pub capacity: u32,
    pub phase: Phase,
    /// Meters per second.
    pub speed: f64,
    pub dt: f64,
    pub clock: f64,
    pub charge_threshold: f64,
    pub sense_range: f64,
    pub safety_radius: f64,
    pub blocked_ticks: u32,
    pub evade_after_ticks: u32,
    pub victims_available: bool,
    pub rescue_time_s: f64,
    pub targets: Targets,
    /// Positions of every other robot.
    pub others: Vec<(usize, Vec2)>,

    pub perceived: Vec<(usize, Vec2)>,
    pub imminent_collision: bool,
    pub task: Option<Task>,
    /// Estimated rescued units per second for the current task.
    pub utility: f64,
    pub route: Option<Vec2>,
    /// Proposed next position, offered to negotiation.
    pub outbox: Option<Vec2>,
    pub intent: Intent,
    /// Every action leaf executed this tick, in order.
    pub executed: Vec<&'static str>,
}

impl Blackboard {
    /// A robot at `position` with full battery and nothing else going on.
    pub fn nominal(id: usize, position: Vec2, targets: Targets) -> Self {
        Blackboard {
            id,
            position,
            energy: 100.0,
            load: 0,
            capacity: 8,
            phase: Phase::ToSite,
            speed: 1.0,
            dt: 0.1,
            clock: 0.0,
            charge_threshold: 30.0,
            sense_range: 10.0,
            safety_radius: 1.0,
            blocked_ticks: 0,
            evade_after_ticks: 10,
            victims_available: true,
            rescue_time_s: 1.0,
            targets,
            others: Vec::new(),
            perceived: Vec::new(),
            imminent_collision: false,
            task: None,
            utility: 0.0,
            route: None,
            outbox: None,
            intent: Intent::Stay,
            executed: Vec::new(),
        }
    }

    fn step_length(&self) -> f64 {
        self.speed * self.dt
    }

    fn nearest_perceived(&self) -> Option<(usize, Vec2)> {
        self.perceived
            .iter()
            .copied()
            .min_by(|a, b| self.position.dist(a.1).total_cmp(&self.position.dist(b.1)).then(a.0.cmp(&b.0)))
    }

    /// Actions that write a world-facing intent.
    pub fn effector_count(&self) -> usize {
        self.executed.iter().filter(|n| EFFECTORS.contains(n)).count()
    }
}

const EFFECTORS: [&str; 4] = ["evade", "go_charge", "request_reassignment", "agree_and_execute"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Leaf {
    Perceive,
    NoImminentCollision,
    Evade,
    EnergySufficient,
    GoCharge,
    TaskWithinCapability,
    RequestReassignment,
    AssessUtility,
    PlanRoute,
    Negotiate,
    AgreeAndExecute,
    Learning,
}

/// Name → behavior registry for the simulator's leaves. Names follow
/// [`NeedsTreeConfig::default`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimBindings {
    names: Vec<(String, Leaf)>,
}

impl Default for SimBindings {
    fn default() -> Self {
        SimBindings::for_config(&NeedsTreeConfig::default())
    }
}

impl SimBindings {
    /// Binds the simulator's behaviors to the leaf names of `config`.
    pub fn for_config(config: &NeedsTreeConfig) -> Self {
        let names = vec![
            (config.perception.clone(), Leaf::Perceive),
            (config.safety.condition.clone(), Leaf::NoImminentCollision),
            (config.safety.action.clone(), Leaf::Evade),
            (config.basic.condition.clone(), Leaf::EnergySufficient),
            (config.basic.action.clone(), Leaf::GoCharge),
            (config.capability.condition.clone(), Leaf::TaskWithinCapability),
            (config.capability.action.clone(), Leaf::RequestReassignment),
            (config.utility.clone(), Leaf::AssessUtility),
            (config.plan.clone(), Leaf::PlanRoute),
            (config.negotiate.clone(), Leaf::Negotiate),
            (config.execute.clone(), Leaf::AgreeAndExecute),
            (LEARNING_PLACEHOLDER.to_string(), Leaf::Learning),
        ];
        SimBindings { names }
    }

    fn lookup(&self, name: &str) -> Option<Leaf> {
        self.names.iter().find(|(n, _)| n == name).map(|(_, l)| *l)
    }
}

fn record(board: &mut Blackboard, leaf: Leaf) {
    let name = match leaf {
        Leaf::Perceive => "perceive",
        Leaf::Evade => "evade",
        Leaf::GoCharge => "go_charge",
        Leaf::RequestReassignment => "request_reassignment",
        Leaf::AssessUtility => "assess_utility",
        Leaf::PlanRoute => "plan_route",
        Leaf::Negotiate => "negotiate",
        Leaf::AgreeAndExecute => "agree_and_execute",
        _ => return,
    };
    board.executed.push(name);
}

impl Bindings<Blackboard> for SimBindings {
    fn condition(&self, name: &str, b: &Blackboard) -> Option<bool> {
        Some(match self.lookup(name)? {
            Leaf::NoImminentCollision => !b.imminent_collision,
            Leaf::EnergySufficient => b.energy >= b.charge_threshold && !b.phase.is_charging(),
            Leaf::TaskWithinCapability => b.capacity >= 1,
            Leaf::Learning => true,
            _ => return None,
        })
    }

    fn action(&self, name: &str, b: &mut Blackboard) -> Option<NodeStatus> {
        let leaf = self.lookup(name)?;
        let status = match leaf {
            Leaf::Perceive => perceive(b),
            Leaf::Evade => evade(b),
            Leaf::GoCharge => go_charge(b),
            Leaf::RequestReassignment => {
                b.intent = Intent::Idle;
                NodeStatus::Running
            }
            Leaf::AssessUtility => assess_utility(b),
            Leaf::PlanRoute => plan_route(b),
            Leaf::Negotiate => negotiate(b),
            Leaf::AgreeAndExecute => agree_and_execute(b),
            _ => return None,
        };
        record(b, leaf);
        Some(status)
    }
}

fn perceive(b: &mut Blackboard) -> NodeStatus {
    let (pos, range) = (b.position, b.sense_range);
    b.perceived = b.others.iter().copied().filter(|(_, p)| pos.dist(*p) <= range).collect();
    let near = b
        .nearest_perceived()
        .is_some_and(|(_, p)| pos.dist(p) < 2.0 * b.safety_radius);
    b.imminent_collision = near && b.blocked_ticks >= b.evade_after_ticks;
    NodeStatus::Success
}

/// Sidestep at 45° away from the nearest neighbour.
fn evade(b: &mut Blackboard) -> NodeStatus {
    let Some((_, other)) = b.nearest_perceived() else {
        b.intent = Intent::Stay;
        return NodeStatus::Failure;
    };
    let away = (b.position - other).normalized();
    let dir = (away + away.perp()).normalized();
    b.intent = Intent::Move {
        to: b.position + dir * b.step_length(),
        mode: MoveMode::Evade,
    };
    NodeStatus::Running
}

fn go_charge(b: &mut Blackboard) -> NodeStatus {
    b.intent = if b.phase.is_charging() {
        Intent::ContinueCharging
    } else if b.position == b.targets.charger {
        Intent::StartCharging
    } else {
        Intent::Move {
            to: b.position.step_toward(b.targets.charger, b.step_length()),
            mode: MoveMode::ToCharge,
        }
    };
    NodeStatus::Running
}

fn assess_utility(b: &mut Blackboard) -> NodeStatus {
    b.task = if matches!(b.phase, Phase::Rescuing { .. }) {
        Some(Task::ContinueRescue)
    } else if b.load > 0 {
        Some(Task::Deliver)
    } else if b.victims_available {
        Some(Task::Fetch)
    } else {
        None
    };
    if b.task.is_none() {
        b.utility = 0.0;
        b.intent = Intent::Idle;
        return NodeStatus::Failure;
    }
    let round_time = 2.0 * b.targets.site.dist(b.targets.shelter) / b.speed + b.rescue_time_s;
    b.utility = if round_time > 0.0 { b.capacity as f64 / round_time } else { f64::INFINITY };
    NodeStatus::Success
}

fn plan_route(b: &mut Blackboard) -> NodeStatus {
    b.route = match b.task {
        Some(Task::Fetch | Task::ContinueRescue) => Some(b.targets.site),
        Some(Task::Deliver) => Some(b.targets.shelter),
        None => return NodeStatus::Failure,
    };
    NodeStatus::Success
}

fn negotiate(b: &mut Blackboard) -> NodeStatus {
    let Some(route) = b.route else {
        return NodeStatus::Failure;
    };
    b.outbox = Some(b.position.step_toward(route, b.step_length()));
    NodeStatus::Success
}

fn agree_and_execute(b: &mut Blackboard) -> NodeStatus {
    let (Some(task), Some(route), Some(next)) = (b.task, b.route, b.outbox) else {
        return NodeStatus::Failure;
    };
    let arrived = b.position == route;
    let (intent, status) = match task {
        Task::ContinueRescue => (Intent::Rescue, NodeStatus::Running),
        Task::Fetch if arrived => (Intent::Rescue, NodeStatus::Running),
        Task::Deliver if arrived => (Intent::Unload, NodeStatus::Success),
        Task::Fetch => (Intent::Move { to: next, mode: MoveMode::ToSite }, NodeStatus::Running),
        Task::Deliver => (Intent::Move { to: next, mode: MoveMode::ToShelter }, NodeStatus::Running),
    };
    b.intent = intent;
    status
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::{build_needs_tree, tick};

    fn targets() -> Targets {
        Targets {
            site: Vec2::new(30.0, 0.0),
            shelter: Vec2::new(0.0, 0.0),
            charger: Vec2::new(-10.0, 0.0),
        }
    }

    fn run(board: &mut Blackboard) -> NodeStatus {
        let tree = build_needs_tree(&NeedsTreeConfig::default()).unwrap();
        tick(&tree, board, &SimBindings::default()).unwrap()
    }

    #[test]
    fn nominal_board_runs_all_teaming_actions_and_moves() {
        let mut b = Blackboard::nominal(0, Vec2::new(0.0, 0.0), targets());
        b.others = vec![(1, Vec2::new(0.0, 2.5))];
        assert_eq!(run(&mut b), NodeStatus::Running);
        assert_eq!(
            b.executed,
            vec!["perceive", "assess_utility", "plan_route", "negotiate", "agree_and_execute"]
        );
        assert_eq!(
            b.intent,
            Intent::Move {
                to: Vec2::new(0.1, 0.0),
                mode: MoveMode::ToSite
            }
        );
    }

    #[test]
    fn low_energy_goes_charging() {
        let mut b = Blackboard::nominal(0, Vec2::new(5.0, 0.0), targets());
        b.energy = 25.0;
        run(&mut b);
        assert_eq!(b.executed, vec!["perceive", "go_charge"]);
        assert!(matches!(b.intent, Intent::Move { mode: MoveMode::ToCharge, .. }));
    }

    #[test]
    fn charging_robot_never_moves() {
        let mut b = Blackboard::nominal(0, targets().charger, targets());
        b.energy = 20.0;
        b.phase = Phase::Charging { remaining_ticks: 50 };
        run(&mut b);
        assert_eq!(b.intent, Intent::ContinueCharging);
        b.phase = Phase::ToCharge;
        run(&mut b);
        assert_eq!(b.intent, Intent::StartCharging);
    }

    #[test]
    fn imminent_collision_preempts_everything() {
        let mut b = Blackboard::nominal(0, Vec2::new(0.0, 0.0), targets());
        b.energy = 10.0;
        b.others = vec![(1, Vec2::new(1.5, 0.0))];
        b.blocked_ticks = 10;
        run(&mut b);
        assert_eq!(b.executed, vec!["perceive", "evade"]);
        assert!(matches!(b.intent, Intent::Move { mode: MoveMode::Evade, .. }));
    }

    #[test]
    fn arrival_triggers_rescue_then_unload() {
        let mut b = Blackboard::nominal(0, targets().site, targets());
        run(&mut b);
        assert_eq!(b.intent, Intent::Rescue);
        let mut b = Blackboard::nominal(0, targets().shelter, targets());
        b.load = 8;
        assert_eq!(run(&mut b), NodeStatus::Success);
        assert_eq!(b.intent, Intent::Unload);
    }

    #[test]
    fn nothing_to_do_idles() {
        let mut b = Blackboard::nominal(0, targets().shelter, targets());
        b.victims_available = false;
        assert_eq!(run(&mut b), NodeStatus::Failure);
        assert_eq!(b.intent, Intent::Idle);
    }

    #[test]
    fn zero_capacity_requests_reassignment() {
        let mut b = Blackboard::nominal(0, targets().shelter, targets());
        b.capacity = 0;
        run(&mut b);
        assert_eq!(b.executed, vec!["perceive", "request_reassignment"]);
        assert_eq!(b.intent, Intent::Idle);
    }
}
