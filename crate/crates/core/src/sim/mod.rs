//! Discrete-time 2D rescue world. Robots shuttle victims from the rescue site
//! to the shelter, driven by their needs trees; each step gathers every
//! robot's intent first and applies the negotiated result afterwards.

pub mod agent;
pub mod geom;
pub mod negotiate;
pub mod poisson;
mod world;

pub use agent::{Blackboard, Intent, MoveMode, Phase, SimBindings, Targets, Task};
pub use geom::Vec2;
pub use negotiate::{negotiate_conflicts, priority_order, MoveIntent, Resolution};
pub use poisson::sample_encounters;
pub use world::{
    build_world, run_trial, Obstacle, RobotMetrics, RobotState, Sites, TraceEvent, TraceKind, TrialMetrics, WorldState,
    FULL_ENERGY,
};
