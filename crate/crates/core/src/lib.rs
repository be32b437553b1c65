//! Heterogeneous multi-robot rescue toolkit: closed-form expected utility and
//! energy for team compositions, an exhaustive composition optimizer, a
//! needs-hierarchy behavior tree, a deterministic rescue simulator, and an
//! experiment harness around them.

pub mod analytic;
pub mod bt;
pub mod error;
pub mod harness;
pub mod model;
pub mod optimizer;
pub mod serde_inf;
pub mod sim;

pub use error::{HarnessError, ModelError, ScenarioError, SimError};
