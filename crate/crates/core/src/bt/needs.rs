use serde::{Deserialize, Serialize};

use super::{BtError, BtNode};

/// Inert leaf standing in for the self-upgrade (learning) level of the needs
/// hierarchy. Bindings should resolve it to an always-true condition.
pub const LEARNING_PLACEHOLDER: &str = "learning_placeholder";

/// A need level guarded by a condition, with the action that restores it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageBinding {
    pub condition: String,
    pub action: String,
}

impl StageBinding {
    pub fn new(condition: impl Into<String>, action: impl Into<String>) -> Self {
        StageBinding {
            condition: condition.into(),
            action: action.into(),
        }
    }
}

/// Leaf names for the eight stages of the needs tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeedsTreeConfig {
    pub perception: String,
    pub safety: StageBinding,
    pub basic: StageBinding,
    pub capability: StageBinding,
    pub utility: String,
    pub plan: String,
    pub negotiate: String,
    pub execute: String,
}

impl Default for NeedsTreeConfig {
    fn default() -> Self {
        NeedsTreeConfig {
            perception: "perceive".into(),
            safety: StageBinding::new("no_imminent_collision", "evade"),
            basic: StageBinding::new("energy_sufficient", "go_charge"),
            capability: StageBinding::new("task_within_capability", "request_reassignment"),
            utility: "assess_utility".into(),
            plan: "plan_route".into(),
            negotiate: "negotiate".into(),
            execute: "agree_and_execute".into(),
        }
    }
}

impl NeedsTreeConfig {
    fn check(&self) -> Result<(), BtError> {
        let named = [
            ("perception", self.perception.as_str()),
            ("safety.condition", self.safety.condition.as_str()),
            ("safety.action", self.safety.action.as_str()),
            ("basic.condition", self.basic.condition.as_str()),
            ("basic.action", self.basic.action.as_str()),
            ("capability.condition", self.capability.condition.as_str()),
            ("capability.action", self.capability.action.as_str()),
            ("utility", self.utility.as_str()),
            ("plan", self.plan.as_str()),
            ("negotiate", self.negotiate.as_str()),
            ("execute", self.execute.as_str()),
        ];
        match named.iter().find(|(_, name)| name.trim().is_empty()) {
            Some((stage, _)) => Err(BtError::MissingBinding(stage)),
            None => Ok(()),
        }
    }
}

/// Builds the needs hierarchy:
///
/// ```text
/// Sequence
///   Action(perception)
///   Selector [ Condition(safe)    Action(evade) ]
///   Selector [ Condition(energy)  Action(charge) ]
///   Selector [ Condition(capable) Action(reassign) ]
///   Sequence [ utility  plan  negotiate  execute ]
///   Condition(learning placeholder)
/// ```
///
/// Lower needs come first, so a failing lower-level condition hands control
/// to its restoring action before any higher level is ticked.
pub fn build_needs_tree(config: &NeedsTreeConfig) -> Result<BtNode, BtError> {
    config.check()?;
    let stage = |b: &StageBinding| BtNode::selector(vec![BtNode::condition(&b.condition), BtNode::action(&b.action)]);
    let tree = BtNode::sequence(vec![
        BtNode::action(&config.perception),
        stage(&config.safety),
        stage(&config.basic),
        stage(&config.capability),
        BtNode::sequence(vec![
            BtNode::action(&config.utility),
            BtNode::action(&config.plan),
            BtNode::action(&config.negotiate),
            BtNode::action(&config.execute),
        ]),
        BtNode::condition(LEARNING_PLACEHOLDER),
    ]);
    tree.validate()?;
    Ok(tree)
}
