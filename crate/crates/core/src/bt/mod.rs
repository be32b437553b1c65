//! Minimal behavior-tree engine: selector and sequence composites over named
//! condition and action leaves. Leaves are resolved by name through a
//! [`Bindings`] implementation, so one tree can drive any blackboard type.
//!
//! Ticks are stateless: every cycle starts again at the root, and a
//! `Running` child does not get resumed directly.

mod needs;

pub use needs::{build_needs_tree, NeedsTreeConfig, StageBinding, LEARNING_PLACEHOLDER};

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeStatus {
    Success,
    Failure,
    Running,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BtNode {
    /// Returns the first non-`Failure` child status.
    Selector(Vec<BtNode>),
    /// Returns the first non-`Success` child status.
    Sequence(Vec<BtNode>),
    Condition(String),
    Action(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BtError {
    #[error("unknown condition `{0}`")]
    UnknownCondition(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("{0} node has no children")]
    EmptyComposite(&'static str),
    #[error("needs tree is missing the `{0}` binding")]
    MissingBinding(&'static str),
}

/// Resolves leaf names against a blackboard. Returning `None` means the name
/// is not bound, which fails the tick.
pub trait Bindings<B: ?Sized> {
    fn condition(&self, name: &str, board: &B) -> Option<bool>;
    fn action(&self, name: &str, board: &mut B) -> Option<NodeStatus>;
}

impl BtNode {
    pub fn selector(children: Vec<BtNode>) -> Self {
        BtNode::Selector(children)
    }

    pub fn sequence(children: Vec<BtNode>) -> Self {
        BtNode::Sequence(children)
    }

    pub fn condition(name: impl Into<String>) -> Self {
        BtNode::Condition(name.into())
    }

    pub fn action(name: impl Into<String>) -> Self {
        BtNode::Action(name.into())
    }

    pub fn children(&self) -> &[BtNode] {
        match self {
            BtNode::Selector(c) | BtNode::Sequence(c) => c,
            BtNode::Condition(_) | BtNode::Action(_) => &[],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, BtNode::Condition(_) | BtNode::Action(_))
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(BtNode::node_count).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children().iter().map(BtNode::leaf_count).sum()
        }
    }

    /// Every composite must have at least one child.
    pub fn validate(&self) -> Result<(), BtError> {
        match self {
            BtNode::Selector(c) if c.is_empty() => Err(BtError::EmptyComposite("selector")),
            BtNode::Sequence(c) if c.is_empty() => Err(BtError::EmptyComposite("sequence")),
            _ => self.children().iter().try_for_each(BtNode::validate),
        }
    }

    /// Indented one-node-per-line rendering.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_into(&mut out, 0);
        out
    }

    fn dump_into(&self, out: &mut String, depth: usize) {
        let _ = writeln!(out, "{:indent$}{self}", "", indent = depth * 2);
        for child in self.children() {
            child.dump_into(out, depth + 1);
        }
    }
}

impl fmt::Display for BtNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BtNode::Selector(_) => f.write_str("Selector"),
            BtNode::Sequence(_) => f.write_str("Sequence"),
            BtNode::Condition(name) => write!(f, "Condition({name})"),
            BtNode::Action(name) => write!(f, "Action({name})"),
        }
    }
}

pub fn tick<B: ?Sized, R: Bindings<B> + ?Sized>(node: &BtNode, board: &mut B, bindings: &R) -> Result<NodeStatus, BtError> {
    match node {
        BtNode::Selector(children) => {
            if children.is_empty() {
                return Err(BtError::EmptyComposite("selector"));
            }
            for child in children {
                match tick(child, board, bindings)? {
                    NodeStatus::Failure => continue,
                    other => return Ok(other),
                }
            }
            Ok(NodeStatus::Failure)
        }
        BtNode::Sequence(children) => {
            if children.is_empty() {
                return Err(BtError::EmptyComposite("sequence"));
            }
            for child in children {
                match tick(child, board, bindings)? {
                    NodeStatus::Success => continue,
                    other => return Ok(other),
                }
            }
            Ok(NodeStatus::Success)
        }
        BtNode::Condition(name) => match bindings.condition(name, board) {
            Some(true) => Ok(NodeStatus::Success),
            Some(false) => Ok(NodeStatus::Failure),
            None => Err(BtError::UnknownCondition(name.clone())),
        },
        BtNode::Action(name) => bindings.action(name, board).ok_or_else(|| BtError::UnknownAction(name.clone())),
    }
}
