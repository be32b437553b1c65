use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the domain model and the closed-form engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("team composition is empty (x + y + z = 0)")]
    EmptyComposition,
    #[error("invalid value for `{field}`: {reason}")]
    InvalidValue { field: &'static str, reason: String },
    #[error("requirement vector has {got} components; at most {max} are supported (capacity, resources)")]
    UnsupportedRequirement { got: usize, max: usize },
    #[error("reports were computed against different missions")]
    MissionMismatch,
    #[error("budget {budget} is outside the enumerable range 1..={max}")]
    BudgetOutOfRange { budget: u32, max: u32 },
    #[error("no feasible composition within budget {budget}")]
    NoFeasibleComposition { budget: u32 },
}

impl ModelError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidValue {
            field,
            reason: reason.into(),
        }
    }
}

/// Errors raised while loading or validating a scenario file.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: field `{field}` out of range: {reason}")]
    Range {
        origin: String,
        field: String,
        reason: String,
    },
}

/// Errors raised while building a simulated world.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("could not place obstacle {index} of {count} clear of the sites after {attempts} attempts; enlarge the obstacle region")]
    ObstaclePlacement { index: u32, count: u32, attempts: u32 },
}

/// Errors raised by experiment orchestration and report emission.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("scenario `{scenario}` failed: {reason}")]
    ScenarioFailed { scenario: String, reason: String },
    #[error("duplicate scenario name `{0}` in experiment")]
    DuplicateScenario(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
