use std::path::PathBuf;

use thiserror::Error;

/// Scenario loading and validation failures.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing field `{0}`")]
    Missing(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("duplicate id {id:?} in `{collection}`")]
    DuplicateId { collection: &'static str, id: String },
    #[error("incomplete backhaul matrix: no rate from ground station {station:?} to data center {data_center:?}")]
    IncompleteBackhaul { station: String, data_center: String },
    #[error("unknown data center {data_center:?} in backhaul of ground station {station:?}")]
    UnknownBackhaulTarget { station: String, data_center: String },
    #[error("unknown policy {name:?}; valid policies: {}", valid.join(", "))]
    UnknownPolicy { name: String, valid: Vec<&'static str> },
}

impl ScenarioError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Contact-plan ingestion failures.
#[derive(Debug, Error)]
pub enum ContactPlanError {
    #[error("failed to read contact plan {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("contact plan line {line}: {reason}")]
    Parse { line: u64, reason: String },
    #[error("contact plan line {line}: unknown {kind} id {id:?}")]
    UnknownId { line: u64, kind: &'static str, id: String },
}

/// Errors surfaced by a simulation run.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    ContactPlan(#[from] ContactPlanError),
    #[error("infeasible assignment at slot {slot} from policy {policy}: {violation}")]
    Infeasible {
        slot: usize,
        policy: String,
        violation: crate::feasibility::Violation,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
