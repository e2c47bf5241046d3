//! End-to-end wiring of the four subsystems.

mod pipeline;
mod run;
mod scenario;

use thiserror::Error;

pub use pipeline::{DispatchCounts, Orchestrator, PipelineRecord, TraceEvent, TrackingSummary};
pub use run::{run_scenario, simulate, RiskRow, RunSummary, CHAIN_FILE, RISK_TABLE_FILE, SUMMARY_FILE};
pub use scenario::{Population, Scenario, ScenarioConfig, ScheduledCase};

use crate::ledger::LedgerError;
use crate::pattern::PatternError;
use crate::surveillance::SurveillanceError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scenario field {field}: {detail}")]
pub struct ScenarioError {
    pub field: String,
    pub detail: String,
}

impl ScenarioError {
    pub fn new(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { field: field.into(), detail: detail.into() }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("case {0:?} is already registered")]
    DuplicateCase(String),
    #[error("unknown person {0:?}")]
    UnknownPerson(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Surveillance(SurveillanceError),
    #[error(transparent)]
    Ledger(LedgerError),
}

impl PipelineError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::DuplicateCase(_) => "DuplicateCase",
            PipelineError::UnknownPerson(_) => "UnknownPerson",
            PipelineError::Pattern(PatternError::LanguageExhausted { .. }) => "LanguageExhausted",
            PipelineError::Pattern(PatternError::GenerationExhausted { .. }) => "GenerationExhausted",
            PipelineError::Pattern(_) => "PatternError",
            PipelineError::Surveillance(_) => "SurveillanceError",
            PipelineError::Ledger(_) => "LedgerError",
        }
    }
}

impl From<SurveillanceError> for PipelineError {
    fn from(e: SurveillanceError) -> Self {
        match e {
            SurveillanceError::UnknownPerson(p) => PipelineError::UnknownPerson(p),
            other => PipelineError::Surveillance(other),
        }
    }
}

impl From<LedgerError> for PipelineError {
    fn from(e: LedgerError) -> Self {
        match e {
            LedgerError::DuplicateCase(c) => PipelineError::DuplicateCase(c),
            LedgerError::Pattern(p) => PipelineError::Pattern(p),
            other => PipelineError::Ledger(other),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
