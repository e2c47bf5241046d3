//! Infection Pattern Generator: turns a confirmed case into a registered
//! pattern and a tracking request, and turns tracking feedback into
//! instance requests.

use std::sync::Arc;

use super::chain::Chain;
use super::LedgerError;
use crate::pattern::{
    random_pattern_avoiding, ClassMarker, Dfa, GeneratorConfig, InfectionPattern, InstanceRequest, VerifierRegistry,
};
use crate::surveillance::{FeedbackMessage, TrackingRequest};

#[derive(Clone, Debug)]
pub struct CaseRegistration {
    pub pattern: InfectionPattern,
    pub dfa: Arc<Dfa>,
    pub tracking_request: TrackingRequest,
}

/// Pattern ids are assigned in registration order.
pub fn pattern_id_for(ordinal: usize) -> String {
    format!("IP{ordinal:06}")
}

/// Generates a pattern for `case_id`, registers its automaton with
/// `verifier` and emits the tracking request for the case.
pub fn ipg_register_case(
    case_id: &str,
    created_at: u64,
    seed: u64,
    cfg: &GeneratorConfig,
    verifier: &mut VerifierRegistry,
) -> Result<CaseRegistration, LedgerError> {
    if verifier.has_case(case_id) {
        return Err(LedgerError::DuplicateCase(case_id.to_string()));
    }
    let body = random_pattern_avoiding(seed, cfg, |t| verifier.has_source_text(t))?;
    let pattern = InfectionPattern::new(pattern_id_for(verifier.len() + 1), case_id, body, created_at);
    let dfa = verifier
        .register(pattern.clone())
        .ok_or_else(|| LedgerError::DuplicateCase(case_id.to_string()))?;
    Ok(CaseRegistration {
        pattern,
        dfa,
        tracking_request: TrackingRequest { case_id: case_id.to_string(), requested_at: created_at },
    })
}

/// Contacts become person requests and places building requests, in report
/// order.
pub fn instance_requests(feedback: &FeedbackMessage) -> Vec<InstanceRequest> {
    let report = &feedback.report;
    let persons = report.contacts.iter().map(|s| (ClassMarker::Person, s));
    let places = report.places.iter().map(|s| (ClassMarker::Building, s));
    persons
        .chain(places)
        .map(|(class_marker, s)| InstanceRequest {
            class_marker,
            subject_id: s.id.clone(),
            exposed_at: Some(s.first_at),
        })
        .collect()
}

/// Rebuilds the verifier from a stored chain.
pub fn verifier_from_chain(chain: &Chain) -> VerifierRegistry {
    let mut verifier = VerifierRegistry::new();
    for block in chain.blocks() {
        for p in &block.patterns {
            verifier.register(p.clone());
        }
        verifier.record_instances(&block.instances);
    }
    verifier
}
