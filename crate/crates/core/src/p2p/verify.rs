use serde::Serialize;

use crate::pattern::{split_code, ClassMarker, VerifierRegistry};

/// What a citizen learns by entering a code.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InfectionDetail {
    pub code: String,
    pub valid: bool,
    /// In a registered language but never handed to anyone.
    pub undispatched: bool,
    pub pattern_id: Option<String>,
    /// The confirmed case the code descends from.
    pub case_id: Option<String>,
    pub subject_id: Option<String>,
    pub contagion_place: Option<String>,
    pub contagion_time: Option<u64>,
}

impl InfectionDetail {
    fn invalid(code: &str) -> Self {
        Self { code: code.to_string(), ..Default::default() }
    }
}

/// Checks a code against the registered automata.
///
/// Dispatched codes resolve through the code index; any other code is
/// valid when some registered language contains its payload (lowest pattern
/// id wins). Garbage yields `valid = false`, never an error.
pub fn verify_code(code: &str, verifier: &VerifierRegistry) -> InfectionDetail {
    let Some((marker, payload)) = split_code(code) else {
        return InfectionDetail::invalid(code);
    };

    if let Some(inst) = verifier.instance(code) {
        if let Some(entry) = verifier.entry(&inst.pattern_id).filter(|e| e.dfa.accepts(payload)) {
            let contagion_place = match marker {
                ClassMarker::Building => Some(inst.subject_id.clone()),
                ClassMarker::Person => verifier
                    .instances()
                    .filter(|i| i.pattern_id == inst.pattern_id && i.class_marker == ClassMarker::Building)
                    .min_by_key(|i| (i.exposed_at, i.rank))
                    .map(|i| i.subject_id.clone()),
            };
            return InfectionDetail {
                code: code.to_string(),
                valid: true,
                undispatched: false,
                pattern_id: Some(inst.pattern_id.clone()),
                case_id: Some(entry.pattern.case_id.clone()),
                subject_id: Some(inst.subject_id.clone()),
                contagion_place,
                contagion_time: inst.exposed_at,
            };
        }
    }

    match verifier.matching(payload).next() {
        Some(entry) => InfectionDetail {
            code: code.to_string(),
            valid: true,
            undispatched: true,
            pattern_id: Some(entry.pattern.pattern_id.clone()),
            case_id: Some(entry.pattern.case_id.clone()),
            ..Default::default()
        },
        None => InfectionDetail::invalid(code),
    }
}
