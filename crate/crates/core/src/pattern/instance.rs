use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Alphabet, PatternAst};
use super::dfa::{compile, Dfa};
use super::enumerate::shortlex;
use super::parse::parse_pattern;
use super::PatternError;

/// Tag prepended to a payload: a person or a building.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassMarker {
    #[serde(rename = "P")]
    Person,
    #[serde(rename = "B")]
    Building,
}

impl ClassMarker {
    pub const ALL: [ClassMarker; 2] = [ClassMarker::Person, ClassMarker::Building];

    pub fn as_char(self) -> char {
        match self {
            ClassMarker::Person => 'P',
            ClassMarker::Building => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'P' => Some(ClassMarker::Person),
            'B' => Some(ClassMarker::Building),
            _ => None,
        }
    }
}

impl fmt::Display for ClassMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Splits an infection code into its class marker and payload.
pub fn split_code(code: &str) -> Option<(ClassMarker, &str)> {
    let mut chars = code.chars();
    let marker = ClassMarker::from_char(chars.next()?)?;
    Some((marker, chars.as_str()))
}

/// The pattern registered for one confirmed case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternRecord", into = "PatternRecord")]
pub struct InfectionPattern {
    pub pattern_id: String,
    pub case_id: String,
    pub body: PatternAst,
    pub source_text: String,
    /// Simulated seconds since the scenario epoch.
    pub created_at: u64,
}

impl InfectionPattern {
    pub fn new(pattern_id: impl Into<String>, case_id: impl Into<String>, body: PatternAst, created_at: u64) -> Self {
        let source_text = body.source_text();
        Self { pattern_id: pattern_id.into(), case_id: case_id.into(), body, source_text, created_at }
    }

    pub fn class_markers(&self) -> [ClassMarker; 2] {
        ClassMarker::ALL
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.body.alphabet()
    }

    pub fn compile(&self) -> Dfa {
        compile(&self.body)
    }
}

// Persisted form: the body is carried only as its source text.
#[derive(Serialize, Deserialize)]
struct PatternRecord {
    pattern_id: String,
    case_id: String,
    alphabet: Alphabet,
    source_text: String,
    created_at: u64,
}

impl TryFrom<PatternRecord> for InfectionPattern {
    type Error = PatternError;

    fn try_from(r: PatternRecord) -> Result<Self, PatternError> {
        let body = parse_pattern(&r.source_text, &r.alphabet)?;
        Ok(Self {
            pattern_id: r.pattern_id,
            case_id: r.case_id,
            body,
            source_text: r.source_text,
            created_at: r.created_at,
        })
    }
}

impl From<InfectionPattern> for PatternRecord {
    fn from(p: InfectionPattern) -> Self {
        Self {
            pattern_id: p.pattern_id,
            case_id: p.case_id,
            alphabet: p.body.alphabet().clone(),
            source_text: p.source_text,
            created_at: p.created_at,
        }
    }
}

/// One infection code assigned to one person or place.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfectionInstance {
    pub code: String,
    pub class_marker: ClassMarker,
    pub pattern_id: String,
    pub subject_id: String,
    /// Shortlex index of the payload within the pattern's language.
    pub rank: u64,
    /// First observed exposure to the case, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposed_at: Option<u64>,
}

impl InfectionInstance {
    pub fn payload(&self) -> &str {
        &self.code[1..]
    }
}

/// A subject waiting for a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceRequest {
    pub class_marker: ClassMarker,
    pub subject_id: String,
    pub exposed_at: Option<u64>,
}

impl InstanceRequest {
    pub fn new(class_marker: ClassMarker, subject_id: impl Into<String>) -> Self {
        Self { class_marker, subject_id: subject_id.into(), exposed_at: None }
    }
}

/// Assigns codes to `requests`: the k-th person request receives the k-th
/// string of the language in shortlex order, and likewise for buildings.
pub fn derive_instances(
    pattern: &InfectionPattern,
    requests: &[InstanceRequest],
) -> Result<Vec<InfectionInstance>, PatternError> {
    derive_instances_with(pattern, &pattern.compile(), requests, |_| false)
}

/// As [`derive_instances`], skipping any code for which `is_taken` holds so
/// that codes stay globally unique across patterns. Ranks still index the
/// full language.
pub fn derive_instances_with(
    pattern: &InfectionPattern,
    dfa: &Dfa,
    requests: &[InstanceRequest],
    is_taken: impl Fn(&str) -> bool,
) -> Result<Vec<InfectionInstance>, PatternError> {
    let mut slots: Vec<Option<InfectionInstance>> = vec![None; requests.len()];
    for marker in ClassMarker::ALL {
        let wanted: Vec<usize> = (0..requests.len()).filter(|&i| requests[i].class_marker == marker).collect();
        if wanted.is_empty() {
            continue;
        }
        let mut free = shortlex(dfa).enumerate().filter_map(|(rank, payload)| {
            let code = format!("{}{payload}", marker.as_char());
            (!is_taken(&code)).then_some((rank as u64, code))
        });
        for (assigned, &i) in wanted.iter().enumerate() {
            let (rank, code) = free.next().ok_or(PatternError::LanguageExhausted {
                requested: wanted.len(),
                available: assigned,
            })?;
            slots[i] = Some(InfectionInstance {
                code,
                class_marker: marker,
                pattern_id: pattern.pattern_id.clone(),
                subject_id: requests[i].subject_id.clone(),
                rank,
                exposed_at: requests[i].exposed_at,
            });
        }
    }
    Ok(slots.into_iter().map(|s| s.expect("every request assigned")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(text: &str, alphabet: &str) -> InfectionPattern {
        let body = parse_pattern(text, &Alphabet::new(alphabet.chars()).unwrap()).unwrap();
        InfectionPattern::new("IP000001", "case-1", body, 0)
    }

    fn codes(v: &[InfectionInstance]) -> Vec<&str> {
        v.iter().map(|i| i.code.as_str()).collect()
    }

    #[test]
    fn three_persons() {
        let p = pattern("ab+c", "abc");
        let reqs: Vec<_> = ["x", "y", "z"].iter().map(|s| InstanceRequest::new(ClassMarker::Person, *s)).collect();
        let got = derive_instances(&p, &reqs).unwrap();
        assert_eq!(codes(&got), ["Pabc", "Pabbc", "Pabbbc"]);
        assert_eq!(got.iter().map(|i| i.rank).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(got[1].payload(), "abbc");
    }

    #[test]
    fn one_building() {
        let p = pattern("ab+c", "abc");
        let got = derive_instances(&p, &[InstanceRequest::new(ClassMarker::Building, "mall")]).unwrap();
        assert_eq!(codes(&got), ["Babc"]);
    }

    #[test]
    fn mixed_requests_keep_request_order() {
        let p = pattern("ab+c", "abc");
        let reqs = vec![
            InstanceRequest::new(ClassMarker::Building, "mall"),
            InstanceRequest::new(ClassMarker::Person, "x"),
            InstanceRequest::new(ClassMarker::Person, "y"),
        ];
        let got = derive_instances(&p, &reqs).unwrap();
        assert_eq!(codes(&got), ["Babc", "Pabc", "Pabbc"]);
        assert_eq!(got[0].subject_id, "mall");
    }

    #[test]
    fn finite_language_runs_out() {
        let p = pattern("a", "abc");
        let reqs = vec![InstanceRequest::new(ClassMarker::Person, "x"), InstanceRequest::new(ClassMarker::Person, "y")];
        assert!(matches!(
            derive_instances(&p, &reqs),
            Err(PatternError::LanguageExhausted { requested: 2, available: 1 })
        ));
    }

    #[test]
    fn taken_codes_are_skipped_but_ranks_are_kept() {
        let p = pattern("ab+c", "abc");
        let reqs = vec![InstanceRequest::new(ClassMarker::Person, "x"), InstanceRequest::new(ClassMarker::Person, "y")];
        let got = derive_instances_with(&p, &p.compile(), &reqs, |c| c == "Pabc").unwrap();
        assert_eq!(codes(&got), ["Pabbc", "Pabbbc"]);
        assert_eq!(got[0].rank, 1);
    }

    #[test]
    fn persisted_form_reparses_body() {
        let p = pattern("(0|1)*1", "01");
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"alphabet\":\"01\""));
        let back: InfectionPattern = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn split_codes() {
        assert_eq!(split_code("Pabc"), Some((ClassMarker::Person, "abc")));
        assert_eq!(split_code("B"), Some((ClassMarker::Building, "")));
        assert_eq!(split_code("Xabc"), None);
        assert_eq!(split_code(""), None);
    }
}
