//! Simulated mass-surveillance oracle.
//!
//! Contact-event logs stand in for the camera network. The module answers
//! tracking requests for confirmed cases and hands the results back to the
//! ledger under a request/response protocol in which every request is
//! answered exactly once.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_MIN_CONTACT_S: u64 = 300;
pub const DEFAULT_WINDOW_S: u64 = 14 * 86_400;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurveillanceError {
    #[error("line {line}: {detail}")]
    Schema { line: usize, detail: String },
    #[error("unknown person {0:?}")]
    UnknownPerson(String),
    #[error("unknown tracking request {0}")]
    UnknownRequest(u64),
    #[error("tracking window must be positive")]
    EmptyWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactKind {
    #[serde(rename = "pp")]
    PersonPerson,
    #[serde(rename = "pl")]
    PersonPlace,
}

/// One observation: `a` met person `b` (`pp`) or visited place `b` (`pl`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactEvent {
    /// Seconds since the scenario epoch.
    pub at: u64,
    pub kind: ContactKind,
    pub a: String,
    pub b: String,
    pub duration_s: u64,
}

impl ContactEvent {
    pub fn person(at: u64, a: &str, b: &str, duration_s: u64) -> Self {
        Self { at, kind: ContactKind::PersonPerson, a: a.into(), b: b.into(), duration_s }
    }

    pub fn place(at: u64, a: &str, place: &str, duration_s: u64) -> Self {
        Self { at, kind: ContactKind::PersonPlace, a: a.into(), b: place.into(), duration_s }
    }

    fn check(&self) -> Result<(), String> {
        if self.duration_s == 0 {
            return Err("duration_s must be positive".into());
        }
        if self.a.is_empty() || self.b.is_empty() {
            return Err("participant ids must be non-empty".into());
        }
        if self.kind == ContactKind::PersonPerson && self.a == self.b {
            return Err(format!("person {:?} cannot contact themself", self.a));
        }
        Ok(())
    }

    fn key(&self) -> (u64, String, String) {
        (self.at, self.a.clone(), self.b.clone())
    }
}

/// Parses a JSONL batch. Blank lines are skipped; line numbers are 1-based.
pub fn parse_events(text: &str) -> Result<Vec<ContactEvent>, SurveillanceError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let schema = |detail: String| SurveillanceError::Schema { line: i + 1, detail };
        let event: ContactEvent = serde_json::from_str(line).map_err(|e| schema(e.to_string()))?;
        event.check().map_err(schema)?;
        out.push(event);
    }
    Ok(out)
}

/// A person or place observed with a case, and when first seen together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sighting {
    pub id: String,
    pub first_at: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackingReport {
    pub case_id: String,
    /// Inclusive `(from, to)` bounds in simulated seconds.
    pub window: (u64, u64),
    /// Ordered by first contact time, then id.
    pub contacts: Vec<Sighting>,
    pub places: Vec<Sighting>,
}

impl TrackingReport {
    pub fn contact_ids(&self) -> Vec<&str> {
        self.contacts.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn place_ids(&self) -> Vec<&str> {
        self.places.iter().map(|s| s.id.as_str()).collect()
    }
}

/// Request from the ledger to track a confirmed case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackingRequest {
    pub case_id: String,
    pub requested_at: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackMessage {
    pub request_id: u64,
    pub report: TrackingReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurveillanceConfig {
    pub min_contact_s: u64,
    pub window_s: u64,
}

impl Default for SurveillanceConfig {
    fn default() -> Self {
        Self { min_contact_s: DEFAULT_MIN_CONTACT_S, window_s: DEFAULT_WINDOW_S }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Surveillance {
    config: SurveillanceConfig,
    events: Vec<ContactEvent>,
    keys: HashSet<(u64, String, String)>,
    // event indices per participating person
    by_person: HashMap<String, Vec<usize>>,
    persons: BTreeSet<String>,
    places: BTreeSet<String>,
    pending: BTreeMap<u64, TrackingRequest>,
    next_request: u64,
}

impl Surveillance {
    pub fn new(config: SurveillanceConfig) -> Self {
        Self { config, ..Default::default() }
    }

    pub fn config(&self) -> &SurveillanceConfig {
        &self.config
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    /// Makes a person known even if they never appear in an event.
    pub fn enroll(&mut self, person: &str) {
        self.persons.insert(person.to_string());
    }

    pub fn knows(&self, person: &str) -> bool {
        self.persons.contains(person)
    }

    pub fn persons(&self) -> &BTreeSet<String> {
        &self.persons
    }

    pub fn places(&self) -> &BTreeSet<String> {
        &self.places
    }

    /// Latest event start time seen so far.
    pub fn latest_event_at(&self) -> Option<u64> {
        self.events.iter().map(|e| e.at).max()
    }

    /// Ingests a JSONL batch atomically. Returns the number of new events;
    /// events whose `(at, a, b)` was already seen are ignored.
    pub fn ingest_events(&mut self, jsonl: &str) -> Result<usize, SurveillanceError> {
        let events = parse_events(jsonl)?;
        Ok(self.ingest(events))
    }

    /// Ingests already-validated events.
    pub fn ingest(&mut self, events: impl IntoIterator<Item = ContactEvent>) -> usize {
        let mut accepted = 0;
        for e in events {
            if !self.keys.insert(e.key()) {
                continue;
            }
            let idx = self.events.len();
            self.by_person.entry(e.a.clone()).or_default().push(idx);
            self.persons.insert(e.a.clone());
            match e.kind {
                ContactKind::PersonPerson => {
                    self.by_person.entry(e.b.clone()).or_default().push(idx);
                    self.persons.insert(e.b.clone());
                }
                ContactKind::PersonPlace => {
                    self.places.insert(e.b.clone());
                }
            }
            self.events.push(e);
            accepted += 1;
        }
        accepted
    }

    /// Close contacts and visited places of `case_id` within
    /// `[now - window_s, now]`, counting only events lasting at least
    /// `min_contact_s`.
    pub fn track(&self, case_id: &str, now: u64, window_s: u64) -> Result<TrackingReport, SurveillanceError> {
        if window_s == 0 {
            return Err(SurveillanceError::EmptyWindow);
        }
        if !self.knows(case_id) {
            return Err(SurveillanceError::UnknownPerson(case_id.to_string()));
        }
        let from = now.saturating_sub(window_s);
        let mut contacts: BTreeMap<&str, u64> = BTreeMap::new();
        let mut places: BTreeMap<&str, u64> = BTreeMap::new();
        let indices = self.by_person.get(case_id).map(Vec::as_slice).unwrap_or_default();
        for e in indices.iter().map(|&i| &self.events[i]) {
            if e.at < from || e.at > now || e.duration_s < self.config.min_contact_s {
                continue;
            }
            let (other, into) = match e.kind {
                ContactKind::PersonPerson if e.a == case_id => (e.b.as_str(), &mut contacts),
                ContactKind::PersonPerson => (e.a.as_str(), &mut contacts),
                ContactKind::PersonPlace => (e.b.as_str(), &mut places),
            };
            let first = into.entry(other).or_insert(e.at);
            *first = (*first).min(e.at);
        }
        Ok(TrackingReport {
            case_id: case_id.to_string(),
            window: (from, now),
            contacts: ordered(contacts),
            places: ordered(places),
        })
    }

    /// Accepts a tracking request and returns its correlation id.
    pub fn submit(&mut self, request: TrackingRequest) -> u64 {
        let id = self.next_request;
        self.next_request += 1;
        self.pending.insert(id, request);
        id
    }

    /// Drops a pending request without answering it.
    pub fn cancel(&mut self, request_id: u64) -> Option<TrackingRequest> {
        self.pending.remove(&request_id)
    }

    /// Answers a pending request; each request can be answered once.
    pub fn feedback(&mut self, report: TrackingReport, request_id: u64) -> Result<FeedbackMessage, SurveillanceError> {
        self.pending.remove(&request_id).ok_or(SurveillanceError::UnknownRequest(request_id))?;
        Ok(FeedbackMessage { request_id, report })
    }
}

fn ordered(seen: BTreeMap<&str, u64>) -> Vec<Sighting> {
    let mut v: Vec<Sighting> = seen.into_iter().map(|(id, first_at)| Sighting { id: id.into(), first_at }).collect();
    v.sort_by(|x, y| (x.first_at, &x.id).cmp(&(y.first_at, &y.id)));
    v
}
