use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::ledger::parse_timestamp;
use crate::p2p::RiskEstimate;
use crate::pattern::{Alphabet, GeneratorConfig};
use crate::surveillance::{
    parse_events, ContactEvent, ContactKind, SurveillanceConfig, DEFAULT_MIN_CONTACT_S, DEFAULT_WINDOW_S,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub block_capacity: usize,
    /// Leading zero bits a BHC needs.
    pub difficulty: u32,
    pub num_miners: usize,
    pub p_per_contact: f64,
    pub min_contact_s: u64,
    pub window_s: u64,
    pub alphabet: Alphabet,
    pub min_instances: usize,
    pub max_depth: usize,
    pub max_retries: usize,
    /// Probability that a person notification is lost in transit.
    pub drop_rate: f64,
    /// Risk cut-off for the run summary's suspect list; defaults to
    /// everyone holding at least one code.
    pub suspect_threshold: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            block_capacity: 7,
            difficulty: 8,
            num_miners: 4,
            p_per_contact: 0.1,
            min_contact_s: DEFAULT_MIN_CONTACT_S,
            window_s: DEFAULT_WINDOW_S,
            alphabet: Alphabet::default(),
            min_instances: 32,
            max_depth: 4,
            max_retries: 64,
            drop_rate: 0.0,
            suspect_threshold: None,
        }
    }
}

impl ScenarioConfig {
    pub fn generator(&self) -> GeneratorConfig {
        GeneratorConfig {
            alphabet: self.alphabet.clone(),
            max_depth: self.max_depth,
            min_instances: self.min_instances,
            max_retries: self.max_retries,
        }
    }

    pub fn surveillance(&self) -> SurveillanceConfig {
        SurveillanceConfig { min_contact_s: self.min_contact_s, window_s: self.window_s }
    }

    /// Unset means the risk of holding a single code, computed the same way
    /// as client risks so that one-code holders compare equal.
    pub fn suspect_threshold(&self) -> f64 {
        self.suspect_threshold.unwrap_or_else(|| {
            RiskEstimate::from_count("", 1, self.p_per_contact).map_or(self.p_per_contact, |e| e.risk)
        })
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |field: &str, detail: &str| Err(ScenarioError::new(format!("config.{field}"), detail));
        if self.block_capacity == 0 {
            return bad("block_capacity", "must be at least 1");
        }
        if self.num_miners == 0 {
            return bad("num_miners", "must be at least 1");
        }
        if self.difficulty > 256 {
            return bad("difficulty", "must be at most 256 bits");
        }
        if !(0.0..=1.0).contains(&self.p_per_contact) {
            return bad("p_per_contact", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.drop_rate) {
            return bad("drop_rate", "must lie in [0, 1]");
        }
        if self.suspect_threshold.is_some_and(|t| t.is_nan() || t < 0.0) {
            return bad("suspect_threshold", "must be non-negative");
        }
        if self.window_s == 0 {
            return bad("window_s", "must be positive");
        }
        if self.min_instances == 0 {
            return bad("min_instances", "must be at least 1");
        }
        if self.max_depth == 0 {
            return bad("max_depth", "must be at least 1");
        }
        if self.max_retries == 0 {
            return bad("max_retries", "must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Population {
    pub persons: Vec<String>,
    #[serde(default)]
    pub places: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledCase {
    pub at: u64,
    pub case_id: String,
}

fn default_clock_start() -> String {
    "01/03/20-00:00:00".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    /// `DD/MM/YY-HH:MM:SS` of simulated second 0.
    #[serde(default = "default_clock_start")]
    pub clock_start: String,
    pub population: Population,
    /// JSONL contact events; relative paths resolve against the scenario
    /// file's directory.
    #[serde(default)]
    pub contact_log: Option<PathBuf>,
    #[serde(default)]
    pub confirmed_cases: Vec<ScheduledCase>,
    #[serde(default)]
    pub config: ScenarioConfig,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::new("scenario", e.to_string()))
    }

    /// Reads a scenario file and resolves its contact-log path.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| ScenarioError::new("scenario", format!("{}: {e}", path.display())))?;
        let mut scenario = Self::from_json(&text)?;
        if let Some(log) = &scenario.contact_log {
            if log.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new("."));
                scenario.contact_log = Some(base.join(log));
            }
        }
        Ok(scenario)
    }

    /// Reads and validates the contact log, if any.
    pub fn contact_events(&self) -> Result<Vec<ContactEvent>, ScenarioError> {
        let Some(path) = &self.contact_log else {
            return Ok(Vec::new());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| ScenarioError::new("contact_log", format!("{}: {e}", path.display())))?;
        let events = parse_events(&text).map_err(|e| ScenarioError::new("contact_log", e.to_string()))?;
        let persons: BTreeSet<&str> = self.population.persons.iter().map(String::as_str).collect();
        let places: BTreeSet<&str> = self.population.places.iter().map(String::as_str).collect();
        for (i, e) in events.iter().enumerate() {
            let b_ok = match e.kind {
                ContactKind::PersonPerson => persons.contains(e.b.as_str()),
                ContactKind::PersonPlace => places.contains(e.b.as_str()),
            };
            if !persons.contains(e.a.as_str()) || !b_ok {
                return Err(ScenarioError::new(
                    "contact_log",
                    format!("event {} references someone outside the population", i + 1),
                ));
            }
        }
        Ok(events)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.config.validate()?;
        parse_timestamp(&self.clock_start).map_err(|e| ScenarioError::new("clock_start", e.to_string()))?;
        let mut seen = BTreeSet::new();
        for (i, p) in self.population.persons.iter().chain(&self.population.places).enumerate() {
            if p.is_empty() {
                return Err(ScenarioError::new("population", format!("entry {i} is empty")));
            }
            if !seen.insert(p.as_str()) {
                return Err(ScenarioError::new("population", format!("{p:?} is listed twice")));
            }
        }
        let persons: BTreeSet<&str> = self.population.persons.iter().map(String::as_str).collect();
        let mut scheduled = BTreeSet::new();
        for (i, c) in self.confirmed_cases.iter().enumerate() {
            if !persons.contains(c.case_id.as_str()) {
                return Err(ScenarioError::new(format!("confirmed_cases[{i}].case_id"), format!("{:?} is not a person", c.case_id)));
            }
            if !scheduled.insert(c.case_id.as_str()) {
                return Err(ScenarioError::new(format!("confirmed_cases[{i}].case_id"), "scheduled twice"));
            }
        }
        Ok(())
    }
}
