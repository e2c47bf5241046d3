use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use super::scenario::{Scenario, ScenarioConfig};
use super::{PipelineError, ScenarioError};
use crate::ledger::{
    instance_requests, ipg_register_case, mine, Block, BlockDraft, Chain, ChainStore, MiningResult, SimClock,
};
use crate::p2p::{
    detect_suspects, exchange_warnings, verify_code, ClientFleet, ClientInbox, DeliveryReport, DeliveryStatus,
    InfectionDetail, P2pError, RiskEstimate, RiskRegistry, Suspect, SuspectMode, WarningMessage,
};
use crate::pattern::{derive_instances_with, shortlex, ClassMarker, InfectionInstance, InfectionPattern, VerifierRegistry};
use crate::rng::sub_seed;
use crate::surveillance::{ContactEvent, Surveillance, SurveillanceError, TrackingReport};

// Stream tags for seeds derived from the scenario seed.
const PATTERN_TAG: u64 = 0x1;
const MINING_TAG: u64 = 0x2;
const TRANSPORT_TAG: u64 = 0x3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrackingSummary {
    pub window: (u64, u64),
    pub contacts: usize,
    pub places: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DispatchCounts {
    pub persons: usize,
    pub buildings: usize,
    pub delivered: usize,
    pub duplicates: usize,
    pub dropped: usize,
    pub unknown_recipients: usize,
}

/// Audit trail of one case registration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineRecord {
    pub case_id: String,
    pub registered_at: u64,
    pub pattern_id: String,
    pub source_text: String,
    pub tracking: TrackingSummary,
    pub dispatched: DispatchCounts,
    /// Set together with `block_height` once the case's block is mined.
    pub mining: Option<MiningResult>,
    pub block_height: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    CaseRegistered { at: u64, case_id: String, pattern_id: String, source_text: String },
    Tracked { case_id: String, contacts: Vec<String>, places: Vec<String> },
    Notified { case_id: String, persons: usize, buildings: usize, delivered: usize },
    Mined { height: u64, winner_miner: usize, winning_code: String, met_difficulty: bool },
    Appended { height: u64, bhc: String, patterns: usize },
}

#[derive(Clone, Debug, Default)]
struct OpenBlock {
    patterns: Vec<InfectionPattern>,
    instances: Vec<InfectionInstance>,
    records: Vec<usize>,
}

/// Owns every subsystem and runs the case-registration pipeline:
/// IPG, tracking, feedback, derivation, notification, then mining and append
/// once the open block is full.
#[derive(Clone, Debug)]
pub struct Orchestrator {
    config: ScenarioConfig,
    seed: u64,
    clock: SimClock,
    surveillance: Surveillance,
    verifier: VerifierRegistry,
    chain: Chain,
    open: OpenBlock,
    fleet: ClientFleet,
    risks: RiskRegistry<f64>,
    records: Vec<PipelineRecord>,
    reports: BTreeMap<String, TrackingReport>,
    trace: Vec<TraceEvent>,
    chain_file: Option<PathBuf>,
}

impl Orchestrator {
    pub fn new(config: ScenarioConfig, seed: u64, clock: SimClock) -> Result<Self, ScenarioError> {
        config.validate()?;
        let risks = RiskRegistry::new(config.p_per_contact)
            .map_err(|e| ScenarioError::new("config.p_per_contact", e.to_string()))?;
        Ok(Self {
            surveillance: Surveillance::new(config.surveillance()),
            fleet: ClientFleet::new(config.drop_rate, sub_seed(seed, TRANSPORT_TAG)),
            config,
            seed,
            clock,
            verifier: VerifierRegistry::new(),
            chain: Chain::new(),
            open: OpenBlock::default(),
            risks,
            records: Vec::new(),
            reports: BTreeMap::new(),
            trace: Vec::new(),
            chain_file: None,
        })
    }

    /// Sets up population, contact log and clients from a scenario. The
    /// case schedule is not executed.
    pub fn from_scenario(scenario: &Scenario) -> Result<Self, ScenarioError> {
        scenario.validate()?;
        let clock = SimClock::from_timestamp(&scenario.clock_start)
            .map_err(|e| ScenarioError::new("clock_start", e.to_string()))?;
        let mut orch = Self::new(scenario.config.clone(), scenario.seed, clock)?;
        for p in &scenario.population.persons {
            orch.enroll_person(p);
        }
        orch.ingest(scenario.contact_events()?);
        Ok(orch)
    }

    /// Appends every sealed block to `path` from now on.
    pub fn persist_to(&mut self, path: impl Into<PathBuf>) {
        self.chain_file = Some(path.into());
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn verifier(&self) -> &VerifierRegistry {
        &self.verifier
    }

    pub fn surveillance(&self) -> &Surveillance {
        &self.surveillance
    }

    pub fn fleet(&self) -> &ClientFleet {
        &self.fleet
    }

    pub fn records(&self) -> &[PipelineRecord] {
        &self.records
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn tracking_report(&self, case_id: &str) -> Option<&TrackingReport> {
        self.reports.get(case_id)
    }

    /// Patterns buffered in the open block.
    pub fn pending_patterns(&self) -> &[InfectionPattern] {
        &self.open.patterns
    }

    pub fn enroll_person(&mut self, person: &str) {
        self.surveillance.enroll(person);
        self.fleet.enroll(person);
        self.risks.update(self.fleet.inbox(person).expect("just enrolled"));
    }

    /// Adds contact events; every person seen becomes a client.
    pub fn ingest(&mut self, events: impl IntoIterator<Item = ContactEvent>) -> usize {
        let accepted = self.surveillance.ingest(events);
        let persons: Vec<String> = self.surveillance.persons().iter().cloned().collect();
        for p in persons {
            if self.fleet.inbox(&p).is_none() {
                self.enroll_person(&p);
            }
        }
        accepted
    }

    pub fn ingest_jsonl(&mut self, jsonl: &str) -> Result<usize, SurveillanceError> {
        let events = crate::surveillance::parse_events(jsonl)?;
        Ok(self.ingest(events))
    }

    /// Default "now" for callers that do not supply one: the latest event.
    pub fn default_now(&self) -> u64 {
        self.surveillance.latest_event_at().unwrap_or(0)
    }

    /// Runs the whole pipeline for one confirmed case. Either every step
    /// takes effect or none does.
    pub fn register_case(&mut self, case_id: &str, now: u64) -> Result<PipelineRecord, PipelineError> {
        if !self.surveillance.knows(case_id) {
            return Err(PipelineError::UnknownPerson(case_id.to_string()));
        }
        if self.verifier.has_case(case_id) {
            return Err(PipelineError::DuplicateCase(case_id.to_string()));
        }

        let seed = sub_seed(sub_seed(self.seed, PATTERN_TAG), self.verifier.len() as u64);
        let registration = ipg_register_case(case_id, now, seed, &self.config.generator(), &mut self.verifier)?;
        let pattern = registration.pattern;

        let prepared = self.track_and_derive(&pattern, registration.tracking_request, &registration.dfa, now);
        let (report, instances) = match prepared {
            Ok(ok) => ok,
            Err(e) => {
                self.verifier.unregister(&pattern.pattern_id);
                return Err(e);
            }
        };

        // Commit.
        self.verifier.record_instances(&instances);
        let delivery = self.fleet.notify(&instances, now);
        for client in delivery.delivered_to() {
            self.risks.update(self.fleet.inbox(client).expect("delivered to an enrolled client"));
        }

        let record = PipelineRecord {
            case_id: case_id.to_string(),
            registered_at: now,
            pattern_id: pattern.pattern_id.clone(),
            source_text: pattern.source_text.clone(),
            tracking: TrackingSummary { window: report.window, contacts: report.contacts.len(), places: report.places.len() },
            dispatched: dispatch_counts(&instances, &delivery),
            mining: None,
            block_height: None,
        };
        self.trace.push(TraceEvent::CaseRegistered {
            at: now,
            case_id: case_id.to_string(),
            pattern_id: pattern.pattern_id.clone(),
            source_text: pattern.source_text.clone(),
        });
        self.trace.push(TraceEvent::Tracked {
            case_id: case_id.to_string(),
            contacts: report.contact_ids().into_iter().map(String::from).collect(),
            places: report.place_ids().into_iter().map(String::from).collect(),
        });
        self.trace.push(TraceEvent::Notified {
            case_id: case_id.to_string(),
            persons: record.dispatched.persons,
            buildings: record.dispatched.buildings,
            delivered: record.dispatched.delivered,
        });

        self.reports.insert(case_id.to_string(), report);
        self.records.push(record);
        self.open.patterns.push(pattern);
        self.open.instances.extend(instances);
        self.open.records.push(self.records.len() - 1);

        if self.open.patterns.len() >= self.config.block_capacity {
            self.seal_open_block(now)?;
        }
        Ok(self.records.last().unwrap().clone())
    }

    fn track_and_derive(
        &mut self,
        pattern: &InfectionPattern,
        request: crate::surveillance::TrackingRequest,
        dfa: &crate::pattern::Dfa,
        now: u64,
    ) -> Result<(TrackingReport, Vec<InfectionInstance>), PipelineError> {
        let case_id = request.case_id.clone();
        let request_id = self.surveillance.submit(request);
        let report = match self.surveillance.track(&case_id, now, self.config.window_s) {
            Ok(r) => r,
            Err(e) => {
                self.surveillance.cancel(request_id);
                return Err(e.into());
            }
        };
        let feedback = self.surveillance.feedback(report, request_id)?;
        let requests = instance_requests(&feedback);
        let verifier = &self.verifier;
        let instances = derive_instances_with(pattern, dfa, &requests, |code| verifier.has_code(code))?;
        Ok((feedback.report, instances))
    }

    /// Mines and appends the open block if it holds any pattern.
    pub fn flush(&mut self, now: u64) -> Result<Option<u64>, PipelineError> {
        if self.open.patterns.is_empty() {
            return Ok(None);
        }
        self.seal_open_block(now).map(Some)
    }

    fn seal_open_block(&mut self, now: u64) -> Result<u64, PipelineError> {
        let (height, prev_hash) = self.chain.next_slot();
        let mut candidates: Vec<String> = self.open.instances.iter().map(|i| i.code.clone()).collect();
        if candidates.is_empty() {
            // Nobody was notified; mine over each pattern's first person code.
            candidates = self
                .open
                .patterns
                .iter()
                .filter_map(|p| {
                    let dfa = self.verifier.entry(&p.pattern_id).map(|e| e.dfa.clone())?;
                    let first = shortlex(&dfa).next()?;
                    Some(format!("{}{first}", ClassMarker::Person.as_char()))
                })
                .collect();
        }
        let draft = BlockDraft {
            height,
            prev_hash,
            patterns: self.open.patterns.clone(),
            instances: self.open.instances.clone(),
            timestamp: self.clock.format(now),
        };
        let mining_seed = sub_seed(sub_seed(self.seed, MINING_TAG), height);
        let result = mine(&draft, &candidates, self.config.num_miners, self.config.difficulty, mining_seed)?;
        let block = self.chain.append(&result, draft)?.clone();
        if let Some(path) = &self.chain_file {
            ChainStore::open(path)?.append(&block)?;
        }

        for &i in &self.open.records {
            self.records[i].mining = Some(result.clone());
            self.records[i].block_height = Some(height);
        }
        self.trace.push(TraceEvent::Mined {
            height,
            winner_miner: result.winner_miner,
            winning_code: result.winning_code.clone(),
            met_difficulty: result.met_difficulty,
        });
        self.trace.push(TraceEvent::Appended { height, bhc: block.header.bhc.to_hex(), patterns: block.patterns.len() });
        self.open = OpenBlock::default();
        Ok(height)
    }

    pub fn block(&self, height: u64) -> Option<&Block> {
        self.chain.get(height)
    }

    pub fn verify(&self, code: &str) -> InfectionDetail {
        verify_code(code, &self.verifier)
    }

    pub fn inbox(&self, client_id: &str) -> Option<&ClientInbox> {
        self.fleet.inbox(client_id)
    }

    pub fn risk(&self, client_id: &str) -> Option<&RiskEstimate<f64>> {
        self.risks.get(client_id)
    }

    pub fn risk_estimates(&self) -> impl Iterator<Item = &RiskEstimate<f64>> {
        self.risks.estimates()
    }

    pub fn suspects(&self, mode: &SuspectMode<f64>) -> Vec<Suspect<f64>> {
        detect_suspects(self.risks.estimates(), mode)
    }

    pub fn exchange(&self, members: &[String], now: u64) -> Result<BTreeMap<String, Vec<WarningMessage<f64>>>, P2pError> {
        exchange_warnings(members, |id| self.risks.get(id).map(|e| e.risk), now)
    }
}

fn dispatch_counts(instances: &[InfectionInstance], delivery: &DeliveryReport) -> DispatchCounts {
    let persons = instances.iter().filter(|i| i.class_marker == ClassMarker::Person).count();
    DispatchCounts {
        persons,
        buildings: instances.len() - persons,
        delivered: delivery.count(DeliveryStatus::Delivered),
        duplicates: delivery.count(DeliveryStatus::Duplicate),
        dropped: delivery.count(DeliveryStatus::Dropped),
        unknown_recipients: delivery.count(DeliveryStatus::UnknownRecipient),
    }
}
