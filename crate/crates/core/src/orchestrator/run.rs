use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::pipeline::{Orchestrator, PipelineRecord, TraceEvent};
use super::scenario::Scenario;
use super::RunError;
use crate::ledger::Digest;
use crate::p2p::{Suspect, SuspectMode};

pub const CHAIN_FILE: &str = "chain.jsonl";
pub const RISK_TABLE_FILE: &str = "risk_table.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RiskRow {
    pub client_id: String,
    pub n_codes: u64,
    pub p_per_contact: f64,
    pub risk: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub blocks: usize,
    pub chain_file: PathBuf,
    /// SHA-256 of the chain file bytes.
    pub chain_digest: String,
    pub records: Vec<PipelineRecord>,
    pub risk_table: Vec<RiskRow>,
    pub suspect_threshold: f64,
    pub suspects: Vec<Suspect<f64>>,
    pub trace: Vec<TraceEvent>,
}

/// Executes a scenario's case schedule and returns the finished
/// orchestrator along with the run summary. Nothing is written to disk.
pub fn simulate(scenario: &Scenario) -> Result<(Orchestrator, RunSummary), RunError> {
    let mut orch = Orchestrator::from_scenario(scenario)?;
    let mut schedule: Vec<_> = scenario.confirmed_cases.iter().collect();
    schedule.sort_by_key(|c| c.at);
    let mut last = 0;
    for case in schedule {
        orch.register_case(&case.case_id, case.at)?;
        last = last.max(case.at);
    }
    orch.flush(last)?;
    let summary = summarize(&orch, scenario.seed, PathBuf::from(CHAIN_FILE));
    Ok((orch, summary))
}

fn summarize(orch: &Orchestrator, seed: u64, chain_file: PathBuf) -> RunSummary {
    let chain_text = orch.chain().to_jsonl();
    let risk_table = orch
        .risk_estimates()
        .map(|e| RiskRow { client_id: e.client_id.clone(), n_codes: e.n_codes, p_per_contact: e.p_per_contact, risk: e.risk })
        .collect();
    let threshold = orch.config().suspect_threshold();
    RunSummary {
        seed,
        blocks: orch.chain().len(),
        chain_file,
        chain_digest: Digest::of(chain_text.as_bytes()).to_hex(),
        records: orch.records().to_vec(),
        risk_table,
        suspect_threshold: threshold,
        suspects: orch.suspects(&SuspectMode::Threshold(threshold)),
        trace: orch.trace().to_vec(),
    }
}

/// Runs a scenario and writes `chain.jsonl`, `risk_table.json` and
/// `summary.json` into `out_dir`.
pub fn run_scenario(scenario: &Scenario, out_dir: impl AsRef<Path>) -> Result<RunSummary, RunError> {
    let out_dir = out_dir.as_ref();
    let (orch, mut summary) = simulate(scenario)?;
    fs::create_dir_all(out_dir)?;
    let chain_path = out_dir.join(CHAIN_FILE);
    fs::write(&chain_path, orch.chain().to_jsonl())?;
    fs::write(out_dir.join(RISK_TABLE_FILE), to_json(&summary.risk_table) + "\n")?;
    summary.chain_file = chain_path;
    fs::write(out_dir.join(SUMMARY_FILE), to_json(&summary) + "\n")?;
    Ok(summary)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("summary types serialize")
}
