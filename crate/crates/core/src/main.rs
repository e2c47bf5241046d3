use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use covchain::ledger::{load_chain, verifier_from_chain, SimClock};
use covchain::orchestrator::{run_scenario, Orchestrator, RiskRow, Scenario, ScenarioConfig, RISK_TABLE_FILE};
use covchain::p2p::verify_code;

#[derive(Parser)]
#[command(name = "covchain", version, about = "Pattern-based contact tracing on a hash-chained ledger")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write chain, risk table and summary.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP control API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Scenario file providing config, population and contact log.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Append sealed blocks to this JSONL file.
        #[arg(long)]
        persist: Option<PathBuf>,
    },
    /// Check a code against a stored chain.
    Verify {
        #[arg(long)]
        code: String,
        #[arg(long)]
        chain: PathBuf,
    },
    /// Print a client's risk from a run's output directory.
    Risk {
        #[arg(long)]
        client: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<(), String> {
    match command {
        Command::Run { scenario, seed, out } => {
            let mut scenario = Scenario::load(&scenario).map_err(|e| e.to_string())?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            let summary = run_scenario(&scenario, &out).map_err(|e| e.to_string())?;
            println!(
                "{} blocks, {} cases, {} suspects; chain digest {}",
                summary.blocks,
                summary.records.len(),
                summary.suspects.len(),
                summary.chain_digest
            );
            Ok(())
        }
        Command::Serve { port, host, config, persist } => {
            let mut orch = match config {
                Some(path) => {
                    let scenario = Scenario::load(&path).map_err(|e| e.to_string())?;
                    Orchestrator::from_scenario(&scenario).map_err(|e| e.to_string())?
                }
                None => Orchestrator::new(ScenarioConfig::default(), 0, SimClock::default()).map_err(|e| e.to_string())?,
            };
            if let Some(path) = persist {
                orch.persist_to(path);
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime
                .block_on(covchain::api::serve(orch, SocketAddr::new(host, port)))
                .map_err(|e| e.to_string())
        }
        Command::Verify { code, chain } => {
            let chain = load_chain(&chain).map_err(|e| e.to_string())?;
            if let Err(fault) = chain.audit() {
                return Err(fault.to_string());
            }
            let detail = verify_code(&code, &verifier_from_chain(&chain));
            println!("{}", serde_json::to_string_pretty(&detail).map_err(|e| e.to_string())?);
            Ok(())
        }
        Command::Risk { client, out } => {
            let table = read_risk_table(&out)?;
            let row = table
                .into_iter()
                .find(|r| r.client_id == client)
                .ok_or_else(|| format!("unknown client {client:?}"))?;
            println!("{}", serde_json::to_string_pretty(&row).map_err(|e| e.to_string())?);
            Ok(())
        }
    }
}

fn read_risk_table(out: &Path) -> Result<Vec<RiskRow>, String> {
    let path = out.join(RISK_TABLE_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
