//! The infection-pattern blockchain.

mod block;
mod chain;
mod clock;
mod digest;
mod ipg;
mod merkle;
mod mining;

use thiserror::Error;

pub use block::{bhc_of, compute_bhc, verify_block, Block, BlockDraft, BlockHeader, BlockIssue, BlockVerdict, BLOCK_VERSION};
pub use chain::{load_chain, validate_chain, Chain, ChainFault, ChainRegistry, ChainStore, PatternLocation};
pub use clock::{parse_timestamp, SimClock, TIMESTAMP_FORMAT};
pub use digest::Digest;
pub use ipg::{instance_requests, ipg_register_case, pattern_id_for, verifier_from_chain, CaseRegistration};
pub use merkle::{leaf_hash, merkle_root, merkle_root_of_texts, node_hash};
pub use mining::{mine, MiningResult};

use crate::pattern::PatternError;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("block has no patterns")]
    EmptyBlock,
    #[error("format error: {0}")]
    Format(String),
    #[error("no candidate codes to mine")]
    NoCandidates,
    #[error("block {height} failed verification: {issues:?}")]
    InvalidBlock { height: u64, issues: Vec<BlockIssue> },
    #[error("case {0:?} is already registered")]
    DuplicateCase(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("chain file line {line}: {detail}")]
    Corrupt { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
