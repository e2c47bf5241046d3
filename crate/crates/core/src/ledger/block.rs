use serde::{Deserialize, Serialize};

use super::clock::parse_timestamp;
use super::digest::Digest;
use super::merkle::merkle_root;
use super::mining::MiningResult;
use super::LedgerError;
use crate::pattern::{InfectionInstance, InfectionPattern};

pub const BLOCK_VERSION: u32 = 1;

/// Block hash code: `H(merkle_root_hex || prev_hash_hex || code)` over UTF-8,
/// no separators.
pub fn compute_bhc(merkle_root: &str, prev_hash: &str, code: &str) -> Result<Digest, LedgerError> {
    let merkle_root = Digest::from_hex(merkle_root)?;
    let prev_hash = Digest::from_hex(prev_hash)?;
    if code.is_empty() {
        return Err(LedgerError::Format("infection code is empty".into()));
    }
    Ok(bhc_of(&merkle_root, &prev_hash, code))
}

/// Typed form of [`compute_bhc`].
pub fn bhc_of(merkle_root: &Digest, prev_hash: &Digest, code: &str) -> Digest {
    Digest::of_parts([
        merkle_root.to_hex().as_bytes(),
        prev_hash.to_hex().as_bytes(),
        code.as_bytes(),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHeader {
    pub version: u32,
    pub prev_hash: Digest,
    pub merkle_root: Digest,
    pub bhc: Digest,
    pub winning_code: String,
    /// `DD/MM/YY-HH:MM:SS`
    pub timestamp: String,
}

/// A sealed block.
///
/// Besides the header and the patterns, the block carries the infection
/// codes dispatched for its patterns and a `record_digest` over every
/// persisted field, so any edit to the stored record is detectable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    pub header: BlockHeader,
    pub patterns: Vec<InfectionPattern>,
    #[serde(default)]
    pub instances: Vec<InfectionInstance>,
    pub record_digest: Digest,
}

impl Block {
    /// Recomputes the digest over all fields other than `record_digest`.
    pub fn compute_record_digest(&self) -> Digest {
        let mut enc = RecordEncoder::default();
        enc.num(self.height);
        let h = &self.header;
        enc.num(h.version as u64);
        enc.str(&h.prev_hash.to_hex());
        enc.str(&h.merkle_root.to_hex());
        enc.str(&h.bhc.to_hex());
        enc.str(&h.winning_code);
        enc.str(&h.timestamp);
        enc.num(self.patterns.len() as u64);
        for p in &self.patterns {
            enc.str(&p.pattern_id);
            enc.str(&p.case_id);
            enc.str(&p.alphabet().to_string());
            enc.str(&p.source_text);
            enc.num(p.created_at);
        }
        enc.num(self.instances.len() as u64);
        for i in &self.instances {
            enc.str(&i.code);
            enc.str(&i.pattern_id);
            enc.str(&i.subject_id);
            enc.num(i.rank);
            match i.exposed_at {
                Some(t) => {
                    enc.num(1);
                    enc.num(t);
                }
                None => enc.num(0),
            }
        }
        Digest::of(&enc.0)
    }
}

// Length-prefixed field encoding behind `record_digest`.
#[derive(Default)]
struct RecordEncoder(Vec<u8>);

impl RecordEncoder {
    fn str(&mut self, s: &str) {
        self.0.extend_from_slice(&(s.len() as u64).to_be_bytes());
        self.0.extend_from_slice(s.as_bytes());
    }

    fn num(&mut self, n: u64) {
        self.0.extend_from_slice(&n.to_be_bytes());
    }
}

/// A block awaiting its winning code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDraft {
    pub height: u64,
    pub prev_hash: Digest,
    pub patterns: Vec<InfectionPattern>,
    pub instances: Vec<InfectionInstance>,
    pub timestamp: String,
}

impl BlockDraft {
    pub fn merkle_root(&self) -> Result<Digest, LedgerError> {
        merkle_root(&self.patterns)
    }

    /// Codes dispatched for this block's patterns, in dispatch order.
    pub fn candidate_codes(&self) -> Vec<String> {
        self.instances.iter().map(|i| i.code.clone()).collect()
    }

    pub fn seal(self, result: &MiningResult) -> Result<Block, LedgerError> {
        let merkle_root = self.merkle_root()?;
        let mut block = Block {
            height: self.height,
            header: BlockHeader {
                version: BLOCK_VERSION,
                prev_hash: self.prev_hash,
                merkle_root,
                bhc: result.bhc,
                winning_code: result.winning_code.clone(),
                timestamp: self.timestamp,
            },
            patterns: self.patterns,
            instances: self.instances,
            record_digest: Digest::ZERO,
        };
        block.record_digest = block.compute_record_digest();
        Ok(block)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum BlockIssue {
    EmptyBlock,
    Version { found: u32 },
    Height { expected: u64, found: u64 },
    PrevHash { expected: Digest, found: Digest },
    MerkleRoot { expected: Digest, found: Digest },
    Bhc { expected: Digest, found: Digest },
    EmptyWinningCode,
    Timestamp { found: String },
    RecordDigest { expected: Digest, found: Digest },
}

/// Outcome of [`verify_block`] with the reasons for any rejection.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockVerdict {
    pub issues: Vec<BlockIssue>,
}

impl BlockVerdict {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks `block` against its predecessor (`None` for the genesis slot).
///
/// The winning code cannot be recovered from the BHC, so it travels in the
/// header and the BHC is recomputed from it.
pub fn verify_block(block: &Block, prev: Option<&Block>) -> BlockVerdict {
    let mut issues = Vec::new();
    let h = &block.header;

    if h.version != BLOCK_VERSION {
        issues.push(BlockIssue::Version { found: h.version });
    }
    let (expected_height, expected_prev) = match prev {
        Some(p) => (p.height + 1, p.header.bhc),
        None => (0, Digest::ZERO),
    };
    if block.height != expected_height {
        issues.push(BlockIssue::Height { expected: expected_height, found: block.height });
    }
    if h.prev_hash != expected_prev {
        issues.push(BlockIssue::PrevHash { expected: expected_prev, found: h.prev_hash });
    }
    match merkle_root(&block.patterns) {
        Ok(root) if root != h.merkle_root => {
            issues.push(BlockIssue::MerkleRoot { expected: root, found: h.merkle_root })
        }
        Ok(_) => {}
        Err(_) => issues.push(BlockIssue::EmptyBlock),
    }
    if h.winning_code.is_empty() {
        issues.push(BlockIssue::EmptyWinningCode);
    } else {
        let expected = bhc_of(&h.merkle_root, &h.prev_hash, &h.winning_code);
        if expected != h.bhc {
            issues.push(BlockIssue::Bhc { expected, found: h.bhc });
        }
    }
    if parse_timestamp(&h.timestamp).is_err() {
        issues.push(BlockIssue::Timestamp { found: h.timestamp.clone() });
    }
    let record = block.compute_record_digest();
    if record != block.record_digest {
        issues.push(BlockIssue::RecordDigest { expected: record, found: block.record_digest });
    }
    BlockVerdict { issues }
}
