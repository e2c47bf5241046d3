use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::block::{verify_block, Block, BlockDraft, BlockIssue};
use super::digest::Digest;
use super::mining::MiningResult;
use super::LedgerError;
use crate::pattern::InfectionInstance;

/// Where a registered pattern lives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternLocation {
    pub case_id: String,
    pub height: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainRegistry {
    pub patterns: BTreeMap<String, PatternLocation>,
    pub codes: BTreeMap<String, InfectionInstance>,
}

impl ChainRegistry {
    fn index(&mut self, block: &Block) {
        for p in &block.patterns {
            self.patterns
                .insert(p.pattern_id.clone(), PatternLocation { case_id: p.case_id.clone(), height: block.height });
        }
        for i in &block.instances {
            self.codes.insert(i.code.clone(), i.clone());
        }
    }

    pub fn has_case(&self, case_id: &str) -> bool {
        self.patterns.values().any(|l| l.case_id == case_id)
    }
}

/// First failing height of a chain audit, with the reasons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainFault {
    pub height: u64,
    pub issues: Vec<BlockIssue>,
}

impl std::fmt::Display for ChainFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "block {} is invalid:", self.height)?;
        for issue in &self.issues {
            write!(f, " {issue:?};")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    blocks: Vec<Block>,
    registry: ChainRegistry,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a chain from stored blocks without checking them; run
    /// [`Chain::audit`] to find out whether they hold together.
    pub fn from_blocks_unchecked(blocks: Vec<Block>) -> Self {
        let mut registry = ChainRegistry::default();
        blocks.iter().for_each(|b| registry.index(b));
        Self { blocks, registry }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [Block] {
        &mut self.blocks
    }

    pub fn registry(&self) -> &ChainRegistry {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn tip(&self) -> Option<&Block> {
        self.blocks.last()
    }

    pub fn get(&self, height: u64) -> Option<&Block> {
        self.blocks.get(usize::try_from(height).ok()?)
    }

    /// Height and previous hash the next block must carry.
    pub fn next_slot(&self) -> (u64, Digest) {
        match self.tip() {
            Some(b) => (b.height + 1, b.header.bhc),
            None => (0, Digest::ZERO),
        }
    }

    /// Seals `draft` with `result` and appends it if it verifies against the
    /// tip. On failure the chain is unchanged.
    pub fn append(&mut self, result: &MiningResult, draft: BlockDraft) -> Result<&Block, LedgerError> {
        let block = draft.seal(result)?;
        self.append_block(block)
    }

    pub fn append_block(&mut self, block: Block) -> Result<&Block, LedgerError> {
        let verdict = verify_block(&block, self.tip());
        if !verdict.is_valid() {
            return Err(LedgerError::InvalidBlock { height: block.height, issues: verdict.issues });
        }
        self.registry.index(&block);
        self.blocks.push(block);
        Ok(self.blocks.last().unwrap())
    }

    /// Verifies every height in order. Returns the first failure.
    pub fn audit(&self) -> Result<(), ChainFault> {
        let mut prev = None;
        for block in &self.blocks {
            let verdict = verify_block(block, prev);
            if !verdict.is_valid() {
                return Err(ChainFault { height: block.height, issues: verdict.issues });
            }
            prev = Some(block);
        }
        Ok(())
    }

    /// One JSON record per line, in height order.
    pub fn to_jsonl(&self) -> String {
        self.blocks.iter().map(|b| block_line(b) + "\n").collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, LedgerError> {
        let mut blocks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let block: Block = serde_json::from_str(line)
                .map_err(|e| LedgerError::Corrupt { line: i + 1, detail: e.to_string() })?;
            blocks.push(block);
        }
        Ok(Self::from_blocks_unchecked(blocks))
    }
}

/// `true` iff every block verifies against its predecessor.
pub fn validate_chain(chain: &Chain) -> bool {
    chain.audit().is_ok()
}

fn block_line(block: &Block) -> String {
    serde_json::to_string(block).expect("blocks serialize")
}

/// Append-only chain file: one block record per line.
pub struct ChainStore {
    path: PathBuf,
    file: File,
}

impl ChainStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, block: &Block) -> Result<(), LedgerError> {
        let mut line = block_line(block);
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

/// Reads a chain file. Structural problems are errors; integrity problems
/// are left for [`Chain::audit`].
pub fn load_chain(path: impl AsRef<Path>) -> Result<Chain, LedgerError> {
    let reader = BufReader::new(File::open(path)?);
    let mut blocks = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let block: Block =
            serde_json::from_str(&line).map_err(|e| LedgerError::Corrupt { line: i + 1, detail: e.to_string() })?;
        blocks.push(block);
    }
    Ok(Chain::from_blocks_unchecked(blocks))
}
