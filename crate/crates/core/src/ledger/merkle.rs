//! Binary Merkle tree over pattern source texts.
//!
//! Leaves are `H(0x00 || source_text)`, interior nodes
//! `H(0x01 || left || right)` over raw digest bytes. An odd node at any
//! level is paired with itself; a single leaf is its own root.

use super::digest::Digest;
use super::LedgerError;
use crate::pattern::InfectionPattern;

pub fn leaf_hash(source_text: &str) -> Digest {
    Digest::of_parts([&[0x00u8][..], source_text.as_bytes()])
}

pub fn node_hash(left: &Digest, right: &Digest) -> Digest {
    Digest::of_parts([&[0x01u8][..], left.as_bytes(), right.as_bytes()])
}

pub fn merkle_root(patterns: &[InfectionPattern]) -> Result<Digest, LedgerError> {
    merkle_root_of_texts(patterns.iter().map(|p| p.source_text.as_str()))
}

pub fn merkle_root_of_texts<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Digest, LedgerError> {
    let mut level: Vec<Digest> = texts.into_iter().map(leaf_hash).collect();
    if level.is_empty() {
        return Err(LedgerError::EmptyBlock);
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| node_hash(&pair[0], pair.get(1).unwrap_or(&pair[0])))
            .collect();
    }
    Ok(level[0])
}
