//! Infection-code mining.
//!
//! Candidate codes are dealt round-robin to the miners. Each miner shuffles
//! its share with its own seeded stream and tries one code per round; rounds
//! run in lockstep and, within a round, in miner-index order. The first code
//! whose BHC has at least `difficulty` leading zero bits ends the race. When
//! no code qualifies, the candidate with the numerically smallest BHC
//! (ties by code) is taken so that a block always closes.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::block::{bhc_of, BlockDraft};
use super::digest::Digest;
use super::LedgerError;
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningResult {
    pub winner_miner: usize,
    pub winning_code: String,
    pub bhc: Digest,
    pub tries_per_miner: Vec<u64>,
    pub met_difficulty: bool,
    pub difficulty: u32,
}

pub fn mine(
    draft: &BlockDraft,
    candidate_codes: &[String],
    num_miners: usize,
    difficulty: u32,
    seed: u64,
) -> Result<MiningResult, LedgerError> {
    if candidate_codes.is_empty() {
        return Err(LedgerError::NoCandidates);
    }
    if num_miners == 0 {
        return Err(LedgerError::Format("at least one miner is required".into()));
    }
    let merkle_root = draft.merkle_root()?;
    let prev_hash = draft.prev_hash;

    let mut shares: Vec<Vec<&str>> = vec![Vec::new(); num_miners];
    for (i, code) in candidate_codes.iter().enumerate() {
        shares[i % num_miners].push(code);
    }
    for (m, share) in shares.iter_mut().enumerate() {
        share.shuffle(&mut stream_rng(seed, m as u64));
    }

    // Position of each miner's first qualifying code; digests are kept for
    // the fallback, which is only needed when every share was exhausted.
    let mut first_hit: Vec<Option<usize>> = Vec::with_capacity(num_miners);
    let mut tried: Vec<Vec<Digest>> = Vec::with_capacity(num_miners);
    for share in &shares {
        let mut digests = Vec::new();
        let mut hit = None;
        for (i, code) in share.iter().enumerate() {
            let d = bhc_of(&merkle_root, &prev_hash, code);
            digests.push(d);
            if d.meets_difficulty(difficulty) {
                hit = Some(i);
                break;
            }
        }
        first_hit.push(hit);
        tried.push(digests);
    }

    let winner = first_hit
        .iter()
        .enumerate()
        .filter_map(|(m, hit)| hit.map(|i| (i, m)))
        .min();

    match winner {
        Some((position, miner)) => {
            let round = position as u64 + 1;
            let tries_per_miner = shares
                .iter()
                .enumerate()
                .map(|(m, share)| {
                    let reached = if m <= miner { round } else { round - 1 };
                    reached.min(share.len() as u64)
                })
                .collect();
            Ok(MiningResult {
                winner_miner: miner,
                winning_code: shares[miner][position].to_string(),
                bhc: tried[miner][position],
                tries_per_miner,
                met_difficulty: true,
                difficulty,
            })
        }
        None => {
            let (bhc, code, miner) = tried
                .iter()
                .enumerate()
                .flat_map(|(m, ds)| ds.iter().zip(&shares[m]).map(move |(d, c)| (*d, *c, m)))
                .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
                .expect("candidates are non-empty");
            Ok(MiningResult {
                winner_miner: miner,
                winning_code: code.to_string(),
                bhc,
                tries_per_miner: shares.iter().map(|s| s.len() as u64).collect(),
                met_difficulty: false,
                difficulty,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{parse_pattern, Alphabet, InfectionPattern};

    fn draft() -> BlockDraft {
        let body = parse_pattern("ab+c", &Alphabet::new("abc".chars()).unwrap()).unwrap();
        BlockDraft {
            height: 0,
            prev_hash: Digest::ZERO,
            patterns: vec![InfectionPattern::new("IP000001", "c1", body, 0)],
            instances: vec![],
            timestamp: "01/03/20-00:00:00".into(),
        }
    }

    fn codes(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("Pa{}c", "b".repeat(i + 1))).collect()
    }

    #[test]
    fn zero_difficulty_first_miner_first_try() {
        let r = mine(&draft(), &codes(12), 4, 0, 9).unwrap();
        assert_eq!(r.winner_miner, 0);
        assert_eq!(r.tries_per_miner, [1, 0, 0, 0]);
        assert!(r.met_difficulty);
    }

    #[test]
    fn deterministic() {
        let a = mine(&draft(), &codes(40), 3, 4, 11).unwrap();
        let b = mine(&draft(), &codes(40), 3, 4, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn impossible_difficulty_falls_back_to_smallest_digest() {
        let d = draft();
        let cs = codes(20);
        let r = mine(&d, &cs, 3, 256, 1).unwrap();
        assert!(!r.met_difficulty);
        let root = d.merkle_root().unwrap();
        let best = cs.iter().map(|c| (bhc_of(&root, &d.prev_hash, c), c.clone())).min().unwrap();
        assert_eq!((r.bhc, r.winning_code.clone()), best);
        assert_eq!(r.tries_per_miner, [7, 7, 6]);
        assert_eq!(cs.iter().position(|c| *c == r.winning_code).unwrap() % 3, r.winner_miner);
    }

    #[test]
    fn winner_has_fewest_tries() {
        let d = draft();
        let r = mine(&d, &codes(200), 4, 3, 5).unwrap();
        assert!(r.met_difficulty);
        assert!(r.bhc.meets_difficulty(3));
        let win_tries = r.tries_per_miner[r.winner_miner];
        for (m, &t) in r.tries_per_miner.iter().enumerate() {
            if m < r.winner_miner {
                assert_eq!(t, win_tries);
            } else if m > r.winner_miner {
                assert_eq!(t, win_tries - 1);
            }
        }
    }

    #[test]
    fn empty_candidates() {
        assert!(matches!(mine(&draft(), &[], 2, 0, 0), Err(LedgerError::NoCandidates)));
    }
}
