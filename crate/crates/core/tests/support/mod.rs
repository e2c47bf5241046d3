//! Independent oracles. None of these call into the crate's own automata,
//! binomial code or tracker.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use covchain::pattern::Node;
use covchain::surveillance::{ContactEvent, ContactKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// End positions reachable after matching `node` from each start position
/// in `starts`; bit `i` stands for position `i`.
fn ends(node: &Node, s: &[char], starts: u64) -> u64 {
    match node {
        Node::Literal(c) => {
            let mut out = 0;
            for (i, sc) in s.iter().enumerate() {
                if starts >> i & 1 == 1 && sc == c {
                    out |= 1 << (i + 1);
                }
            }
            out
        }
        Node::Concat(parts) => parts.iter().fold(starts, |acc, p| if acc == 0 { 0 } else { ends(p, s, acc) }),
        Node::Union(alts) => alts.iter().fold(0, |acc, a| acc | ends(a, s, starts)),
        Node::Star(inner) => closure(inner, s, starts),
        Node::Plus(inner) => closure(inner, s, ends(inner, s, starts)),
    }
}

fn closure(inner: &Node, s: &[char], mut reached: u64) -> u64 {
    let mut frontier = reached;
    while frontier != 0 {
        let next = ends(inner, s, frontier) & !reached;
        reached |= next;
        frontier = next;
    }
    reached
}

/// Brute-force membership straight from the syntax tree. Texts are limited
/// to 63 symbols.
pub fn ast_matches(node: &Node, text: &str) -> bool {
    let s: Vec<char> = text.chars().collect();
    assert!(s.len() < 64, "oracle handles at most 63 symbols");
    ends(node, &s, 1) >> s.len() & 1 == 1
}

/// Every string over `symbols` with length at most `max_len`, shortest first.
pub fn all_strings(symbols: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| symbols.iter().map(move |c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Binomial pmf by summing over all 2^n outcome vectors.
pub fn exhaustive_pmf(n: u32, p: &BigRational) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    let mut pmf = vec![BigRational::zero(); n as usize + 1];
    for mask in 0u32..(1u32 << n) {
        let k = mask.count_ones();
        let mut weight = BigRational::one();
        for bit in 0..n {
            weight *= if mask >> bit & 1 == 1 { p.clone() } else { q.clone() };
        }
        pmf[k as usize] += weight;
    }
    pmf
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Fraction of `draws` trials in which at least one of `n` Bernoulli(p)
/// exposures infects.
pub fn monte_carlo_risk(n: u32, p: f64, draws: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..draws {
        if (0..n).any(|_| rng.random::<f64>() < p) {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

/// Contacts and places of `case` by scanning every event.
pub fn scan_contacts(
    events: &[ContactEvent],
    case: &str,
    now: u64,
    window_s: u64,
    min_contact_s: u64,
) -> (BTreeMap<String, u64>, BTreeMap<String, u64>) {
    let from = now.saturating_sub(window_s);
    let mut contacts = BTreeMap::new();
    let mut places = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for e in events {
        if !seen.insert((e.at, e.a.clone(), e.b.clone())) {
            continue;
        }
        if e.at < from || e.at > now || e.duration_s < min_contact_s {
            continue;
        }
        let hit = match e.kind {
            ContactKind::PersonPerson if e.a == case => Some((&mut contacts, e.b.clone())),
            ContactKind::PersonPerson if e.b == case => Some((&mut contacts, e.a.clone())),
            ContactKind::PersonPlace if e.a == case => Some((&mut places, e.b.clone())),
            _ => None,
        };
        if let Some((map, id)) = hit {
            let first = map.entry(id).or_insert(e.at);
            *first = (*first).min(e.at);
        }
    }
    (contacts, places)
}

/// Closed-form risk for `n` independent exposures.
pub fn closed_form_risk(n: u32, p: f64) -> f64 {
    1.0 - (1.0 - p).powi(n as i32)
}

// Fixtures built from the crate's public API.

use covchain::ledger::{mine, pattern_id_for, BlockDraft, Chain, Digest, SimClock};
use covchain::pattern::{
    derive_instances, random_pattern_avoiding, ClassMarker, GeneratorConfig, InfectionPattern, InstanceRequest,
};
use covchain::rng::sub_seed;

/// A seeded chain of `blocks` blocks with `per_block` patterns each.
pub fn seeded_chain(seed: u64, blocks: usize, per_block: usize, difficulty: u32) -> Chain {
    let cfg = GeneratorConfig::default();
    let clock = SimClock::default();
    let mut chain = Chain::new();
    let mut texts = BTreeSet::new();
    let mut ordinal = 0;
    for b in 0..blocks {
        let mut patterns = Vec::new();
        let mut instances = Vec::new();
        for _ in 0..per_block {
            ordinal += 1;
            let body = random_pattern_avoiding(sub_seed(seed, ordinal as u64), &cfg, |t| texts.contains(t)).unwrap();
            texts.insert(body.source_text());
            let at = (b * 3600 + ordinal) as u64;
            let pattern = InfectionPattern::new(pattern_id_for(ordinal), format!("case{ordinal}"), body, at);
            let requests = [
                InstanceRequest::new(ClassMarker::Person, format!("p{ordinal}a")),
                InstanceRequest::new(ClassMarker::Person, format!("p{ordinal}b")),
                InstanceRequest::new(ClassMarker::Building, format!("b{ordinal}")),
            ];
            instances.extend(derive_instances(&pattern, &requests).unwrap());
            patterns.push(pattern);
        }
        let (height, prev_hash) = chain.next_slot();
        let draft = BlockDraft { height, prev_hash, patterns, instances, timestamp: clock.format(b as u64 * 3600) };
        let result = mine(&draft, &draft.candidate_codes(), 4, difficulty, sub_seed(seed, 1_000 + b as u64)).unwrap();
        chain.append(&result, draft).unwrap();
    }
    chain
}

fn flip_char(s: &mut String, pos: usize, salt: u8) {
    let mut bytes = s.clone().into_bytes();
    if bytes.is_empty() {
        s.push('x');
        return;
    }
    let i = pos % bytes.len();
    // Stay within printable ASCII so the string remains valid UTF-8.
    let old = bytes[i];
    let mut new = b' ' + (old.wrapping_sub(b' ').wrapping_add(1 + salt % 93)) % 95;
    if new == old {
        new = if old == b'~' { b' ' } else { old + 1 };
    }
    bytes[i] = new;
    *s = String::from_utf8(bytes).unwrap();
}

fn flip_digest(d: &mut Digest, pos: usize, salt: u8) {
    let mut bytes = *d.as_bytes();
    bytes[pos % 32] ^= 1 << (salt % 8);
    *d = Digest::from_bytes(bytes);
}

fn flip_u64(n: &mut u64, pos: usize, salt: u8) {
    *n ^= 1u64 << ((pos % 8) * 8 + (salt % 8) as usize);
}

/// Changes exactly one byte of one pattern or header field of one block.
/// Returns a label naming what was touched.
pub fn mutate_chain(chain: &mut Chain, rng: &mut impl Rng) -> String {
    let blocks = chain.blocks_mut();
    let h = rng.random_range(0..blocks.len());
    let block = &mut blocks[h];
    let pos: usize = rng.random_range(0..1024);
    let salt: u8 = rng.random();
    let target = rng.random_range(0..10);
    let label = match target {
        0 => { flip_digest(&mut block.header.prev_hash, pos, salt); "prev_hash" }
        1 => { flip_digest(&mut block.header.merkle_root, pos, salt); "merkle_root" }
        2 => { flip_digest(&mut block.header.bhc, pos, salt); "bhc" }
        3 => { flip_char(&mut block.header.winning_code, pos, salt); "winning_code" }
        4 => { flip_char(&mut block.header.timestamp, pos, salt); "timestamp" }
        5 => { block.header.version ^= 1 << (salt % 32); "version" }
        _ => {
            let i = rng.random_range(0..block.patterns.len());
            let p = &mut block.patterns[i];
            match target {
                6 => { flip_char(&mut p.source_text, pos, salt); "source_text" }
                7 => { flip_char(&mut p.pattern_id, pos, salt); "pattern_id" }
                8 => { flip_char(&mut p.case_id, pos, salt); "case_id" }
                _ => { flip_u64(&mut p.created_at, pos, salt); "created_at" }
            }
        }
    };
    format!("block {h} {label}")
}

use covchain::orchestrator::{Orchestrator, Population, Scenario, ScenarioConfig, ScheduledCase};
use std::path::{Path, PathBuf};

pub const TOY_PERSONS: [&str; 5] = ["c1", "c2", "x", "y", "z"];
pub const TOY_PLACES: [&str; 2] = ["mall", "gym"];

/// x meets both cases, y meets c1 only, z meets nobody long enough.
pub fn toy_events() -> Vec<ContactEvent> {
    vec![
        ContactEvent::person(100, "c1", "x", 600),
        ContactEvent::person(200, "x", "c2", 600),
        ContactEvent::person(300, "c1", "y", 900),
        ContactEvent::place(400, "c1", "mall", 1_200),
        ContactEvent::place(500, "c2", "gym", 700),
        ContactEvent::person(600, "z", "c2", 60),
        ContactEvent::person(700, "y", "z", 800),
    ]
}

pub fn toy_config(capacity: usize, difficulty: u32) -> ScenarioConfig {
    ScenarioConfig { block_capacity: capacity, difficulty, ..ScenarioConfig::default() }
}

pub fn toy_scenario(capacity: usize, difficulty: u32, contact_log: PathBuf) -> Scenario {
    Scenario {
        seed: 2020,
        clock_start: "01/03/20-00:00:00".into(),
        population: Population {
            persons: TOY_PERSONS.iter().map(|s| s.to_string()).collect(),
            places: TOY_PLACES.iter().map(|s| s.to_string()).collect(),
        },
        contact_log: Some(contact_log),
        confirmed_cases: vec![
            ScheduledCase { at: 1_000, case_id: "c1".into() },
            ScheduledCase { at: 1_100, case_id: "c2".into() },
        ],
        config: toy_config(capacity, difficulty),
    }
}

pub fn write_events(path: &Path, events: &[ContactEvent]) {
    let text: String = events.iter().map(|e| serde_json::to_string(e).unwrap() + "\n").collect();
    std::fs::write(path, text).unwrap();
}

/// Writes the toy scenario and its contact log into `dir`.
pub fn write_toy_scenario(dir: &Path, capacity: usize, difficulty: u32) -> PathBuf {
    write_events(&dir.join("contacts.jsonl"), &toy_events());
    let scenario = toy_scenario(capacity, difficulty, PathBuf::from("contacts.jsonl"));
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(&scenario).unwrap()).unwrap();
    path
}

pub fn toy_orchestrator(capacity: usize, difficulty: u32) -> Orchestrator {
    let mut orch = Orchestrator::new(toy_config(capacity, difficulty), 2020, SimClock::default()).unwrap();
    TOY_PERSONS.iter().for_each(|p| orch.enroll_person(p));
    orch.ingest(toy_events());
    orch
}

/// `n` persons each in contact with the next one.
pub fn ring_orchestrator(n: usize, capacity: usize, seed: u64) -> Orchestrator {
    let mut orch = Orchestrator::new(toy_config(capacity, 4), seed, SimClock::default()).unwrap();
    let ids: Vec<String> = (0..n).map(|i| format!("r{i:02}")).collect();
    ids.iter().for_each(|p| orch.enroll_person(p));
    let events: Vec<_> = (0..n)
        .map(|i| ContactEvent::person(10 * i as u64, &ids[i], &ids[(i + 1) % n], 600))
        .collect();
    orch.ingest(events);
    orch
}
