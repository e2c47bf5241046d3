//! Seeded random pattern generation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ast::{Alphabet, Node, PatternAst};
use super::dfa::compile;
use super::enumerate::shortlex;
use super::PatternError;
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub alphabet: Alphabet,
    pub max_depth: usize,
    /// Lower bound on the number of strings in a generated language.
    pub min_instances: usize,
    pub max_retries: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { alphabet: Alphabet::default(), max_depth: 4, min_instances: 32, max_retries: 64 }
    }
}

/// Random pattern for `seed`.
pub fn random_pattern(seed: u64, cfg: &GeneratorConfig) -> Result<PatternAst, PatternError> {
    random_pattern_avoiding(seed, cfg, |_| false)
}

/// Random pattern for `seed` whose source text is not `taken`.
///
/// Attempt `i` draws from stream `i` of `seed`; an attempt is rejected when
/// its language has fewer than `min_instances` strings or its text collides.
pub fn random_pattern_avoiding(
    seed: u64,
    cfg: &GeneratorConfig,
    taken: impl Fn(&str) -> bool,
) -> Result<PatternAst, PatternError> {
    let depth = cfg.max_depth.max(1);
    for attempt in 0..cfg.max_retries {
        let mut rng = stream_rng(seed, attempt as u64);
        let root = random_node(&mut rng, cfg.alphabet.symbols(), depth);
        let ast = PatternAst::new(root, cfg.alphabet.clone())?;
        if taken(&ast.source_text()) {
            continue;
        }
        let dfa = compile(&ast);
        if shortlex(&dfa).take(cfg.min_instances).count() >= cfg.min_instances {
            return Ok(ast);
        }
    }
    Err(PatternError::GenerationExhausted { attempts: cfg.max_retries })
}

fn random_node(rng: &mut impl Rng, symbols: &[char], depth: usize) -> Node {
    let literal = |rng: &mut dyn rand::RngCore| Node::Literal(symbols[rng.random_range(0..symbols.len())]);
    if depth <= 1 {
        return literal(rng);
    }
    // literal : concat : union : star : plus = 2 : 4 : 2 : 1 : 2
    match rng.random_range(0..11) {
        0..=1 => literal(rng),
        2..=5 => {
            let n = rng.random_range(2..=3);
            Node::Concat((0..n).map(|_| random_node(rng, symbols, depth - 1)).collect())
        }
        6..=7 => {
            let n = rng.random_range(2..=3);
            Node::Union((0..n).map(|_| random_node(rng, symbols, depth - 1)).collect())
        }
        8 => Node::star(random_node(rng, symbols, depth - 1)),
        _ => Node::plus(random_node(rng, symbols, depth - 1)),
    }
}
