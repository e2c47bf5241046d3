//! Infection patterns: restricted regular expressions, their automata, and
//! the infection codes drawn from their languages.

mod ast;
mod dfa;
mod enumerate;
mod generate;
mod instance;
mod parse;
mod registry;

use thiserror::Error;

pub use ast::{Alphabet, Node, PatternAst, CLASS_MARKERS, METACHARACTERS};
pub use dfa::{compile, Dfa};
pub use enumerate::{shortlex, shortlex_less, Shortlex};
pub use generate::{random_pattern, random_pattern_avoiding, GeneratorConfig};
pub use instance::{
    derive_instances, derive_instances_with, split_code, ClassMarker, InfectionInstance, InfectionPattern,
    InstanceRequest,
};
pub use parse::parse_pattern;
pub use registry::{VerifierEntry, VerifierRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("syntax error at {position}: expected {expected}, found {}", found.map_or("end of input".to_string(), |c| format!("{c:?}")))]
    Syntax { position: usize, expected: String, found: Option<char> },
    #[error("symbol {symbol:?} is not in the alphabet")]
    Alphabet { symbol: char, position: Option<usize> },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error("language exhausted: {requested} codes requested, {available} available")]
    LanguageExhausted { requested: usize, available: usize },
    #[error("no acceptable pattern after {attempts} attempts")]
    GenerationExhausted { attempts: usize },
}

/// Membership of `payload` in the language of `ast`.
pub fn accepts(dfa: &Dfa, payload: &str) -> bool {
    dfa.accepts(payload)
}
