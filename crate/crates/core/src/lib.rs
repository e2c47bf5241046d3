//! Contact tracing with infection patterns recorded on a hash-chained ledger.
//!
//! A confirmed case is turned into a regular-expression [`pattern`] whose
//! shortest words become one-time codes for the case's contacts. Patterns are
//! sealed into blocks of a SHA-256 [`ledger`]; clients in [`p2p`] count the
//! codes they hold to estimate infection risk. The [`orchestrator`] wires the
//! pieces together and [`api`] exposes it over HTTP.
//!
//! Probability math is generic over [`num::Probability`], implemented for
//! `f32`, `f64` and exact [`BigRational`].

pub mod api;
pub mod ledger;
pub mod num;
pub mod orchestrator;
pub mod p2p;
pub mod pattern;
pub mod rng;
pub mod surveillance;

pub use num_rational::BigRational;

pub use ledger::{Block, Chain, Digest};
pub use num::Probability;
pub use orchestrator::{Orchestrator, Scenario, ScenarioConfig};
pub use pattern::{Alphabet, Dfa, InfectionInstance, InfectionPattern, PatternAst};

pub type RiskEstimate32 = p2p::RiskEstimate<f32>;
pub type RiskEstimate64 = p2p::RiskEstimate<f64>;
pub type ExactRiskEstimate = p2p::RiskEstimate<BigRational>;
pub type Suspect64 = p2p::Suspect<f64>;
pub type WarningMessage64 = p2p::WarningMessage<f64>;
pub type RiskRegistry64 = p2p::RiskRegistry<f64>;
pub type ExactRiskRegistry = p2p::RiskRegistry<BigRational>;
