//! Simulated citizen clients: inboxes fed by infection-code notifications,
//! code verification, binomial self-risk, authority-side suspect ranking,
//! and in-cluster warning exchange.

mod inbox;
mod risk;
mod verify;
mod warnings;

use thiserror::Error;

pub use inbox::{ClientFleet, ClientInbox, Delivery, DeliveryReport, DeliveryStatus, InboxMessage};
pub use risk::{detect_suspects, risk_pmf, risk_score, RiskEstimate, RiskRegistry, Suspect, SuspectMode};
pub use verify::{verify_code, InfectionDetail};
pub use warnings::{exchange_warnings, WarningMessage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum P2pError {
    #[error("probability {0} is outside [0, 1]")]
    Domain(String),
    #[error("a cluster needs at least two distinct members, got {0}")]
    ClusterTooSmall(usize),
    #[error("unknown client {0:?}")]
    UnknownClient(String),
}
