use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::P2pError;
use crate::num::Probability;

/// Broadcast by a cluster member: who they are and their current risk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WarningMessage<T> {
    pub sender_id: String,
    pub risk: T,
    pub issued_at: u64,
}

/// Every member hears from every other member; each view is ranked by risk
/// (highest first, ties by sender id).
pub fn exchange_warnings<T: Probability>(
    cluster: &[String],
    risk_of: impl Fn(&str) -> Option<T>,
    now: u64,
) -> Result<BTreeMap<String, Vec<WarningMessage<T>>>, P2pError> {
    let members: BTreeSet<&str> = cluster.iter().map(String::as_str).collect();
    if members.len() < 2 {
        return Err(P2pError::ClusterTooSmall(members.len()));
    }
    let mut broadcasts = Vec::with_capacity(members.len());
    for &m in &members {
        let risk = risk_of(m).ok_or_else(|| P2pError::UnknownClient(m.to_string()))?;
        broadcasts.push(WarningMessage { sender_id: m.to_string(), risk, issued_at: now });
    }
    broadcasts.sort_by(|a, b| {
        b.risk.partial_cmp(&a.risk).unwrap_or(Ordering::Equal).then_with(|| a.sender_id.cmp(&b.sender_id))
    });
    Ok(members
        .iter()
        .map(|&m| (m.to_string(), broadcasts.iter().filter(|w| w.sender_id != m).cloned().collect()))
        .collect())
}
