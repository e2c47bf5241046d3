//! Binomial infection risk.
//!
//! With `N` distinct codes in an inbox and a per-contact transmission
//! probability `p`, the number of transmitting contacts is `Binomial(N, p)`:
//!
//! ```text
//! P(X = x) = N! / (x! (N - x)!) * p^x * (1 - p)^(N - x)
//! ```
//!
//! The headline risk is `P(X >= 1) = 1 - (1 - p)^N`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use super::inbox::ClientInbox;
use super::P2pError;
use crate::num::Probability;

/// `P(X = x)` for `x = 0..=n`.
pub fn risk_pmf<T: Probability>(n: u64, p: T) -> Result<Vec<T>, P2pError> {
    if !p.is_unit_interval() {
        return Err(P2pError::Domain(format!("{p:?}")));
    }
    Ok(T::binomial_pmf(n, &p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiskEstimate<T> {
    pub client_id: String,
    pub n_codes: u64,
    pub p_per_contact: T,
    pub pmf: Vec<T>,
    /// `P(X >= 1)`
    pub risk: T,
    /// Most likely number of transmitting contacts.
    pub mode: u64,
}

impl<T: Probability> RiskEstimate<T> {
    pub fn from_count(client_id: impl Into<String>, n_codes: u64, p: T) -> Result<Self, P2pError> {
        let pmf = risk_pmf(n_codes, p.clone())?;
        let risk = T::one() - pmf[0].clone();
        let mode = pmf
            .iter()
            .enumerate()
            .fold((0usize, &pmf[0]), |best, (x, m)| if *m > *best.1 { (x, m) } else { best })
            .0 as u64;
        Ok(Self { client_id: client_id.into(), n_codes, p_per_contact: p, pmf, risk, mode })
    }
}

pub fn risk_score<T: Probability>(inbox: &ClientInbox, p: T) -> Result<RiskEstimate<T>, P2pError> {
    RiskEstimate::from_count(inbox.client_id.clone(), inbox.len() as u64, p)
}

/// Latest estimate per client, recomputed only for inboxes that changed.
#[derive(Clone, Debug)]
pub struct RiskRegistry<T> {
    p_per_contact: T,
    estimates: BTreeMap<String, RiskEstimate<T>>,
}

impl<T: Probability> RiskRegistry<T> {
    pub fn new(p_per_contact: T) -> Result<Self, P2pError> {
        if !p_per_contact.is_unit_interval() {
            return Err(P2pError::Domain(format!("{p_per_contact:?}")));
        }
        Ok(Self { p_per_contact, estimates: BTreeMap::new() })
    }

    pub fn p_per_contact(&self) -> &T {
        &self.p_per_contact
    }

    pub fn update(&mut self, inbox: &ClientInbox) {
        let stale = self.estimates.get(&inbox.client_id).is_none_or(|e| e.n_codes != inbox.len() as u64);
        if stale {
            let estimate = risk_score(inbox, self.p_per_contact.clone()).expect("p validated at construction");
            self.estimates.insert(inbox.client_id.clone(), estimate);
        }
    }

    pub fn get(&self, client_id: &str) -> Option<&RiskEstimate<T>> {
        self.estimates.get(client_id)
    }

    /// Estimates in client-id order.
    pub fn estimates(&self) -> impl Iterator<Item = &RiskEstimate<T>> {
        self.estimates.values()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SuspectMode<T> {
    /// Keep clients with `risk >= threshold`.
    Threshold(T),
    /// Keep the `k` highest.
    TopK(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Suspect<T> {
    pub client_id: String,
    pub risk: T,
    pub n_codes: u64,
}

/// Clients by risk, highest first, ties broken by ascending client id.
pub fn detect_suspects<'a, T: Probability + 'a>(
    estimates: impl IntoIterator<Item = &'a RiskEstimate<T>>,
    mode: &SuspectMode<T>,
) -> Vec<Suspect<T>> {
    let mut ranked: Vec<&RiskEstimate<T>> = estimates.into_iter().collect();
    ranked.sort_by(|a, b| {
        b.risk
            .partial_cmp(&a.risk)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.client_id.cmp(&b.client_id))
    });
    let kept: Vec<&RiskEstimate<T>> = match mode {
        SuspectMode::Threshold(tau) => ranked.into_iter().filter(|e| e.risk >= *tau).collect(),
        SuspectMode::TopK(k) => ranked.into_iter().take(*k).collect(),
    };
    kept.into_iter()
        .map(|e| Suspect { client_id: e.client_id.clone(), risk: e.risk.clone(), n_codes: e.n_codes })
        .collect()
}
