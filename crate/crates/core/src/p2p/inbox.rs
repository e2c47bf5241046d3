use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::pattern::{ClassMarker, InfectionInstance};
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InboxMessage {
    pub code: String,
    pub received_at: u64,
    pub pattern_id: String,
}

/// Append-only, duplicate-free list of codes received by one client.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClientInbox {
    pub client_id: String,
    messages: Vec<InboxMessage>,
    #[serde(skip)]
    codes: HashSet<String>,
}

impl ClientInbox {
    pub fn new(client_id: impl Into<String>) -> Self {
        Self { client_id: client_id.into(), ..Default::default() }
    }

    pub fn messages(&self) -> &[InboxMessage] {
        &self.messages
    }

    /// Number of distinct codes.
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.codes.contains(code)
    }

    /// Returns `false` when the code was already present.
    pub fn push(&mut self, message: InboxMessage) -> bool {
        if !self.codes.insert(message.code.clone()) {
            return false;
        }
        self.messages.push(message);
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeliveryStatus {
    Delivered,
    Duplicate,
    PlaceRegistered,
    Dropped,
    UnknownRecipient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Delivery {
    pub code: String,
    pub recipient: String,
    pub status: DeliveryStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DeliveryReport {
    pub deliveries: Vec<Delivery>,
}

impl DeliveryReport {
    pub fn count(&self, status: DeliveryStatus) -> usize {
        self.deliveries.iter().filter(|d| d.status == status).count()
    }

    /// Recipients whose inbox changed.
    pub fn delivered_to(&self) -> impl Iterator<Item = &str> {
        self.deliveries
            .iter()
            .filter(|d| d.status == DeliveryStatus::Delivered)
            .map(|d| d.recipient.as_str())
    }
}

/// All client inboxes plus the registry of codes assigned to places.
///
/// Transport is in-process and reliable unless a drop rate is set, in which
/// case each person delivery is lost independently with that probability.
#[derive(Clone, Debug)]
pub struct ClientFleet {
    inboxes: BTreeMap<String, ClientInbox>,
    places: BTreeMap<String, ClientInbox>,
    drop_rate: f64,
    rng: ChaCha8Rng,
}

impl Default for ClientFleet {
    fn default() -> Self {
        Self::new(0.0, 0)
    }
}

impl ClientFleet {
    pub fn new(drop_rate: f64, seed: u64) -> Self {
        Self {
            inboxes: BTreeMap::new(),
            places: BTreeMap::new(),
            drop_rate: drop_rate.clamp(0.0, 1.0),
            rng: stream_rng(seed, 0x5_3e_4d),
        }
    }

    pub fn enroll(&mut self, client_id: &str) {
        self.inboxes.entry(client_id.to_string()).or_insert_with(|| ClientInbox::new(client_id));
    }

    pub fn inbox(&self, client_id: &str) -> Option<&ClientInbox> {
        self.inboxes.get(client_id)
    }

    pub fn inboxes(&self) -> impl Iterator<Item = &ClientInbox> {
        self.inboxes.values()
    }

    /// Codes assigned to a place.
    pub fn place_codes(&self, place_id: &str) -> Option<&ClientInbox> {
        self.places.get(place_id)
    }

    pub fn place_code_count(&self) -> usize {
        self.places.values().map(ClientInbox::len).sum()
    }

    /// Routes each instance by class: person codes to the subject's inbox,
    /// building codes to the place registry.
    pub fn notify<'a>(&mut self, instances: impl IntoIterator<Item = &'a InfectionInstance>, now: u64) -> DeliveryReport {
        let mut report = DeliveryReport::default();
        for inst in instances {
            let message =
                InboxMessage { code: inst.code.clone(), received_at: now, pattern_id: inst.pattern_id.clone() };
            let status = match inst.class_marker {
                ClassMarker::Building => {
                    let entry = self.places.entry(inst.subject_id.clone()).or_insert_with(|| ClientInbox::new(&inst.subject_id));
                    if entry.push(message) {
                        DeliveryStatus::PlaceRegistered
                    } else {
                        DeliveryStatus::Duplicate
                    }
                }
                ClassMarker::Person => match self.inboxes.get_mut(&inst.subject_id) {
                    None => DeliveryStatus::UnknownRecipient,
                    Some(_) if self.drop_rate > 0.0 && self.rng.random_bool(self.drop_rate) => DeliveryStatus::Dropped,
                    Some(inbox) => {
                        if inbox.push(message) {
                            DeliveryStatus::Delivered
                        } else {
                            DeliveryStatus::Duplicate
                        }
                    }
                },
            };
            report.deliveries.push(Delivery { code: inst.code.clone(), recipient: inst.subject_id.clone(), status });
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(code: &str, subject: &str) -> InfectionInstance {
        InfectionInstance {
            code: code.into(),
            class_marker: ClassMarker::from_char(code.chars().next().unwrap()).unwrap(),
            pattern_id: "IP000001".into(),
            subject_id: subject.into(),
            rank: 0,
            exposed_at: None,
        }
    }

    fn fleet(ids: &[&str]) -> ClientFleet {
        let mut f = ClientFleet::default();
        ids.iter().for_each(|id| f.enroll(id));
        f
    }

    #[test]
    fn delivers_to_each_subject() {
        let mut f = fleet(&["x", "y", "z"]);
        let r = f.notify(&[inst("Pabc", "x"), inst("Pabbc", "y"), inst("Pabbbc", "z")], 5);
        assert_eq!(r.count(DeliveryStatus::Delivered), 3);
        assert_eq!(f.inbox("y").unwrap().messages()[0].code, "Pabbc");
        assert_eq!(f.inbox("y").unwrap().messages()[0].received_at, 5);
    }

    #[test]
    fn duplicates_are_dropped_silently() {
        let mut f = fleet(&["x"]);
        f.notify(&[inst("Pabc", "x")], 0);
        let r = f.notify(&[inst("Pabc", "x")], 1);
        assert_eq!(r.deliveries[0].status, DeliveryStatus::Duplicate);
        assert_eq!(f.inbox("x").unwrap().len(), 1);
    }

    #[test]
    fn building_codes_bypass_inboxes() {
        let mut f = fleet(&["x"]);
        let r = f.notify(&[inst("Babc", "mall")], 0);
        assert_eq!(r.deliveries[0].status, DeliveryStatus::PlaceRegistered);
        assert!(f.inbox("x").unwrap().is_empty());
        assert_eq!(f.place_codes("mall").unwrap().len(), 1);
    }

    #[test]
    fn unknown_recipient_is_reported_not_fatal() {
        let mut f = fleet(&["x"]);
        let r = f.notify(&[inst("Pabc", "ghost"), inst("Pabbc", "x")], 0);
        assert_eq!(r.deliveries[0].status, DeliveryStatus::UnknownRecipient);
        assert_eq!(r.deliveries[1].status, DeliveryStatus::Delivered);
    }

    #[test]
    fn full_drop_rate_loses_everything() {
        let mut f = ClientFleet::new(1.0, 3);
        f.enroll("x");
        let r = f.notify(&[inst("Pabc", "x")], 0);
        assert_eq!(r.count(DeliveryStatus::Dropped), 1);
        assert!(f.inbox("x").unwrap().is_empty());
    }
}
