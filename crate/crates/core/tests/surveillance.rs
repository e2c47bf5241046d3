mod support;

use std::collections::BTreeMap;

use covchain::surveillance::{
    ContactEvent, Surveillance, SurveillanceConfig, SurveillanceError, TrackingRequest,
};
use proptest::prelude::*;
use support::scan_contacts;

const PEOPLE: [&str; 5] = ["p0", "p1", "p2", "p3", "p4"];
const PLACES: [&str; 2] = ["mall", "gym"];

fn event_strategy() -> impl Strategy<Value = ContactEvent> {
    (0u64..2_000, 0usize..5, 0usize..7, 1u64..900).prop_filter_map("self contact", |(at, a, b, d)| {
        if b < 5 {
            (a != b).then(|| ContactEvent::person(at, PEOPLE[a], PEOPLE[b], d))
        } else {
            Some(ContactEvent::place(at, PEOPLE[a], PLACES[b - 5], d))
        }
    })
}

fn as_map(sightings: &[covchain::surveillance::Sighting]) -> BTreeMap<String, u64> {
    sightings.iter().map(|s| (s.id.clone(), s.first_at)).collect()
}

proptest! {
    #[test]
    fn tracker_matches_full_scan(
        events in prop::collection::vec(event_strategy(), 0..60),
        now in 0u64..2_500,
        window in 1u64..2_500,
        min_contact in 0u64..600,
    ) {
        let mut s = Surveillance::new(SurveillanceConfig { min_contact_s: min_contact, window_s: window });
        PEOPLE.iter().for_each(|p| s.enroll(p));
        s.ingest(events.clone());
        for case in PEOPLE {
            let report = s.track(case, now, window).unwrap();
            let (contacts, places) = scan_contacts(&events, case, now, window, min_contact);
            prop_assert_eq!(as_map(&report.contacts), contacts);
            prop_assert_eq!(as_map(&report.places), places);
            prop_assert!(!report.contact_ids().contains(&case));
            let order: Vec<_> = report.contacts.iter().map(|c| (c.first_at, c.id.clone())).collect();
            let mut sorted = order.clone();
            sorted.sort();
            prop_assert_eq!(order, sorted);
        }
    }

    #[test]
    fn jsonl_round_trip(events in prop::collection::vec(event_strategy(), 0..30)) {
        let text: String = events.iter().map(|e| serde_json::to_string(e).unwrap() + "\n").collect();
        let mut a = Surveillance::default();
        let mut b = Surveillance::default();
        let n = a.ingest_events(&text).unwrap();
        prop_assert_eq!(n, b.ingest(events));
        prop_assert_eq!(a.events(), b.events());
    }
}

#[test]
fn window_bounds_are_inclusive() {
    let mut s = Surveillance::new(SurveillanceConfig { min_contact_s: 300, window_s: 100 });
    s.ingest([
        ContactEvent::person(100, "c", "early", 300),
        ContactEvent::person(200, "c", "late", 300),
        ContactEvent::person(99, "c", "gone", 300),
        ContactEvent::person(201, "c", "future", 300),
        ContactEvent::person(150, "c", "brief", 299),
    ]);
    let r = s.track("c", 200, 100).unwrap();
    assert_eq!(r.contact_ids(), ["early", "late"]);
    assert_eq!(r.window, (100, 200));
}

#[test]
fn schema_errors_name_the_line() {
    let mut s = Surveillance::default();
    let bad = "{\"at\":1,\"kind\":\"pp\",\"a\":\"x\",\"b\":\"y\",\"duration_s\":400}\n\n{\"at\":2,\"kind\":\"zz\",\"a\":\"x\",\"b\":\"y\",\"duration_s\":1}\n";
    assert!(matches!(s.ingest_events(bad), Err(SurveillanceError::Schema { line: 3, .. })));
    // Nothing from a rejected batch is kept.
    assert!(s.events().is_empty());
    let zero = "{\"at\":1,\"kind\":\"pp\",\"a\":\"x\",\"b\":\"y\",\"duration_s\":0}";
    assert!(matches!(s.ingest_events(zero), Err(SurveillanceError::Schema { line: 1, .. })));
    let extra = "{\"at\":1,\"kind\":\"pp\",\"a\":\"x\",\"b\":\"y\",\"duration_s\":5,\"rssi\":3}";
    assert!(matches!(s.ingest_events(extra), Err(SurveillanceError::Schema { line: 1, .. })));
    let selfie = "{\"at\":1,\"kind\":\"pp\",\"a\":\"x\",\"b\":\"x\",\"duration_s\":5}";
    assert!(matches!(s.ingest_events(selfie), Err(SurveillanceError::Schema { line: 1, .. })));
}

#[test]
fn unknown_person_and_empty_window() {
    let s = Surveillance::default();
    assert!(matches!(s.track("nobody", 0, 10), Err(SurveillanceError::UnknownPerson(_))));
    let mut s = Surveillance::default();
    s.enroll("x");
    assert!(matches!(s.track("x", 0, 0), Err(SurveillanceError::EmptyWindow)));
    assert!(s.track("x", 0, 10).unwrap().contacts.is_empty());
}

#[test]
fn feedback_answers_each_request_once() {
    let mut s = Surveillance::default();
    s.enroll("c");
    let id = s.submit(TrackingRequest { case_id: "c".into(), requested_at: 0 });
    let report = s.track("c", 0, 10).unwrap();
    let msg = s.feedback(report.clone(), id).unwrap();
    assert_eq!(msg.request_id, id);
    assert!(matches!(s.feedback(report.clone(), id), Err(SurveillanceError::UnknownRequest(_))));
    let other = s.submit(TrackingRequest { case_id: "c".into(), requested_at: 1 });
    assert_ne!(other, id);
    assert!(s.cancel(other).is_some());
    assert!(s.feedback(report, other).is_err());
}
