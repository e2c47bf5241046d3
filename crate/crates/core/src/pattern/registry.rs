//! Infection verifier: one compiled automaton per registered pattern, plus
//! the index of codes that have been dispatched.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::dfa::Dfa;
use super::instance::{InfectionInstance, InfectionPattern};

#[derive(Clone, Debug)]
pub struct VerifierEntry {
    pub pattern: InfectionPattern,
    pub dfa: Arc<Dfa>,
}

#[derive(Clone, Debug, Default)]
pub struct VerifierRegistry {
    entries: BTreeMap<String, VerifierEntry>,
    by_case: BTreeMap<String, String>,
    texts: HashSet<String>,
    codes: BTreeMap<String, InfectionInstance>,
}

impl VerifierRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Compiles and registers `pattern`. Returns `None` if its id or case is
    /// already registered.
    pub fn register(&mut self, pattern: InfectionPattern) -> Option<Arc<Dfa>> {
        if self.entries.contains_key(&pattern.pattern_id) || self.by_case.contains_key(&pattern.case_id) {
            return None;
        }
        let dfa = Arc::new(pattern.compile());
        self.by_case.insert(pattern.case_id.clone(), pattern.pattern_id.clone());
        self.texts.insert(pattern.source_text.clone());
        self.entries
            .insert(pattern.pattern_id.clone(), VerifierEntry { pattern, dfa: Arc::clone(&dfa) });
        Some(dfa)
    }

    /// Removes a pattern and every code dispatched for it.
    pub fn unregister(&mut self, pattern_id: &str) -> Option<VerifierEntry> {
        let entry = self.entries.remove(pattern_id)?;
        self.by_case.remove(&entry.pattern.case_id);
        self.texts.remove(&entry.pattern.source_text);
        self.codes.retain(|_, i| i.pattern_id != pattern_id);
        Some(entry)
    }

    pub fn record_instances<'a>(&mut self, instances: impl IntoIterator<Item = &'a InfectionInstance>) {
        for i in instances {
            self.codes.insert(i.code.clone(), i.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_case(&self, case_id: &str) -> bool {
        self.by_case.contains_key(case_id)
    }

    pub fn has_source_text(&self, text: &str) -> bool {
        self.texts.contains(text)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.codes.contains_key(code)
    }

    pub fn entry(&self, pattern_id: &str) -> Option<&VerifierEntry> {
        self.entries.get(pattern_id)
    }

    pub fn entry_for_case(&self, case_id: &str) -> Option<&VerifierEntry> {
        self.entries.get(self.by_case.get(case_id)?)
    }

    pub fn entries(&self) -> impl Iterator<Item = &VerifierEntry> {
        self.entries.values()
    }

    pub fn instance(&self, code: &str) -> Option<&InfectionInstance> {
        self.codes.get(code)
    }

    pub fn instances(&self) -> impl Iterator<Item = &InfectionInstance> {
        self.codes.values()
    }

    /// Registered patterns whose language contains `payload`, by pattern id.
    pub fn matching<'a>(&'a self, payload: &'a str) -> impl Iterator<Item = &'a VerifierEntry> + 'a {
        self.entries.values().filter(move |e| e.dfa.accepts(payload))
    }
}
