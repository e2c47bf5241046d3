//! Thompson construction followed by subset construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ast::{Alphabet, Node, PatternAst};

/// Complete deterministic automaton over a pattern's alphabet.
///
/// State 0 is the start state. The transition table is dense: one entry per
/// `(state, symbol)` pair, with the empty subset acting as the dead state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    transitions: Vec<usize>,
    accepting: Vec<bool>,
}

impl Dfa {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// Successor of `state` on the symbol at `symbol_index` in the alphabet.
    pub fn next(&self, state: usize, symbol_index: usize) -> usize {
        self.transitions[state * self.alphabet.len() + symbol_index]
    }

    /// Membership test. Symbols outside the alphabet reject rather than error.
    pub fn accepts(&self, payload: &str) -> bool {
        let mut state = self.start();
        for c in payload.chars() {
            match self.alphabet.index_of(c) {
                Some(i) => state = self.next(state, i),
                None => return false,
            }
        }
        self.accepting[state]
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let k = self.alphabet.len();
        let mut live = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..self.state_count() {
                if !live[s] && (0..k).any(|t| live[self.next(s, t)]) {
                    live[s] = true;
                    changed = true;
                }
            }
        }
        live
    }

    /// `true` when the accepted language has finitely many strings.
    pub fn is_finite(&self) -> bool {
        // Subset construction only yields reachable states, so a language is
        // infinite exactly when a cycle runs through live states.
        let live = self.live_states();
        let k = self.alphabet.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.state_count()];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        if !live[self.start()] {
            return true;
        }
        stack.push((self.start(), 0));
        color[self.start()] = 1;
        while let Some(frame) = stack.last_mut() {
            let (s, t) = *frame;
            if t == k {
                color[s] = 2;
                stack.pop();
                continue;
            }
            frame.1 += 1;
            let n = self.next(s, t);
            if !live[n] {
                continue;
            }
            match color[n] {
                0 => {
                    color[n] = 1;
                    stack.push((n, 0));
                }
                1 => return false,
                _ => {}
            }
        }
        true
    }

    /// Language equality by breadth-first search over the product automaton.
    /// Alphabets must match.
    pub fn equivalent(&self, other: &Dfa) -> bool {
        if self.alphabet != other.alphabet {
            return false;
        }
        let k = self.alphabet.len();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([(self.start(), other.start())]);
        seen.insert((self.start(), other.start()));
        while let Some((a, b)) = queue.pop_front() {
            if self.accepting[a] != other.accepting[b] {
                return false;
            }
            for t in 0..k {
                let pair = (self.next(a, t), other.next(b, t));
                if seen.insert(pair) {
                    queue.push_back(pair);
                }
            }
        }
        true
    }
}

/// Compiles a pattern into a complete DFA accepting exactly its language.
pub fn compile(ast: &PatternAst) -> Dfa {
    let alphabet = ast.alphabet().clone();
    let mut nfa = Nfa::default();
    let (start, accept) = nfa.build(ast.root(), &alphabet);
    determinize(&nfa, start, accept, alphabet)
}

#[derive(Default)]
struct Nfa {
    // Per state: epsilon successors and (symbol index, successor) edges.
    epsilon: Vec<Vec<usize>>,
    edges: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.epsilon.push(Vec::new());
        self.edges.push(Vec::new());
        self.epsilon.len() - 1
    }

    /// Returns the (entry, exit) states of the fragment for `node`.
    fn build(&mut self, node: &Node, alphabet: &Alphabet) -> (usize, usize) {
        match node {
            Node::Literal(c) => {
                let (s, t) = (self.state(), self.state());
                let symbol = alphabet.index_of(*c).expect("literal validated against alphabet");
                self.edges[s].push((symbol, t));
                (s, t)
            }
            Node::Concat(parts) => {
                let mut fragments = parts.iter().map(|p| self.build(p, alphabet)).collect::<Vec<_>>();
                for pair in fragments.windows(2) {
                    self.epsilon[pair[0].1].push(pair[1].0);
                }
                let last = fragments.pop().unwrap();
                (fragments.first().map_or(last.0, |f| f.0), last.1)
            }
            Node::Union(parts) => {
                let (s, t) = (self.state(), self.state());
                for p in parts {
                    let (ps, pt) = self.build(p, alphabet);
                    self.epsilon[s].push(ps);
                    self.epsilon[pt].push(t);
                }
                (s, t)
            }
            Node::Star(inner) | Node::Plus(inner) => {
                let (s, t) = (self.state(), self.state());
                let (is, it) = self.build(inner, alphabet);
                self.epsilon[s].push(is);
                self.epsilon[it].push(is);
                self.epsilon[it].push(t);
                if matches!(node, Node::Star(_)) {
                    self.epsilon[s].push(t);
                }
                (s, t)
            }
        }
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if set.insert(s) {
                stack.extend(self.epsilon[s].iter().copied());
            }
        }
        set
    }
}

fn determinize(nfa: &Nfa, start: usize, accept: usize, alphabet: Alphabet) -> Dfa {
    let k = alphabet.len();
    let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
    let mut transitions = Vec::new();

    let initial = nfa.closure([start]);
    ids.insert(initial.clone(), 0);
    subsets.push(initial);

    let mut i = 0;
    while i < subsets.len() {
        for symbol in 0..k {
            let moved = subsets[i]
                .iter()
                .flat_map(|&s| nfa.edges[s].iter())
                .filter(|&&(t, _)| t == symbol)
                .map(|&(_, dst)| dst);
            let target = nfa.closure(moved);
            let id = match ids.get(&target) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    ids.insert(target.clone(), id);
                    subsets.push(target);
                    id
                }
            };
            transitions.push(id);
        }
        i += 1;
    }

    let accepting = subsets.iter().map(|s| s.contains(&accept)).collect();
    Dfa { alphabet, transitions, accepting }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;

    fn dfa(text: &str, alphabet: &str) -> Dfa {
        compile(&parse_pattern(text, &Alphabet::new(alphabet.chars()).unwrap()).unwrap())
    }

    #[test]
    fn one_or_more_b() {
        let d = dfa("ab+c", "abc");
        assert!(d.accepts("abc"));
        assert!(d.accepts("abbbbc"));
        assert!(!d.accepts("ac"));
        assert!(!d.accepts("abcc"));
        assert!(!d.accepts(""));
    }

    #[test]
    fn single_literal_rejects_empty() {
        let d = dfa("a", "abc");
        assert!(!d.accepts(""));
        assert!(d.accepts("a"));
        assert!(d.is_finite());
    }

    #[test]
    fn foreign_symbols_reject() {
        let d = dfa("a*", "abc");
        assert!(d.accepts("aaa"));
        assert!(!d.accepts("aza"));
        assert!(!d.accepts("Pa"));
    }

    #[test]
    fn table_is_complete() {
        let d = dfa("(0|1)*1", "01");
        assert_eq!(d.transitions.len(), d.state_count() * 2);
        assert!(d.transitions.iter().all(|&t| t < d.state_count()));
        assert!(d.accepts("0101"));
        assert!(!d.accepts("0110"));
    }

    #[test]
    fn finiteness() {
        assert!(!dfa("ab+c", "abc").is_finite());
        assert!(dfa("a(b|c)", "abc").is_finite());
        assert!(!dfa("a*b", "ab").is_finite());
        // star over a dead branch does not make the language infinite
        assert!(dfa("ab", "ab").is_finite());
    }

    #[test]
    fn equivalence() {
        assert!(dfa("a+", "ab").equivalent(&dfa("aa*", "ab")));
        assert!(dfa("(a|b)*", "ab").equivalent(&dfa("(a*b*)*", "ab")));
        assert!(!dfa("a*", "ab").equivalent(&dfa("a+", "ab")));
    }
}
