//! Shortlex enumeration of a DFA's language.

use super::dfa::Dfa;

/// Yields accepted strings shortest first, lexicographic (alphabet order)
/// within a length. Terminates for finite languages.
pub struct Shortlex<'a> {
    dfa: &'a Dfa,
    // exact[r][s]: some accepted string of length exactly r starts at s.
    exact: Vec<Vec<bool>>,
    len: usize,
    max_len: Option<usize>,
    stack: Vec<(usize, usize)>,
    buf: String,
}

impl<'a> Shortlex<'a> {
    pub fn new(dfa: &'a Dfa) -> Self {
        // A finite language has no string longer than the state count.
        let max_len = dfa.is_finite().then(|| dfa.state_count());
        let exact = vec![(0..dfa.state_count()).map(|s| dfa.is_accepting(s)).collect()];
        Self { dfa, exact, len: 0, max_len, stack: Vec::new(), buf: String::new() }
    }

    fn exact_row(&mut self, r: usize) -> &[bool] {
        let k = self.dfa.alphabet().len();
        while self.exact.len() <= r {
            let prev = self.exact.last().unwrap();
            let row = (0..self.dfa.state_count())
                .map(|s| (0..k).any(|t| prev[self.dfa.next(s, t)]))
                .collect();
            self.exact.push(row);
        }
        &self.exact[r]
    }
}

impl Iterator for Shortlex<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        let symbols = self.dfa.alphabet().symbols();
        loop {
            if self.stack.is_empty() {
                if self.max_len.is_some_and(|m| self.len > m) {
                    return None;
                }
                let (len, start) = (self.len, self.dfa.start());
                if self.exact_row(len)[start] {
                    self.stack.push((self.dfa.start(), 0));
                    self.buf.clear();
                } else {
                    self.len += 1;
                    continue;
                }
            }

            let remaining = self.len - self.buf.len();
            if remaining == 0 {
                let word = self.buf.clone();
                self.stack.pop();
                self.buf.pop();
                if self.stack.is_empty() {
                    self.len += 1;
                }
                return Some(word);
            }

            self.exact_row(remaining - 1);
            let (state, from) = *self.stack.last().unwrap();
            let found = (from..symbols.len())
                .find(|&t| self.exact[remaining - 1][self.dfa.next(state, t)]);
            match found {
                Some(t) => {
                    self.stack.last_mut().unwrap().1 = t + 1;
                    self.stack.push((self.dfa.next(state, t), 0));
                    self.buf.push(symbols[t]);
                }
                None => {
                    self.stack.pop();
                    self.buf.pop();
                    if self.stack.is_empty() {
                        self.len += 1;
                    }
                }
            }
        }
    }
}

/// Strings of `dfa`'s language in shortlex order.
pub fn shortlex(dfa: &Dfa) -> Shortlex<'_> {
    Shortlex::new(dfa)
}

/// `a` strictly precedes `b` in shortlex order.
pub fn shortlex_less(a: &str, b: &str) -> bool {
    // Alphabets are sorted ASCII, so byte order equals symbol order.
    (a.len(), a.as_bytes()) < (b.len(), b.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{compile, parse_pattern, Alphabet};

    fn words(text: &str, alphabet: &str, n: usize) -> Vec<String> {
        let dfa = compile(&parse_pattern(text, &Alphabet::new(alphabet.chars()).unwrap()).unwrap());
        shortlex(&dfa).take(n).collect()
    }

    #[test]
    fn one_or_more_b_order() {
        assert_eq!(words("ab+c", "abc", 4), ["abc", "abbc", "abbbc", "abbbbc"]);
    }

    #[test]
    fn star_includes_empty_first() {
        assert_eq!(words("(a|b)*", "ab", 7), ["", "a", "b", "aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn finite_language_terminates() {
        assert_eq!(words("a(b|c)|0", "abc0", 100), ["0", "ab", "ac"]);
        assert_eq!(words("a", "abc", 100), ["a"]);
    }

    #[test]
    fn gaps_between_lengths() {
        assert_eq!(words("(aa)+", "ab", 3), ["aa", "aaaa", "aaaaaa"]);
    }

    #[test]
    fn shortlex_comparison() {
        assert!(shortlex_less("b", "aa"));
        assert!(shortlex_less("ab", "ba"));
        assert!(!shortlex_less("ab", "ab"));
    }
}
