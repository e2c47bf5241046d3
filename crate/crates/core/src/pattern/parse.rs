//! Recursive-descent parser for the pattern grammar.
//!
//! ```text
//! union   := concat ('|' concat)*
//! concat  := postfix postfix*
//! postfix := atom ('*' | '+')*
//! atom    := symbol | '(' union ')'
//! ```

use std::iter::Peekable;
use std::str::CharIndices;

use super::ast::{Alphabet, Node, PatternAst, METACHARACTERS};
use super::PatternError;

/// Parses `text` over `alphabet`.
pub fn parse_pattern(text: &str, alphabet: &Alphabet) -> Result<PatternAst, PatternError> {
    let mut parser = Parser { chars: text.char_indices().peekable(), alphabet, len: text.len() };
    let root = parser.union()?;
    if let Some((position, c)) = parser.chars.next() {
        return Err(PatternError::Syntax {
            position,
            expected: if c == ')' { "end of input (unbalanced ')')" } else { "end of input" }.into(),
            found: Some(c),
        });
    }
    PatternAst::new(root, alphabet.clone())
}

struct Parser<'a> {
    chars: Peekable<CharIndices<'a>>,
    alphabet: &'a Alphabet,
    len: usize,
}

impl Parser<'_> {
    fn position(&mut self) -> usize {
        self.chars.peek().map_or(self.len, |&(i, _)| i)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn starts_atom(c: char) -> bool {
        c == '(' || !METACHARACTERS.contains(&c)
    }

    fn union(&mut self) -> Result<Node, PatternError> {
        let mut alternatives = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.chars.next();
            alternatives.push(self.concat()?);
        }
        Ok(if alternatives.len() == 1 { alternatives.pop().unwrap() } else { Node::Union(alternatives) })
    }

    fn concat(&mut self) -> Result<Node, PatternError> {
        let mut factors = vec![self.postfix()?];
        while self.peek().is_some_and(Self::starts_atom) {
            factors.push(self.postfix()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Node::Concat(factors) })
    }

    fn postfix(&mut self) -> Result<Node, PatternError> {
        let mut node = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => node = Node::star(node),
                Some('+') => node = Node::plus(node),
                _ => return Ok(node),
            }
            self.chars.next();
        }
    }

    fn atom(&mut self) -> Result<Node, PatternError> {
        let position = self.position();
        match self.chars.next() {
            Some((_, '(')) => {
                let inner = self.union()?;
                match self.chars.next() {
                    Some((_, ')')) => Ok(inner),
                    other => Err(PatternError::Syntax {
                        position: other.map_or(self.len, |(i, _)| i),
                        expected: "')'".into(),
                        found: other.map(|(_, c)| c),
                    }),
                }
            }
            Some((_, c)) if !METACHARACTERS.contains(&c) => {
                if self.alphabet.contains(c) {
                    Ok(Node::Literal(c))
                } else {
                    Err(PatternError::Alphabet { symbol: c, position: Some(position) })
                }
            }
            other => Err(PatternError::Syntax {
                position,
                expected: "symbol or '('".into(),
                found: other.map(|(_, c)| c),
            }),
        }
    }
}
