use std::fmt;

use serde::{Deserialize, Serialize};

use super::PatternError;

/// Characters with grammatical meaning; never allowed as literals.
pub const METACHARACTERS: [char; 5] = ['|', '*', '+', '(', ')'];

/// Class markers prepended to payloads; reserved out of every alphabet.
pub const CLASS_MARKERS: [char; 2] = ['P', 'B'];

/// Ordered, duplicate-free set of ASCII symbols a pattern is written over.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self, PatternError> {
        let mut symbols: Vec<char> = symbols.into_iter().collect();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(PatternError::InvalidAlphabet("alphabet is empty".into()));
        }
        for &c in &symbols {
            if !c.is_ascii_graphic() {
                return Err(PatternError::InvalidAlphabet(format!(
                    "symbol {c:?} is not a printable ASCII character"
                )));
            }
            if METACHARACTERS.contains(&c) || CLASS_MARKERS.contains(&c) {
                return Err(PatternError::InvalidAlphabet(format!("symbol {c:?} is reserved")));
            }
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    /// Position of `c` in symbol order.
    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.binary_search(&c).ok()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self { symbols: vec!['0', '1', 'a', 'b', 'c'] }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

impl TryFrom<String> for Alphabet {
    type Error = PatternError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Self::new(s.chars())
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> Self {
        a.to_string()
    }
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Literal(char),
    /// Two or more factors in sequence.
    Concat(Vec<Node>),
    /// Two or more alternatives.
    Union(Vec<Node>),
    /// Zero or more repetitions.
    Star(Box<Node>),
    /// One or more repetitions.
    Plus(Box<Node>),
}

impl Node {
    pub fn star(inner: Node) -> Self {
        Node::Star(Box::new(inner))
    }

    pub fn plus(inner: Node) -> Self {
        Node::Plus(Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Literal(_) => 1,
            Node::Concat(xs) | Node::Union(xs) => 1 + xs.iter().map(Node::depth).max().unwrap_or(0),
            Node::Star(x) | Node::Plus(x) => 1 + x.depth(),
        }
    }

    fn check_shape(&self, alphabet: &Alphabet) -> Result<(), PatternError> {
        match self {
            Node::Literal(c) if !alphabet.contains(*c) => Err(PatternError::Alphabet {
                symbol: *c,
                position: None,
            }),
            Node::Literal(_) => Ok(()),
            Node::Concat(xs) | Node::Union(xs) => {
                if xs.len() < 2 {
                    return Err(PatternError::Malformed(
                        "concatenation and union need at least two children".into(),
                    ));
                }
                xs.iter().try_for_each(|x| x.check_shape(alphabet))
            }
            Node::Star(x) | Node::Plus(x) => x.check_shape(alphabet),
        }
    }

    // Binding strength: union 0, concat 1, postfix/atom 2.
    fn precedence(&self) -> u8 {
        match self {
            Node::Union(_) => 0,
            Node::Concat(_) => 1,
            _ => 2,
        }
    }

    fn write_child(&self, child: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // A child of the same or looser binding gets parentheses, which keeps
        // nested concatenations and unions distinct after a reparse.
        let needs_parens = match self {
            Node::Star(_) | Node::Plus(_) => child.precedence() < 2,
            _ => child.precedence() <= self.precedence(),
        };
        if needs_parens {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Literal(c) => write!(f, "{c}"),
            Node::Concat(xs) => xs.iter().try_for_each(|x| self.write_child(x, f)),
            Node::Union(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    self.write_child(x, f)?;
                }
                Ok(())
            }
            Node::Star(x) => {
                self.write_child(x, f)?;
                f.write_str("*")
            }
            Node::Plus(x) => {
                self.write_child(x, f)?;
                f.write_str("+")
            }
        }
    }
}

/// A validated expression together with the alphabet it is written over.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternAst {
    root: Node,
    alphabet: Alphabet,
}

impl PatternAst {
    pub fn new(root: Node, alphabet: Alphabet) -> Result<Self, PatternError> {
        root.check_shape(&alphabet)?;
        Ok(Self { root, alphabet })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Canonical source text; parses back to an identical tree.
    pub fn source_text(&self) -> String {
        self.root.to_string()
    }
}

impl fmt::Display for PatternAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}
