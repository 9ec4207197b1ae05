//! Propositional formulas and their text grammar.
//!
//! ```text
//! formula     := disjunction ( "→" formula )?          right-associative
//! disjunction := conjunction ( "∨" conjunction )*
//! conjunction := unary ( "∧" unary )*
//! unary       := "¬" unary | atom | "(" formula ")"
//! atom        := "A" ... "Z"
//! ```
//!
//! ASCII spellings are accepted on input (`->`, `=>`, `|`, `\/`, `&`, `/\`,
//! `~`, `!`). Printing always uses the Unicode connectives and wraps every
//! binary connective in parentheses, so `parse(print(f)) == f`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One of the 26 propositional atoms `A`..`Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(u8);

impl Atom {
    pub const COUNT: u8 = 26;

    pub fn new(index: u8) -> Option<Atom> {
        (index < Self::COUNT).then_some(Atom(index))
    }

    pub fn from_char(c: char) -> Option<Atom> {
        c.is_ascii_uppercase().then(|| Atom(c as u8 - b'A'))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn as_char(self) -> char {
        (b'A' + self.0) as char
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(c: char) -> Formula {
        Formula::Atom(Atom::from_char(c).expect("atom must be A..Z"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    /// All subformulas in pre-order, including `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Atom(_) => {}
                Formula::Not(g) => stack.push(g),
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{}", a.as_char()),
            Formula::Not(g) => write!(f, "¬{g}"),
            Formula::And(l, r) => write!(f, "({l} ∧ {r})"),
            Formula::Or(l, r) => write!(f, "({l} ∨ {r})"),
            Formula::Implies(l, r) => write!(f, "({l} → {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {column}: {message}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Atom(Atom),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Atom(a) => write!(f, "atom {}", a.as_char()),
            Tok::Not => f.write_str("'¬'"),
            Tok::And => f.write_str("'∧'"),
            Tok::Or => f.write_str("'∨'"),
            Tok::Implies => f.write_str("'→'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            'A'..='Z' => (Tok::Atom(Atom::from_char(c).unwrap()), 1),
            '¬' | '~' | '!' => (Tok::Not, 1),
            '∧' | '&' => (Tok::And, 1),
            '∨' | '|' => (Tok::Or, 1),
            '→' => (Tok::Implies, 1),
            '/' if next == Some('\\') => (Tok::And, 2),
            '\\' if next == Some('/') => (Tok::Or, 2),
            '-' | '=' if next == Some('>') => (Tok::Implies, 2),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            other => {
                return Err(ParseError {
                    column: col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        toks.push((tok, col));
        i += width;
    }
    toks.push((Tok::End, chars.len() + 1));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Tok {
        self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            column: self.column(),
            message: format!("expected {expected}, found {}", self.peek()),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Atom(a) => {
                self.bump();
                Ok(Formula::Atom(a))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                if self.peek() != Tok::RParen {
                    return Err(self.error("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }
}

/// Parse a formula from its text form.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if p.peek() != Tok::End {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}
