use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Structured outcome label.
///
/// Text form: `Index(n)` is `n`, `Vector(m, mu)` is `m:mu`, and
/// `Seq(a, b)` is `(a,b)`. An eigenstate trajectory therefore reads
/// `(m:mu,n:nu)`, a partially coarse-grained one `(m,n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Outcome `n` of a projective measurement.
    Index(usize),
    /// Basis vector `mu` inside eigenspace `m`.
    Vector(usize, usize),
    /// Outcome pair of a sequential measurement.
    Seq(Box<Label>, Box<Label>),
}

impl Label {
    pub fn seq(first: Label, second: Label) -> Self {
        Label::Seq(Box::new(first), Box::new(second))
    }

    /// Forgets the position inside each eigenspace.
    pub fn coarsen(&self) -> Label {
        match self {
            Label::Index(n) => Label::Index(*n),
            Label::Vector(m, _) => Label::Index(*m),
            Label::Seq(a, b) => Label::seq(a.coarsen(), b.coarsen()),
        }
    }

    pub fn first(&self) -> Option<&Label> {
        match self {
            Label::Seq(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn second(&self) -> Option<&Label> {
        match self {
            Label::Seq(_, b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(n) => write!(f, "{n}"),
            Label::Vector(m, mu) => write!(f, "{m}:{mu}"),
            Label::Seq(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed outcome label {0:?}")]
pub struct ParseLabelError(String);

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseLabelError(s.to_string());
        let mut parser = Parser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let label = parser.label().ok_or_else(err)?;
        if parser.pos != parser.bytes.len() {
            return Err(err());
        }
        Ok(label)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn label(&mut self) -> Option<Label> {
        if self.eat(b'(') {
            let a = self.label()?;
            if !self.eat(b',') {
                return None;
            }
            let b = self.label()?;
            if !self.eat(b')') {
                return None;
            }
            return Some(Label::seq(a, b));
        }
        let m = self.number()?;
        if self.eat(b':') {
            let mu = self.number()?;
            return Some(Label::Vector(m, mu));
        }
        Some(Label::Index(m))
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.bytes.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
