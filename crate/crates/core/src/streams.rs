//! Finitely described infinite binary sequences.
//!
//! Cells are 1-indexed. Writable tape contents are always eventually periodic;
//! the sparse query form (geometric families plus a finite support set) is
//! read-only and only ever appears as an initial input.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, StreamError};
use crate::word;

/// Finite supports whose largest position is at most this are stored densely.
pub const MATERIALIZE_LIMIT: u64 = 1 << 22;

/// Read-only stream: 1 exactly at `a·b^k` (k ≥ 0) for each family `(a, b)`, and at
/// every position of `support`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QueryStream {
    families: Vec<(u64, u64)>,
    support: BTreeSet<u64>,
}

impl QueryStream {
    /// Families need `a ≥ 1` and `b ≥ 2`; support positions need to be ≥ 1.
    pub fn new(
        families: Vec<(u64, u64)>,
        support: impl IntoIterator<Item = u64>,
    ) -> Result<Self, StreamError> {
        if families.iter().any(|&(a, b)| a == 0 || b < 2) {
            return Err(StreamError::InvalidPosition);
        }
        let support: BTreeSet<u64> = support.into_iter().collect();
        if support.contains(&0) {
            return Err(StreamError::InvalidPosition);
        }
        let mut families = families;
        families.sort_unstable();
        families.dedup();
        Ok(Self { families, support })
    }

    pub fn families(&self) -> &[(u64, u64)] {
        &self.families
    }

    pub fn support(&self) -> &BTreeSet<u64> {
        &self.support
    }

    pub fn contains(&self, pos: u64) -> bool {
        self.support.contains(&pos)
            || self.families.iter().any(|&(a, b)| {
                if !pos.is_multiple_of(a) {
                    return false;
                }
                let mut q = pos / a;
                while q.is_multiple_of(b) {
                    q /= b;
                }
                q == 1
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BitStream {
    /// `prefix · period^ω`; the period is never empty.
    Periodic { prefix: Vec<bool>, period: Vec<bool> },
    Query(QueryStream),
}

impl BitStream {
    pub fn zeros() -> Self {
        Self::Periodic {
            prefix: Vec::new(),
            period: vec![false],
        }
    }

    pub fn ones() -> Self {
        Self::Periodic {
            prefix: Vec::new(),
            period: vec![true],
        }
    }

    /// Panics on an empty period.
    pub fn periodic(prefix: Vec<bool>, period: Vec<bool>) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        Self::Periodic { prefix, period }
    }

    /// Convenience constructor from `'0'`/`'1'` strings. Panics on other characters.
    pub fn from_bits(prefix: &str, period: &str) -> Self {
        Self::periodic(bits_from_str(prefix).unwrap(), bits_from_str(period).unwrap())
            .canonicalize()
    }

    /// Stream with 1s exactly at `positions`. Dense when small enough, sparse otherwise.
    pub fn finite_support(
        positions: impl IntoIterator<Item = u64>,
    ) -> Result<Self, StreamError> {
        Ok(Self::Query(QueryStream::new(Vec::new(), positions)?).canonicalize())
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Self::Periodic { .. })
    }

    pub fn bit_at(&self, pos: u64) -> Result<bool, StreamError> {
        if pos == 0 {
            return Err(StreamError::InvalidPosition);
        }
        Ok(match self {
            Self::Periodic { prefix, period } => {
                let i = (pos - 1) as usize;
                *word::letter_at(prefix, period, i)
            }
            Self::Query(q) => q.contains(pos),
        })
    }

    pub fn write_bit(&self, pos: u64, bit: bool) -> Result<Self, StreamError> {
        if pos == 0 {
            return Err(StreamError::InvalidPosition);
        }
        let Self::Periodic { prefix, period } = self else {
            return Err(StreamError::ReadOnly);
        };
        let pos = pos as usize;
        let mut prefix = prefix.clone();
        let mut period = period.clone();
        if pos > prefix.len() {
            let grow = pos - prefix.len();
            let p = period.len();
            prefix.extend((0..grow).map(|i| period[i % p]));
            period.rotate_left(grow % p);
        }
        prefix[pos - 1] = bit;
        Ok(Self::Periodic { prefix, period }.canonicalize())
    }

    pub fn canonicalize(&self) -> Self {
        match self {
            Self::Periodic { prefix, period } => {
                let (prefix, period) = word::canonical(prefix, period);
                Self::Periodic { prefix, period }
            }
            Self::Query(q) if q.families.is_empty() => {
                match q.support.last() {
                    None => Self::zeros(),
                    Some(&max) if max <= MATERIALIZE_LIMIT => {
                        let mut prefix = vec![false; max as usize];
                        for &p in &q.support {
                            prefix[p as usize - 1] = true;
                        }
                        Self::Periodic {
                            prefix,
                            period: vec![false],
                        }
                        .canonicalize()
                    }
                    Some(_) => self.clone(),
                }
            }
            Self::Query(_) => self.clone(),
        }
    }

    /// True iff `self(c) = other(c + d)` for every cell `c ≥ 1`.
    pub fn shift_eq(&self, other: &Self, d: u64) -> Result<bool, StreamError> {
        self.shift_eq_from(other, d, 1)
    }

    /// True iff `self(c) = other(c + d)` for every cell `c ≥ from`.
    pub fn shift_eq_from(&self, other: &Self, d: u64, from: u64) -> Result<bool, StreamError> {
        let (
            Self::Periodic { prefix: p1, period: q1 },
            Self::Periodic { prefix: p2, period: q2 },
        ) = (self, other)
        else {
            return Err(StreamError::Undecidable);
        };
        let from = from.max(1) as usize;
        let d = d as usize;
        // Past both prefixes the pair (self(c), other(c+d)) is periodic with lcm period.
        let end = from.max(p1.len().max(p2.len()) + 1) + word::lcm(q1.len(), q2.len());
        Ok((from..end).all(|c| {
            word::letter_at(p1, q1, c - 1) == word::letter_at(p2, q2, c + d - 1)
        }))
    }

    /// Length of the non-repeating part; `None` for query streams.
    pub fn prefix_len(&self) -> Option<usize> {
        match self {
            Self::Periodic { prefix, .. } => Some(prefix.len()),
            Self::Query(_) => None,
        }
    }

    /// The first `n` bits.
    pub fn window(&self, n: usize) -> Vec<bool> {
        (1..=n as u64).map(|c| self.bit_at(c).unwrap()).collect()
    }

    /// Same infinite sequence, regardless of description.
    pub fn same_as(&self, other: &Self) -> bool {
        self.canonicalize() == other.canonicalize()
    }
}

impl Default for BitStream {
    fn default() -> Self {
        Self::zeros()
    }
}

pub fn bits_from_str(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Renders the CLI stream-spec form.
impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Periodic { prefix, period } => write!(
                f,
                "prefix={},period={}",
                bits_to_string(prefix),
                bits_to_string(period)
            ),
            Self::Query(q) => {
                let mut parts: Vec<String> = q
                    .families
                    .iter()
                    .map(|(a, b)| format!("family={a}x{b}^k"))
                    .collect();
                if !q.support.is_empty() || parts.is_empty() {
                    let list: Vec<String> = q.support.iter().map(u64::to_string).collect();
                    parts.push(format!("support={}", list.join(",")));
                }
                f.write_str(&parts.join("+"))
            }
        }
    }
}

impl FromStr for BitStream {
    type Err = ParseError;

    /// `prefix=<bits>,period=<bits>` | `support=<p1>,<p2>,...` |
    /// `family=<a>x<b>^k[+family=...][+support=...]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = |col: usize, msg: String| ParseError::new(1, col + 1, msg);
        if let Some(rest) = s.strip_prefix("prefix=") {
            let (pre, per) = rest
                .split_once(",period=")
                .ok_or_else(|| err(0, "expected `prefix=<bits>,period=<bits>`".into()))?;
            let prefix = bits_from_str(pre).ok_or_else(|| err(7, format!("bad bits `{pre}`")))?;
            let period = bits_from_str(per).ok_or_else(|| err(0, format!("bad bits `{per}`")))?;
            if period.is_empty() {
                return Err(err(0, "period must be nonempty".into()));
            }
            return Ok(Self::periodic(prefix, period).canonicalize());
        }
        let mut families = Vec::new();
        let mut support = Vec::new();
        let mut offset = 0;
        for part in s.split('+') {
            if let Some(list) = part.strip_prefix("support=") {
                for item in list.split(',').filter(|t| !t.trim().is_empty()) {
                    let p = item
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| err(offset, format!("bad position `{item}`")))?;
                    support.push(p);
                }
            } else if let Some(fam) = part.strip_prefix("family=") {
                let body = fam
                    .strip_suffix("^k")
                    .ok_or_else(|| err(offset, format!("expected `<a>x<b>^k`, got `{fam}`")))?;
                let (a, b) = body
                    .split_once('x')
                    .ok_or_else(|| err(offset, format!("expected `<a>x<b>^k`, got `{fam}`")))?;
                let a = a.parse::<u64>().map_err(|_| err(offset, format!("bad `{a}`")))?;
                let b = b.parse::<u64>().map_err(|_| err(offset, format!("bad `{b}`")))?;
                families.push((a, b));
            } else {
                return Err(err(offset, format!("unrecognized stream spec `{part}`")));
            }
            offset += part.len() + 1;
        }
        let q = QueryStream::new(families, support)
            .map_err(|e| err(0, e.to_string()))?;
        Ok(Self::Query(q).canonicalize())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum StreamJson {
    Periodic { prefix: String, period: String },
    Query { families: Vec<(u64, u64)>, support: Vec<u64> },
}

impl Serialize for BitStream {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Self::Periodic { prefix, period } => StreamJson::Periodic {
                prefix: bits_to_string(prefix),
                period: bits_to_string(period),
            },
            Self::Query(q) => StreamJson::Query {
                families: q.families.clone(),
                support: q.support.iter().copied().collect(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitStream {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match StreamJson::deserialize(deserializer)? {
            StreamJson::Periodic { prefix, period } => {
                let prefix = bits_from_str(&prefix).ok_or_else(|| D::Error::custom("bad bits"))?;
                let period = bits_from_str(&period).ok_or_else(|| D::Error::custom("bad bits"))?;
                if period.is_empty() {
                    return Err(D::Error::custom("empty period"));
                }
                Ok(Self::periodic(prefix, period))
            }
            StreamJson::Query { families, support } => QueryStream::new(families, support)
                .map(Self::Query)
                .map_err(D::Error::custom),
        }
    }
}

/// One of the three tapes sharing the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tape {
    Input = 0,
    Scratch = 1,
    Output = 2,
}

impl Tape {
    pub const ALL: [Tape; 3] = [Tape::Input, Tape::Scratch, Tape::Output];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TapeTriple {
    pub input: BitStream,
    pub scratch: BitStream,
    pub output: BitStream,
}

impl TapeTriple {
    /// `input` on the input tape, the other two all-zero.
    pub fn with_input(input: BitStream) -> Self {
        Self {
            input,
            ..Self::default()
        }
    }

    pub fn get(&self, tape: Tape) -> &BitStream {
        match tape {
            Tape::Input => &self.input,
            Tape::Scratch => &self.scratch,
            Tape::Output => &self.output,
        }
    }

    pub fn get_mut(&mut self, tape: Tape) -> &mut BitStream {
        match tape {
            Tape::Input => &mut self.input,
            Tape::Scratch => &mut self.scratch,
            Tape::Output => &mut self.output,
        }
    }

    /// The three bits under cell `pos`, in input/scratch/output order.
    pub fn read(&self, pos: u64) -> Result<[bool; 3], StreamError> {
        Ok([
            self.input.bit_at(pos)?,
            self.scratch.bit_at(pos)?,
            self.output.bit_at(pos)?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(prefix: &str, period: &str) -> BitStream {
        BitStream::periodic(bits_from_str(prefix).unwrap(), bits_from_str(period).unwrap())
    }

    #[test]
    fn bit_at_examples() {
        assert!(!p("", "0").bit_at(7).unwrap());
        let codex_like = BitStream::Query(QueryStream::new(vec![(1, 6)], []).unwrap());
        assert!(codex_like.bit_at(36).unwrap());
        assert!(!codex_like.bit_at(37).unwrap());
        assert!(codex_like.bit_at(1).unwrap());
        // 1,0,1,0,1,...
        let s = p("1", "01");
        assert_eq!(s.window(8), bits_from_str("10101010").unwrap());
        assert!(s.bit_at(4).is_ok_and(|b| !b));
        assert!(s.bit_at(5).unwrap());
        assert_eq!(s.bit_at(0), Err(StreamError::InvalidPosition));
    }

    #[test]
    fn write_examples() {
        let z = BitStream::zeros();
        assert_eq!(z.write_bit(1, true).unwrap(), p("1", "0"));
        let one = p("1", "0");
        assert_eq!(one.write_bit(1, true).unwrap(), one);

        let alt = p("", "01");
        let written = alt.write_bit(3, true).unwrap();
        let mut naive: Vec<bool> = alt.window(10);
        naive[2] = true;
        assert_eq!(written.window(10), naive);
        assert_eq!(written, p("011", "10"));

        let q = BitStream::Query(QueryStream::new(vec![(1, 6)], []).unwrap());
        assert_eq!(q.write_bit(1, false), Err(StreamError::ReadOnly));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(p("0", "0").canonicalize(), p("", "0"));
        let c = p("01", "0101").canonicalize();
        assert_eq!(c, p("", "01"));
        assert_eq!(c.window(12), p("01", "0101").window(12));
        assert_eq!(BitStream::finite_support([2]).unwrap(), p("01", "0"));
        assert_eq!(BitStream::finite_support([]).unwrap(), BitStream::zeros());
    }

    #[test]
    fn huge_support_stays_sparse() {
        let s = BitStream::finite_support([5, MATERIALIZE_LIMIT * 4]).unwrap();
        assert!(!s.is_periodic());
        assert!(s.bit_at(MATERIALIZE_LIMIT * 4).unwrap());
        assert!(!s.bit_at(6).unwrap());
    }

    #[test]
    fn shift_examples() {
        let z = BitStream::zeros();
        assert!(z.shift_eq(&z, 5).unwrap());
        let a = p("", "01");
        let b = p("", "10");
        assert!(a.shift_eq(&b, 1).unwrap());
        let av = a.window(64);
        let bv = b.window(65);
        assert!((0..64).all(|i| av[i] == bv[i + 1]));
        assert!(!p("1", "0").shift_eq(&z, 0).unwrap());
        let q = BitStream::Query(QueryStream::new(vec![(1, 2)], []).unwrap());
        assert_eq!(q.shift_eq(&z, 0), Err(StreamError::Undecidable));
    }

    #[test]
    fn shift_from_ignores_left_cells() {
        let a = p("1", "0");
        let b = p("01", "0");
        assert!(!a.shift_eq(&b, 0).unwrap());
        assert!(a.shift_eq_from(&b, 0, 3).unwrap());
        assert!(p("111", "0").shift_eq_from(&p("1111", "0"), 1, 1).unwrap());
    }

    #[test]
    fn spec_strings() {
        let s: BitStream = "prefix=,period=0".parse().unwrap();
        assert_eq!(s, BitStream::zeros());
        let s: BitStream = "prefix=1,period=10".parse().unwrap();
        assert_eq!(s.to_string(), "prefix=1,period=10");
        let s: BitStream = "prefix=1,period=01".parse().unwrap();
        assert_eq!(s.to_string(), "prefix=,period=10");
        let s: BitStream = "support=12,18".parse().unwrap();
        assert!(s.bit_at(12).unwrap() && s.bit_at(18).unwrap() && !s.bit_at(13).unwrap());
        let s: BitStream = "family=1x6^k+support=5".parse().unwrap();
        assert!(s.bit_at(216).unwrap() && s.bit_at(5).unwrap());
        assert_eq!(s.to_string(), "family=1x6^k+support=5");
        assert_eq!(s.to_string().parse::<BitStream>().unwrap(), s);
        assert!("prefix=2,period=0".parse::<BitStream>().is_err());
        assert!("prefix=1,period=".parse::<BitStream>().is_err());
        assert!("family=0x6^k".parse::<BitStream>().is_err());
        assert!("nonsense".parse::<BitStream>().is_err());
    }

    #[test]
    fn json_form() {
        let s = p("1", "01");
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"periodic","prefix":"1","period":"01"}"#);
        let back: BitStream = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let q = BitStream::Query(QueryStream::new(vec![(2, 3)], [7]).unwrap());
        let j = serde_json::to_string(&q).unwrap();
        assert_eq!(j, r#"{"kind":"query","families":[[2,3]],"support":[7]}"#);
    }
}
