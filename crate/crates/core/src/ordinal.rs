//! Ordinals below ω^ω in Cantor normal form.
//!
//! These are the stage clock of every run. Only addition, comparison and the
//! "next limit" operation are needed, since the engine advances a stage either
//! by one successor step or by a jump to the next limit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// An ordinal `ω^e1·c1 + ω^e2·c2 + ... ` with `e1 > e2 > ...` and every `ci ≥ 1`.
///
/// The empty term list is zero. Because the representation is canonical,
/// derived equality is ordinal equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Self {
        Self { terms: vec![(1, 1)] }
    }

    /// `ω^exp · coef`.
    pub fn monomial(exp: u32, coef: u64) -> Self {
        if coef == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(exp, coef)] }
        }
    }

    /// Builds an ordinal from arbitrary `(exponent, coefficient)` terms read left to right
    /// as an ordinal sum. Zero coefficients are dropped and absorption is applied, so
    /// the result is always canonical.
    pub fn from_terms<I: IntoIterator<Item = (u32, u64)>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc + Self::monomial(e, c))
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|&(e, _)| e == 0)
    }

    /// The natural number value, when finite.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    /// True iff nonzero with no finite tail.
    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some(&(e, _)) if e >= 1)
    }

    /// The finite tail `n` in `self = μ + n`.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(&(0, c)) => c,
            _ => 0,
        }
    }

    /// `μ` in `self = μ + n` with `μ` zero or a limit.
    pub fn limit_part(&self) -> Self {
        let mut terms = self.terms.clone();
        if matches!(terms.last(), Some(&(0, _))) {
            terms.pop();
        }
        Self { terms }
    }

    pub fn succ(&self) -> Self {
        self.clone() + Self::finite(1)
    }

    /// Least limit ordinal strictly above every `μ + k`, i.e. `μ + ω` where `self = μ + n`.
    pub fn next_limit(&self) -> Self {
        self.limit_part() + Self::omega()
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: Ordinal) -> Ordinal {
        &self + &rhs
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        let Some(&(lead, lead_coef)) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(u32, u64)> = self
            .terms
            .iter()
            .copied()
            .take_while(|&(e, _)| e >= lead)
            .collect();
        match terms.last_mut() {
            Some((e, c)) if *e == lead => {
                *c = c.checked_add(lead_coef).expect("ordinal coefficient overflow");
                terms.extend_from_slice(&rhs.terms[1..]);
            }
            _ => terms.extend_from_slice(&rhs.terms),
        }
        Ordinal { terms }
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Self::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "w*{c}")?,
                _ => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = ParseError;

    /// Accepts `0`, or terms like `w^2*3`, `w^2`, `w*4`, `w`, `7` joined by `+`.
    /// Terms must be in strictly decreasing exponent order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |msg: String| ParseError::new(1, 1, msg);
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms: Vec<(u32, u64)> = Vec::new();
        for raw in s.split('+') {
            let t = raw.trim();
            let (exp, coef) = if let Some(rest) = t.strip_prefix('w') {
                let (exp_str, coef_str) = match rest.split_once('*') {
                    Some((a, b)) => (a, Some(b)),
                    None => (rest, None),
                };
                let exp = if exp_str.is_empty() {
                    1
                } else {
                    let e = exp_str
                        .strip_prefix('^')
                        .ok_or_else(|| err(format!("malformed ordinal term `{t}`")))?;
                    e.parse::<u32>()
                        .map_err(|_| err(format!("bad exponent in `{t}`")))?
                };
                let coef = match coef_str {
                    Some(c) => c
                        .parse::<u64>()
                        .map_err(|_| err(format!("bad coefficient in `{t}`")))?,
                    None => 1,
                };
                (exp, coef)
            } else {
                let n = t
                    .parse::<u64>()
                    .map_err(|_| err(format!("malformed ordinal term `{t}`")))?;
                (0, n)
            };
            if coef == 0 {
                return Err(err(format!("zero coefficient in `{t}`")));
            }
            if matches!(terms.last(), Some(&(prev, _)) if prev <= exp) {
                return Err(err(format!("exponents must strictly decrease at `{t}`")));
            }
            terms.push((exp, coef));
        }
        Ok(Self { terms })
    }
}
