//! Codes for relations, snapshots, and finite runs as naturals and bit streams.
//!
//! Pairs `(i, j)` sit at position `2^i · 3^j`. A snapshot is coded by a natural
//! whose binary expansion is `1` followed by a self-delimiting field list:
//! registry index, head, state index, stage terms, then each tape as prefix and
//! period bit words. Naturals inside the list use Elias gamma codes of `n + 1`.
//! A finite run is coded by putting bit `b` of the `k`-th snapshot code at
//! position `2^k · 3^b`.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::error::CodingError;
use crate::machine::{Program, Snapshot, StateId};
use crate::ordinal::Ordinal;
use crate::streams::{BitStream, TapeTriple};

/// `2^i · 3^j`.
pub fn pos_of_pair(i: u32, j: u32) -> Result<u64, CodingError> {
    let two = 1u64.checked_shl(i).filter(|_| i < 64).ok_or(CodingError::Range)?;
    let three = 3u64.checked_pow(j).ok_or(CodingError::Range)?;
    two.checked_mul(three).ok_or(CodingError::Range)
}

/// Inverse of [`pos_of_pair`]; `None` if `pos` has another prime factor.
pub fn pair_of_pos(pos: u64) -> Option<(u32, u32)> {
    if pos == 0 {
        return None;
    }
    let i = pos.trailing_zeros();
    let mut rest = pos >> i;
    let mut j = 0;
    while rest.is_multiple_of(3) {
        rest /= 3;
        j += 1;
    }
    (rest == 1).then_some((i, j))
}

/// A finite binary relation on naturals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationCode {
    pub pairs: BTreeSet<(u32, u32)>,
}

impl RelationCode {
    pub fn new(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        Self {
            pairs: pairs.into_iter().collect(),
        }
    }
}

pub fn encode_relation(r: &RelationCode) -> Result<BitStream, CodingError> {
    let positions = r
        .pairs
        .iter()
        .map(|&(i, j)| pos_of_pair(i, j))
        .collect::<Result<Vec<_>, _>>()?;
    BitStream::finite_support(positions).map_err(|e| CodingError::Malformed(e.to_string()))
}

/// Positions of the 1s of a finitely supported stream.
fn support_of(s: &BitStream) -> Result<Vec<u64>, CodingError> {
    match s {
        BitStream::Periodic { prefix, period } => {
            if period.iter().any(|&b| b) {
                return Err(CodingError::Malformed("infinitely many 1s".into()));
            }
            Ok(prefix
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as u64 + 1)
                .collect())
        }
        BitStream::Query(q) if q.families().is_empty() => Ok(q.support().iter().copied().collect()),
        BitStream::Query(_) => Err(CodingError::Malformed("infinitely many 1s".into())),
    }
}

/// Reads back a relation whose field lies in `0..field_bound`.
pub fn decode_relation(s: &BitStream, field_bound: u32) -> Result<RelationCode, CodingError> {
    let mut pairs = BTreeSet::new();
    for pos in support_of(s)? {
        let (i, j) = pair_of_pos(pos)
            .ok_or_else(|| CodingError::Malformed(format!("1 at non-pair position {pos}")))?;
        if i >= field_bound || j >= field_bound {
            return Err(CodingError::Malformed(format!(
                "pair ({i},{j}) outside field bound {field_bound}"
            )));
        }
        pairs.insert((i, j));
    }
    Ok(RelationCode { pairs })
}

#[derive(Default)]
struct BitWriter(Vec<bool>);

impl BitWriter {
    fn nat(&mut self, n: u64) {
        let v = n as u128 + 1;
        let width = 128 - v.leading_zeros();
        self.0.extend(std::iter::repeat_n(false, width as usize - 1));
        self.0.extend((0..width).rev().map(|b| (v >> b) & 1 == 1));
    }

    fn word(&mut self, w: &[bool]) {
        self.nat(w.len() as u64);
        self.0.extend_from_slice(w);
    }

    fn finish(self) -> BigUint {
        let mut bytes = vec![0u8; (self.0.len() + 1).div_ceil(8)];
        // Leading 1 so leading zeros of the field list survive.
        for (k, &b) in std::iter::once(&true).chain(&self.0).rev().enumerate() {
            if b {
                bytes[k / 8] |= 1 << (k % 8);
            }
        }
        BigUint::from_bytes_le(&bytes)
    }
}

struct BitReader {
    bits: Vec<bool>,
    at: usize,
}

impl BitReader {
    fn new(code: &BigUint) -> Result<Self, CodingError> {
        let n = code.bits();
        if n == 0 {
            return Err(CodingError::Malformed("zero is not a code".into()));
        }
        let bits = (0..n - 1).rev().map(|b| code.bit(b)).collect();
        Ok(Self { bits, at: 0 })
    }

    fn bit(&mut self) -> Result<bool, CodingError> {
        let b = *self
            .bits
            .get(self.at)
            .ok_or_else(|| CodingError::Malformed("code ends early".into()))?;
        self.at += 1;
        Ok(b)
    }

    fn nat(&mut self) -> Result<u64, CodingError> {
        let mut zeros = 0;
        while !self.bit()? {
            zeros += 1;
            if zeros > 64 {
                return Err(CodingError::Malformed("number too wide".into()));
            }
        }
        let mut v: u128 = 1;
        for _ in 0..zeros {
            v = (v << 1) | u128::from(self.bit()?);
        }
        u64::try_from(v - 1).map_err(|_| CodingError::Malformed("number too wide".into()))
    }

    fn word(&mut self) -> Result<Vec<bool>, CodingError> {
        let len = self.nat()?;
        if len as usize > self.bits.len() - self.at {
            return Err(CodingError::Malformed("code ends early".into()));
        }
        (0..len).map(|_| self.bit()).collect()
    }

    fn done(&self) -> Result<(), CodingError> {
        if self.at == self.bits.len() {
            Ok(())
        } else {
            Err(CodingError::Malformed("trailing bits".into()))
        }
    }
}

/// Gödel code of `snap`; its program must be in `registry`.
pub fn encode_snapshot(snap: &Snapshot, registry: &[Program]) -> Result<BigUint, CodingError> {
    let index = registry
        .iter()
        .position(|p| p.name() == snap.program)
        .ok_or_else(|| CodingError::UnknownProgram(snap.program.clone()))?;
    let mut w = BitWriter::default();
    w.nat(index as u64);
    w.nat(snap.head);
    w.nat(u64::from(snap.state.0));
    w.nat(snap.stage.terms().len() as u64);
    for &(e, c) in snap.stage.terms() {
        w.nat(u64::from(e));
        w.nat(c);
    }
    for tape in [&snap.tapes.input, &snap.tapes.scratch, &snap.tapes.output] {
        let BitStream::Periodic { prefix, period } = tape else {
            return Err(CodingError::NotEncodable);
        };
        w.word(prefix);
        w.word(period);
    }
    Ok(w.finish())
}

pub fn decode_snapshot(code: &BigUint, registry: &[Program]) -> Result<Snapshot, CodingError> {
    let mut r = BitReader::new(code)?;
    let index = r.nat()? as usize;
    let program = registry
        .get(index)
        .ok_or_else(|| CodingError::UnknownProgram(format!("#{index}")))?;
    let head = r.nat()?;
    if head == 0 {
        return Err(CodingError::Malformed("head 0".into()));
    }
    let state = u32::try_from(r.nat()?)
        .ok()
        .filter(|&s| (s as usize) < program.state_count())
        .ok_or_else(|| CodingError::Malformed("state out of range".into()))?;
    let n_terms = r.nat()?;
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let e = u32::try_from(r.nat()?).map_err(|_| CodingError::Malformed("exponent".into()))?;
        terms.push((e, r.nat()?));
    }
    let valid = terms.iter().all(|&(_, c)| c > 0) && terms.windows(2).all(|w| w[0].0 > w[1].0);
    if !valid {
        return Err(CodingError::Malformed("stage is not in normal form".into()));
    }
    let mut tape = || -> Result<BitStream, CodingError> {
        let prefix = r.word()?;
        let period = r.word()?;
        if period.is_empty() {
            return Err(CodingError::Malformed("empty period".into()));
        }
        Ok(BitStream::Periodic { prefix, period })
    };
    let tapes = TapeTriple {
        input: tape()?,
        scratch: tape()?,
        output: tape()?,
    };
    r.done()?;
    Ok(Snapshot {
        program: program.name().to_string(),
        tapes,
        head,
        state: StateId(state),
        stage: Ordinal::from_terms(terms),
    })
}

/// Row layout: bit `b` of the `k`-th snapshot code at `2^k · 3^b`.
pub fn encode_run(trace: &[Snapshot], registry: &[Program]) -> Result<BitStream, CodingError> {
    let mut positions = Vec::new();
    for (k, snap) in trace.iter().enumerate() {
        let code = encode_snapshot(snap, registry)?;
        let k = u32::try_from(k).map_err(|_| CodingError::Range)?;
        for b in 0..code.bits() {
            if code.bit(b) {
                let b = u32::try_from(b).map_err(|_| CodingError::Range)?;
                positions.push(pos_of_pair(k, b)?);
            }
        }
    }
    BitStream::finite_support(positions).map_err(|e| CodingError::Malformed(e.to_string()))
}

pub fn decode_run(code: &BitStream, registry: &[Program]) -> Result<Vec<Snapshot>, CodingError> {
    let mut rows: Vec<BigUint> = Vec::new();
    for pos in support_of(code)? {
        let (k, b) = pair_of_pos(pos)
            .ok_or_else(|| CodingError::Malformed(format!("1 at non-pair position {pos}")))?;
        let k = k as usize;
        if rows.len() <= k {
            rows.resize(k + 1, BigUint::default());
        }
        rows[k].set_bit(u64::from(b), true);
    }
    rows.iter().map(|c| decode_snapshot(c, registry)).collect()
}

fn periodic_parts(s: &BitStream) -> Result<(&[bool], &[bool]), CodingError> {
    match s {
        BitStream::Periodic { prefix, period } => Ok((prefix, period)),
        BitStream::Query(_) => Err(CodingError::NotEncodable),
    }
}

/// Interleaves two streams: cell `2k − 1` holds `a(k)` and cell `2k` holds `b(k)`.
pub fn pair_real(a: &BitStream, b: &BitStream) -> Result<BitStream, CodingError> {
    let (pa, qa) = periodic_parts(a)?;
    let (pb, qb) = periodic_parts(b)?;
    let start = pa.len().max(pb.len());
    let period = crate::word::lcm(qa.len(), qb.len());
    let at = |pre: &[bool], per: &[bool], i: usize| *crate::word::letter_at(pre, per, i);
    let interleave = |range: std::ops::Range<usize>| -> Vec<bool> {
        range
            .flat_map(|i| [at(pa, qa, i), at(pb, qb, i)])
            .collect()
    };
    Ok(BitStream::periodic(interleave(0..start), interleave(start..start + period)).canonicalize())
}

/// Inverse of [`pair_real`].
pub fn unpair_real(c: &BitStream) -> Result<(BitStream, BitStream), CodingError> {
    let (pre, per) = periodic_parts(c)?;
    // Past cell 2·start every stream bit repeats with the period of `c`.
    let start = pre.len() / 2 + 1;
    let take = |offset: usize, range: std::ops::Range<usize>| -> Vec<bool> {
        range
            .map(|k| *crate::word::letter_at(pre, per, 2 * k + offset))
            .collect()
    };
    let half = |offset| {
        BitStream::periodic(take(offset, 0..start), take(offset, start..start + per.len()))
            .canonicalize()
    };
    Ok((half(0), half(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_program;

    fn pc() -> Program {
        parse_program(
            "program pc\nstates start=s limit=L halt=h\n\
             rule s *** -> -0- R s\nrule s *** -> -1- R s\nrule L *** -> --- R h\n",
        )
        .unwrap()
    }

    #[test]
    fn pair_positions() {
        assert_eq!(pos_of_pair(2, 2), Ok(36));
        assert_eq!(pos_of_pair(0, 0), Ok(1));
        assert_eq!(pos_of_pair(3, 1), Ok(24));
        assert_eq!(pos_of_pair(64, 0), Err(CodingError::Range));
        assert_eq!(pos_of_pair(0, 41), Err(CodingError::Range));
        assert_eq!(pair_of_pos(24), Some((3, 1)));
        assert_eq!(pair_of_pos(5), None);
    }

    #[test]
    fn relations() {
        let r = RelationCode::new([(0, 1)]);
        let s = encode_relation(&r).unwrap();
        assert_eq!(s, BitStream::from_bits("001", "0"));
        assert_eq!(decode_relation(&s, 4).unwrap(), r);
        assert_eq!(encode_relation(&RelationCode::default()).unwrap(), BitStream::zeros());
        let cyc = encode_relation(&RelationCode::new([(1, 2), (2, 1)])).unwrap();
        let ones: Vec<u64> = (1..=40).filter(|&c| cyc.bit_at(c).unwrap()).collect();
        assert_eq!(ones, vec![12, 18]);
        let bad = BitStream::from_bits("00001", "0");
        assert!(matches!(decode_relation(&bad, 4), Err(CodingError::Malformed(_))));
        assert!(matches!(decode_relation(&cyc, 2), Err(CodingError::Malformed(_))));
        assert!(matches!(decode_relation(&BitStream::ones(), 4), Err(CodingError::Malformed(_))));
    }

    #[test]
    fn snapshot_round_trip() {
        let p = pc();
        let reg = [p.clone()];
        let s = p.start_snapshot(BitStream::zeros());
        let c = encode_snapshot(&s, &reg).unwrap();
        assert_eq!(decode_snapshot(&c, &reg).unwrap(), s);
        let mut t = s.clone();
        t.head = 2;
        assert_ne!(encode_snapshot(&t, &reg).unwrap(), c);
        t.stage = "w^2*3 + w*1 + 4".parse().unwrap();
        t.tapes.scratch = BitStream::from_bits("0110", "10");
        assert_eq!(decode_snapshot(&encode_snapshot(&t, &reg).unwrap(), &reg).unwrap(), t);
        t.tapes.input = "family=1x2^k".parse().unwrap();
        assert_eq!(encode_snapshot(&t, &reg), Err(CodingError::NotEncodable));
        assert!(matches!(encode_snapshot(&s, &[]), Err(CodingError::UnknownProgram(_))));
        assert!(decode_snapshot(&(c << 1u32), &reg).is_err());
    }

    #[test]
    fn run_round_trip() {
        let p = pc();
        let reg = [p.clone()];
        assert_eq!(encode_run(&[], &reg).unwrap(), BitStream::zeros());
        let s0 = p.start_snapshot(BitStream::zeros());
        let one = encode_run(std::slice::from_ref(&s0), &reg).unwrap();
        for c in 1..=2000u64 {
            if one.bit_at(c).unwrap() {
                assert_eq!(pair_of_pos(c).unwrap().0, 0);
            }
        }
        assert_eq!(decode_run(&one, &reg).unwrap(), vec![s0]);
    }

    #[test]
    fn real_pairs() {
        let z = BitStream::zeros();
        assert_eq!(pair_real(&z, &z).unwrap(), z);
        let p = pair_real(&BitStream::ones(), &z).unwrap();
        assert_eq!(p, BitStream::from_bits("", "10"));
        assert_eq!(unpair_real(&p).unwrap(), (BitStream::ones(), z.clone()));
        let a = BitStream::from_bits("101", "011");
        let b = BitStream::from_bits("", "01");
        let c = pair_real(&a, &b).unwrap();
        for k in 1..40 {
            assert_eq!(c.bit_at(2 * k - 1).unwrap(), a.bit_at(k).unwrap());
            assert_eq!(c.bit_at(2 * k).unwrap(), b.bit_at(k).unwrap());
        }
        assert_eq!(unpair_real(&c).unwrap(), (a, b));
    }
}
