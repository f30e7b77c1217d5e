//! Shared test oracles: a naive array-backed machine and random program generators.
#![allow(dead_code)]

use ittm_core::machine::{parse_program, Move, Program, StateId};
use ittm_core::streams::BitStream;
use rand::Rng;

/// Direct simulation on growable arrays; knows nothing about limits or certificates.
pub struct Naive<'a> {
    pub program: &'a Program,
    init: [BitStream; 3],
    cells: [Vec<Option<bool>>; 3],
    pub head: u64,
    pub state: StateId,
    pub steps: u64,
    pub choices: usize,
}

impl<'a> Naive<'a> {
    pub fn new(program: &'a Program, input: &BitStream) -> Self {
        Self {
            program,
            init: [input.clone(), BitStream::zeros(), BitStream::zeros()],
            cells: Default::default(),
            head: 1,
            state: Program::START,
            steps: 0,
            choices: 0,
        }
    }

    pub fn get(&self, tape: usize, c: u64) -> bool {
        match self.cells[tape].get(c as usize) {
            Some(Some(b)) => *b,
            _ => self.init[tape].bit_at(c).unwrap(),
        }
    }

    fn set(&mut self, tape: usize, c: u64, b: bool) {
        let v = &mut self.cells[tape];
        if v.len() <= c as usize {
            v.resize(c as usize + 1, None);
        }
        v[c as usize] = Some(b);
    }

    /// Rules that fire on the current read: fewer wildcards first, then file order.
    pub fn alternatives(&self) -> Vec<ittm_core::machine::Instruction> {
        let read = [0, 1, 2].map(|t| self.get(t, self.head));
        let mut rules: Vec<_> = self
            .program
            .rules()
            .iter()
            .filter(|r| r.state == self.state)
            .filter(|r| r.pattern.0.iter().zip(read).all(|(p, b)| p.is_none_or(|p| p == b)))
            .collect();
        rules.sort_by_key(|r| r.pattern.0.iter().filter(|p| p.is_none()).count());
        rules.iter().map(|r| r.instr).collect()
    }

    /// One step; `choose(k, width)` picks the branch at the `k`-th branch point.
    /// Returns false when halted or stuck.
    pub fn step(&mut self, choose: &dyn Fn(usize, usize) -> usize) -> bool {
        if self.state == Program::HALT {
            return false;
        }
        let alts = self.alternatives();
        let instr = match alts.len() {
            0 => return false,
            1 => alts[0],
            w => {
                let i = choose(self.choices, w);
                self.choices += 1;
                alts[i]
            }
        };
        for t in 0..3 {
            if let Some(b) = instr.write.0[t] {
                self.set(t, self.head, b);
            }
        }
        self.head = match instr.mv {
            Move::Right => self.head + 1,
            Move::Left => (self.head - 1).max(1),
        };
        self.state = instr.next;
        self.steps += 1;
        true
    }
}

/// `k ↦ index k of script·tail^ω, mod width`.
pub fn policy_choice(script: Vec<usize>, tail: Vec<usize>) -> impl Fn(usize, usize) -> usize {
    move |k, w| {
        let i = if k < script.len() {
            script[k]
        } else {
            tail[(k - script.len()) % tail.len()]
        };
        i % w
    }
}

/// Every word over `0..w` of each length in `lens`.
pub fn words(w: usize, lens: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for len in lens {
        let total = w.pow(len as u32);
        for mut n in 0..total {
            let mut v = vec![0; len];
            for slot in v.iter_mut().rev() {
                *slot = n % w;
                n /= w;
            }
            out.push(v);
        }
    }
    out
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect()
}

pub fn random_periodic(rng: &mut impl Rng, max_prefix: usize, max_period: usize) -> BitStream {
    let (pre_len, per_len) = (rng.gen_range(0..=max_prefix), rng.gen_range(1..=max_period));
    let pre = random_bits(rng, pre_len);
    let per = random_bits(rng, per_len);
    BitStream::from_bits(&pre, &per)
}

/// A deterministic program over states s, a, b that branches on one tape bit
/// per state. With `halting`, some transitions may go to the halt state.
pub fn random_function_program(rng: &mut impl Rng, name: &str, halting: bool) -> Program {
    let mut text = format!("program {name}\nstates start=s limit=L halt=h others: a b\n");
    let writes = ["---", "-0-", "-1-", "--0", "--1", "-1-", "-0-"];
    for st in ["s", "a", "b", "L"] {
        let tape = rng.gen_range(0..3);
        for bit in ["0", "1"] {
            let mut pat = ['*'; 3];
            pat[tape] = bit.chars().next().unwrap();
            let pat: String = pat.iter().collect();
            let w = writes[rng.gen_range(0..writes.len())];
            let mv = if rng.gen_bool(0.6) { "R" } else { "L" };
            let next = if halting && rng.gen_bool(0.15) {
                "h"
            } else {
                ["s", "a", "b"][rng.gen_range(0..3)]
            };
            text.push_str(&format!("rule {st} {pat} -> {w} {mv} {next}\n"));
        }
    }
    parse_program(&text).unwrap()
}

/// Like [`random_function_program`] but with an extra alternative on some reads.
pub fn random_branching_program(rng: &mut impl Rng, name: &str) -> Program {
    let base = random_function_program(rng, name, true);
    let mut text = base.to_dsl();
    let w = ["-0-", "-1-", "--1"][rng.gen_range(0..3)];
    text.push_str(&format!("rule s *** -> {w} R a\n"));
    parse_program(&text).unwrap()
}
