//! Built-in programs: the real-writing machine `pc`, guess-and-check products,
//! the count-through well-order checker, and the co-dex checker.
//!
//! The larger machines are generated by a small assembler in which every state
//! has a fixed head position. Moving between two such states expands into a
//! chain of walker states, which are shared between all edges into the same
//! target.

use std::collections::HashMap;

use crate::error::BuildError;
use crate::machine::{Move, Program, ProgramBuilder, ReadPattern, StateId, WriteAction};

/// Names accepted by the `samples` command.
pub const SAMPLE_NAMES: &[&str] = &[
    "pc-scratch",
    "pc-output",
    "guess-check:<checker-file>",
    "count-through",
    "codex",
];

/// The built-in sample called `name`, except `guess-check:`, which needs a checker.
pub fn sample(name: &str) -> Option<Program> {
    match name {
        "pc-scratch" => Some(make_pc(PcTarget::Scratch)),
        "pc-output" => Some(make_pc(PcTarget::Output)),
        "count-through" => Some(make_count_through()),
        "codex" => Some(make_codex_checker(DEFAULT_CODEX_FRONTIER)),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcTarget {
    Scratch,
    Output,
}

/// Writes an arbitrary real on the target tape over the first ω steps, one
/// nondeterministic bit per step, then halts at the first limit.
pub fn make_pc(target: PcTarget) -> Program {
    let (name, w0, w1) = match target {
        PcTarget::Scratch => ("pc-scratch", "-0-", "-1-"),
        PcTarget::Output => ("pc-output", "--0", "--1"),
    };
    let mut b = ProgramBuilder::new(name, "s", "L", "h");
    let any = ReadPattern::ANY;
    b.rule(Program::START, any, write(w0), Move::Right, Program::START)
        .rule(Program::START, any, write(w1), Move::Right, Program::START)
        .rule(Program::LIMIT, any, WriteAction::KEEP, Move::Right, Program::HALT);
    b.build()
}

fn pattern(s: &str) -> ReadPattern {
    ReadPattern::parse(s).expect("valid read pattern")
}

fn write(s: &str) -> WriteAction {
    WriteAction::parse(s).expect("valid write action")
}

/// Phase one guesses a real on the scratch tape as `pc` does; at the first limit
/// control passes to `checker`, whose halt is the product's halt.
pub fn make_guess_and_check(checker: &Program) -> Result<Program, BuildError> {
    if !checker.is_deterministic() {
        return Err(BuildError::NondeterministicChecker(checker.name().to_string()));
    }
    if checker.has_limit_rules() {
        return Err(BuildError::CheckerTargetsLimit(checker.name().to_string()));
    }
    let mut b = ProgramBuilder::new(&format!("guess-check-{}", checker.name()), "s", "L", "h");
    let any = ReadPattern::ANY;
    let ids: Vec<StateId> = (0..checker.state_count() as u32)
        .map(|i| match StateId(i) {
            Program::HALT => Program::HALT,
            id => b.state(&format!("c.{}", checker.state_name(id))),
        })
        .collect();
    b.rule(Program::START, any, write("-0-"), Move::Right, Program::START)
        .rule(Program::START, any, write("-1-"), Move::Right, Program::START)
        // A left move on cell 1 stays put, so the checker starts on cell 1.
        .rule(Program::LIMIT, any, WriteAction::KEEP, Move::Left, ids[Program::START.index()]);
    for r in checker.rules() {
        let i = r.instr;
        b.rule(ids[r.state.index()], r.pattern, i.write, i.mv, ids[i.next.index()]);
    }
    Ok(b.build())
}

pub fn checker_accept_all() -> Program {
    let mut b = ProgramBuilder::new("accept", "s", "L", "h");
    b.rule(Program::START, ReadPattern::ANY, write("--1"), Move::Right, Program::HALT);
    b.build()
}

pub fn checker_reject_all() -> Program {
    let mut b = ProgramBuilder::new("reject", "s", "L", "h");
    b.rule(Program::START, ReadPattern::ANY, WriteAction::KEEP, Move::Right, Program::HALT);
    b.build()
}

/// What scratch cells `1..=k` are compared with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Input,
    Word(Vec<bool>),
}

/// Output 1 iff scratch cells `1..=k` equal `expected` (or differ, when `!accept_on_match`).
pub fn checker_prefix(k: usize, expected: Expected, accept_on_match: bool) -> Program {
    let name = match &expected {
        Expected::Input => format!("prefix-input-{k}"),
        Expected::Word(w) => format!("prefix-{}", crate::streams::bits_to_string(w)),
    };
    let name = if accept_on_match { name } else { format!("not-{name}") };
    let mut a = Asm::new(&name);
    let accept = a.node("acc", 1);
    a.edge(accept, "***", "--1", Target::Halt);
    let (on_match, on_mismatch) = if accept_on_match {
        (Target::Node(accept), Target::Halt)
    } else {
        (Target::Halt, Target::Node(accept))
    };
    let mut here = a.start();
    if k == 0 {
        a.edge(here, "***", "---", on_match);
    }
    for i in 1..=k {
        let next = if i == k {
            on_match
        } else {
            Target::Node(a.node(&format!("q{}", i + 1), i as u64 + 1))
        };
        let pats: &[(&str, bool)] = match &expected {
            Expected::Input => &[("00*", true), ("11*", true), ("01*", false), ("10*", false)],
            Expected::Word(w) if w[i - 1] => &[("*1*", true), ("*0*", false)],
            Expected::Word(_) => &[("*0*", true), ("*1*", false)],
        };
        for &(p, ok) in pats {
            a.edge(here, p, "---", if ok { next } else { on_mismatch });
        }
        if let Target::Node(n) = next {
            here = n;
        }
    }
    a.build()
}

pub fn checker_prefix_equals_input(k: usize) -> Program {
    checker_prefix(k, Expected::Input, true)
}

pub fn checker_scratch_word(w: &[bool]) -> Program {
    checker_prefix(w.len(), Expected::Word(w.to_vec()), true)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    id: StateId,
    pos: u64,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Node(Node),
    /// Halt without touching the output tape.
    Halt,
}

impl From<Node> for Target {
    fn from(n: Node) -> Self {
        Target::Node(n)
    }
}

/// Program builder in which each state sits at a known head position.
struct Asm {
    b: ProgramBuilder,
    names: Vec<String>,
    walks: HashMap<(StateId, u64), StateId>,
}

impl Asm {
    fn new(name: &str) -> Self {
        Self {
            b: ProgramBuilder::new(name, "s", "L", "h"),
            names: vec!["s".into(), "L".into(), "h".into()],
            walks: HashMap::new(),
        }
    }

    fn start(&self) -> Node {
        Node {
            id: Program::START,
            pos: 1,
        }
    }

    fn fresh(&mut self, name: String) -> StateId {
        let id = self.b.state(&name);
        assert_eq!(id.index(), self.names.len(), "state `{name}` declared twice");
        self.names.push(name);
        id
    }

    fn node(&mut self, name: &str, pos: u64) -> Node {
        Node {
            id: self.fresh(name.to_string()),
            pos,
        }
    }

    /// A state whose position changes while it runs.
    fn roaming(&mut self, name: &str) -> StateId {
        self.fresh(name.to_string())
    }

    fn raw(&mut self, from: StateId, pat: &str, w: &str, mv: Move, to: StateId) {
        self.b.rule(from, pattern(pat), write(w), mv, to);
    }

    /// The state to be in at `pos` so as to arrive at `to` in `to`'s state.
    fn toward(&mut self, to: Node, pos: u64) -> StateId {
        let (mv, step) = if pos > to.pos {
            (Move::Left, 1i64)
        } else {
            (Move::Right, -1)
        };
        let mut prev = to.id;
        let mut q = to.pos;
        while q != pos {
            q = q.checked_add_signed(step).expect("positions stay positive");
            prev = match self.walks.get(&(to.id, q)) {
                Some(&s) => s,
                None => {
                    let s = self.fresh(format!("{}~{q}", self.names[to.id.index()]));
                    self.raw(s, "***", "---", mv, prev);
                    self.walks.insert((to.id, q), s);
                    s
                }
            };
        }
        prev
    }

    fn edge(&mut self, from: Node, pat: &str, w: &str, to: impl Into<Target>) {
        match to.into() {
            Target::Halt => self.raw(from.id, pat, w, Move::Right, Program::HALT),
            Target::Node(t) => {
                let (mv, next) = if t.pos > from.pos {
                    (Move::Right, self.toward(t, from.pos + 1))
                } else if t.pos < from.pos {
                    (Move::Left, self.toward(t, from.pos - 1))
                } else if from.pos == 1 {
                    (Move::Left, t.id)
                } else {
                    (Move::Right, self.toward(t, from.pos + 1))
                };
                self.raw(from.id, pat, w, mv, next);
            }
        }
    }

    fn build(self) -> Program {
        self.b.build()
    }
}

/// Relations are read over the field `0..COUNT_FIELD_BOUND`.
pub const COUNT_FIELD_BOUND: u32 = 8;

const N: u64 = COUNT_FIELD_BOUND as u64;
/// Output-tape cell marking the right end of the work area.
const RULER: u64 = 65;

/// Scratch cell holding relation bit `(i, j)`.
fn rel_cell(i: u64, j: u64) -> u64 {
    1 + N * i + j
}

/// Scratch cell marking `x` as a remaining field element.
fn field_cell(x: u64) -> u64 {
    81 + x
}

/// Scratch cell of the `k`-th guess-change mark.
fn mark_cell(k: u64) -> u64 {
    101 + 2 * k
}

/// Deterministic checker for relation codes on the input tape: output 1 iff the
/// relation restricted to `0..8` is a strict linear order of its field (hence a
/// well-order, being finite).
///
/// Phases: copy the relation into a compact 8×8 scratch block (rejecting
/// reflexive pairs), mark the field, check every pair of field elements is
/// related exactly one way, then repeatedly find the least remaining element by
/// guess-and-revise, confirm it lies below every other remaining element, and
/// erase it. Accepts once the field is empty.
pub fn make_count_through() -> Program {
    let mut a = Asm::new("count-through");

    let mut pairs: Vec<(u64, u64, u64)> = (0..N)
        .flat_map(|i| (0..N).map(move |j| (2u64.pow(i as u32) * 3u64.pow(j as u32), i, j)))
        .collect();
    pairs.sort_unstable();

    let ruler = a.node("ruler", RULER);
    let start = a.start();
    a.edge(start, "***", "---", ruler);
    let sweep: Vec<Node> = pairs
        .iter()
        .map(|&(p, i, j)| a.node(&format!("copy{i}.{j}"), p))
        .collect();
    a.edge(ruler, "***", "--1", sweep[0]);
    let field_start = a.node("field0.0", rel_cell(0, 1));
    let home = a.roaming("home");
    a.raw(home, "**0", "---", Move::Left, home);
    a.edge(Node { id: home, pos: RULER }, "**1", "---", field_start);

    for (k, &(p, i, j)) in pairs.iter().enumerate() {
        let here = sweep[k];
        match sweep.get(k + 1) {
            Some(&next) => a.edge(here, "0**", "---", next),
            None => a.raw(here.id, "0**", "---", Move::Left, home),
        }
        if i == j {
            a.edge(here, "1**", "---", Target::Halt);
            continue;
        }
        let next = sweep[k + 1];
        let put = a.node(&format!("put{i}.{j}"), rel_cell(i, j));
        if p <= RULER {
            a.edge(here, "1**", "---", put);
            a.edge(put, "***", "-1-", next);
            continue;
        }
        // Leave a bookmark on the output tape, run back to the ruler, set the
        // bit, and run forward to the bookmark.
        let back = a.roaming(&format!("back{i}.{j}"));
        a.raw(here.id, "1**", "--1", Move::Left, back);
        a.raw(back, "**0", "---", Move::Left, back);
        a.edge(Node { id: back, pos: RULER }, "**1", "---", put);
        let ret = a.node(&format!("ret{i}.{j}"), RULER);
        a.edge(put, "***", "-1-", ret);
        let fwd = a.roaming(&format!("fwd{i}.{j}"));
        a.raw(ret.id, "***", "---", Move::Right, fwd);
        a.raw(fwd, "**0", "---", Move::Right, fwd);
        a.edge(Node { id: fwd, pos: p }, "**1", "--0", next);
    }

    // Field marks: x is in the field iff its row or column holds a 1.
    let pairs_start = a.node("pair0.1", rel_cell(0, 1));
    let mut next_x = Target::Node(pairs_start);
    for x in (0..N).rev() {
        let set = a.node(&format!("infield{x}"), field_cell(x));
        a.edge(set, "***", "-1-", next_x);
        let cells: Vec<u64> = (0..N)
            .filter(|&y| y != x)
            .map(|y| rel_cell(x, y))
            .chain((0..N).filter(|&y| y != x).map(|y| rel_cell(y, x)))
            .collect();
        let mut next = next_x;
        for (t, &c) in cells.iter().enumerate().rev() {
            let q = if x == 0 && t == 0 {
                field_start
            } else {
                a.node(&format!("field{x}.{t}"), c)
            };
            a.edge(q, "*1*", "---", set);
            a.edge(q, "*0*", "---", next);
            next = Target::Node(q);
        }
        next_x = next;
    }

    // Each pair of field elements is related exactly one way.
    let round = a.node("guess0", field_cell(0));
    let mut next = Target::Node(round);
    for x in (0..N).rev() {
        for y in (x + 1..N).rev() {
            let pa = if (x, y) == (0, 1) {
                pairs_start
            } else {
                a.node(&format!("pair{x}.{y}"), rel_cell(x, y))
            };
            let pb1 = a.node(&format!("pair{x}.{y}+"), rel_cell(y, x));
            let pb0 = a.node(&format!("pair{x}.{y}-"), rel_cell(y, x));
            let fx = a.node(&format!("pair{x}.{y}?{x}"), field_cell(x));
            let fy = a.node(&format!("pair{x}.{y}?{y}"), field_cell(y));
            a.edge(pa, "*1*", "---", pb1);
            a.edge(pa, "*0*", "---", pb0);
            a.edge(pb1, "*1*", "---", Target::Halt);
            a.edge(pb1, "*0*", "---", next);
            a.edge(pb0, "*1*", "---", next);
            a.edge(pb0, "*0*", "---", fx);
            a.edge(fx, "*0*", "---", next);
            a.edge(fx, "*1*", "---", fy);
            a.edge(fy, "*1*", "---", Target::Halt);
            a.edge(fy, "*0*", "---", next);
            next = Target::Node(pa);
        }
    }

    // Rounds: guess the first remaining element, then revise.
    let accept = a.node("accept", 1);
    a.edge(accept, "***", "--1", Target::Halt);
    let mut search = HashMap::new();
    let mut confirmed = HashMap::new();
    let mut guess = vec![round];
    for x in 1..N {
        guess.push(a.node(&format!("guess{x}"), field_cell(x)));
    }
    for x in 0..N {
        let next = guess.get(x as usize + 1).copied().unwrap_or(accept);
        a.edge(guess[x as usize], "*0*", "---", next);
        let s = search_node(&mut a, &mut search, &mut confirmed, round, x, x + 1, 0);
        a.edge(guess[x as usize], "*1*", "---", s);
    }
    a.build()
}

/// Search state: current guess `g`, next candidate `y`, `r` guess changes so far.
fn search_node(
    a: &mut Asm,
    memo: &mut HashMap<(u64, u64, u64), Target>,
    confirmed: &mut HashMap<u64, Target>,
    round: Node,
    g: u64,
    y: u64,
    r: u64,
) -> Target {
    if let Some(&t) = memo.get(&(g, y, r)) {
        return t;
    }
    let t = if y == N {
        finish_round(a, confirmed, round, g, r)
    } else {
        let f = a.node(&format!("seek{g}.{y}.{r}"), field_cell(y));
        let cmp = a.node(&format!("cmp{g}.{y}.{r}"), rel_cell(y, g));
        let skip = search_node(a, memo, confirmed, round, g, y + 1, r);
        a.edge(f, "*0*", "---", skip);
        a.edge(f, "*1*", "---", cmp);
        a.edge(cmp, "*0*", "---", skip);
        if r + 1 > N {
            a.edge(cmp, "*1*", "---", Target::Halt);
        } else {
            let mark = a.node(&format!("mark{g}.{y}.{r}"), mark_cell(r));
            a.edge(cmp, "*1*", "---", mark);
            let revised = search_node(a, memo, confirmed, round, y, y + 1, r + 1);
            a.edge(mark, "***", "-1-", revised);
        }
        Target::Node(f)
    };
    memo.insert((g, y, r), t);
    t
}

/// Clears the guess-change marks, confirms `g` lies below every remaining
/// element, erases `g`, and returns to the next round.
fn finish_round(
    a: &mut Asm,
    confirmed: &mut HashMap<u64, Target>,
    round: Node,
    g: u64,
    r: u64,
) -> Target {
    let mut next = match confirmed.get(&g) {
        Some(&t) => t,
        None => {
            let t = confirm_and_erase(a, round, g);
            confirmed.insert(g, t);
            t
        }
    };
    for k in (0..r).rev() {
        let n = a.node(&format!("clear{g}.{r}.{k}"), mark_cell(k));
        a.edge(n, "***", "-0-", next);
        next = Target::Node(n);
    }
    next
}

fn confirm_and_erase(a: &mut Asm, round: Node, g: u64) -> Target {
    let mut next = Target::Node(round);
    let mut erase: Vec<u64> = (0..N).map(|j| rel_cell(g, j)).collect();
    erase.extend((0..N).filter(|&i| i != g).map(|i| rel_cell(i, g)));
    erase.push(field_cell(g));
    for (t, &c) in erase.iter().enumerate().rev() {
        let n = a.node(&format!("erase{g}.{t}"), c);
        a.edge(n, "***", "-0-", next);
        next = Target::Node(n);
    }
    for y in (0..N).rev().filter(|&y| y != g) {
        let f = a.node(&format!("confirm{g}.{y}"), field_cell(y));
        let c = a.node(&format!("below{g}.{y}"), rel_cell(g, y));
        a.edge(f, "*0*", "---", next);
        a.edge(f, "*1*", "---", c);
        a.edge(c, "*1*", "---", next);
        a.edge(c, "*0*", "---", Target::Halt);
        next = Target::Node(f);
    }
    next
}

pub const DEFAULT_CODEX_FRONTIER: u64 = 2000;

/// Checks the scratch tape against the co-dex family up to cell `frontier`: the
/// first 1 must sit at `6^n` for some `n ≥ 1`, and from there on the 1s are
/// exactly the cells `6^(kn)`, `k ≥ 1`. Output 1 on success, 0 on a mismatch or
/// when no first 1 appears.
pub fn make_codex_checker(frontier: u64) -> Program {
    let mut a = Asm::new(&format!("codex-{frontier}"));
    let accept = a.node("accept", 1);
    a.edge(accept, "***", "--1", Target::Halt);
    let powers: Vec<u64> = std::iter::successors(Some(6u64), |p| p.checked_mul(6))
        .take_while(|&p| p <= frontier)
        .collect();

    // After the first 1 at 6^n: expect 1s exactly at powers of 6^n.
    let mut locked: Vec<Target> = Vec::new();
    for (idx, &first) in powers.iter().enumerate() {
        let n = idx as u32 + 1;
        let mut next = Target::Node(accept);
        for c in (first + 1..=frontier).rev() {
            let q = a.node(&format!("n{n}@{c}"), c);
            let want = is_power_of(c, 6u64.pow(n));
            let (ok, bad) = if want { ("*1*", "*0*") } else { ("*0*", "*1*") };
            a.edge(q, ok, "---", next);
            a.edge(q, bad, "---", Target::Halt);
            next = Target::Node(q);
        }
        locked.push(next);
    }

    let mut next = Target::Halt;
    for c in (1..=frontier).rev() {
        let q = if c == 1 {
            a.start()
        } else {
            a.node(&format!("find@{c}"), c)
        };
        a.edge(q, "*0*", "---", next);
        let on_one = match powers.iter().position(|&p| p == c) {
            Some(idx) => locked[idx],
            None => Target::Halt,
        };
        a.edge(q, "*1*", "---", on_one);
        next = Target::Node(q);
    }
    a.build()
}

/// True iff `c = base^k` for some `k ≥ 1`.
fn is_power_of(mut c: u64, base: u64) -> bool {
    if c < base {
        return false;
    }
    while c.is_multiple_of(base) {
        c /= base;
    }
    c == 1
}
