//! Programs as transition relations, the line-oriented DSL, and snapshots.
//!
//! A program maps `(state, three bits under the head)` to zero, one or many
//! instructions. Several instructions at one point is a branch; the choice
//! index is the position in the ordered successor list (patterns with fewer
//! wildcards first, then file order).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MachineError, ParseError, ParseErrorKind};
use crate::ordinal::Ordinal;
use crate::streams::{BitStream, Tape, TapeTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Start,
    Limit,
    Halt,
    Ordinary,
}

/// Per tape: `Some(bit)` matches that bit, `None` matches anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReadPattern(pub [Option<bool>; 3]);

impl ReadPattern {
    pub const ANY: ReadPattern = ReadPattern([None; 3]);

    pub fn matches(&self, read: [bool; 3]) -> bool {
        self.0.iter().zip(read).all(|(p, r)| p.is_none_or(|b| b == r))
    }

    pub fn wildcards(&self) -> usize {
        self.0.iter().filter(|p| p.is_none()).count()
    }

    pub fn parse(s: &str) -> Option<Self> {
        let syms: Vec<Option<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(Some(false)),
                '1' => Some(Some(true)),
                '*' => Some(None),
                _ => None,
            })
            .collect::<Option<_>>()?;
        <[Option<bool>; 3]>::try_from(syms).ok().map(Self)
    }
}

impl fmt::Display for ReadPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.0 {
            f.write_str(match p {
                Some(false) => "0",
                Some(true) => "1",
                None => "*",
            })?;
        }
        Ok(())
    }
}

/// Per tape: `Some(bit)` writes that bit, `None` keeps the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WriteAction(pub [Option<bool>; 3]);

impl WriteAction {
    pub const KEEP: WriteAction = WriteAction([None; 3]);

    pub fn on(tape: Tape, bit: bool) -> Self {
        let mut w = [None; 3];
        w[tape as usize] = Some(bit);
        Self(w)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let syms: Vec<Option<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(Some(false)),
                '1' => Some(Some(true)),
                '-' => Some(None),
                _ => None,
            })
            .collect::<Option<_>>()?;
        <[Option<bool>; 3]>::try_from(syms).ok().map(Self)
    }
}

impl fmt::Display for WriteAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in self.0 {
            f.write_str(match w {
                Some(false) => "0",
                Some(true) => "1",
                None => "-",
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub write: WriteAction,
    pub mv: Move,
    pub next: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub state: StateId,
    pub pattern: ReadPattern,
    pub instr: Instruction,
}

/// Packs the three read bits into `0..8` (input is the high bit).
pub fn read_index(read: [bool; 3]) -> usize {
    (read[0] as usize) << 2 | (read[1] as usize) << 1 | read[2] as usize
}

fn read_from_index(i: usize) -> [bool; 3] {
    [i & 4 != 0, i & 2 != 0, i & 1 != 0]
}

/// A validated program. States `0`, `1`, `2` are start, limit and halt.
#[derive(Debug, Clone)]
pub struct Program {
    name: String,
    states: Vec<String>,
    rules: Vec<Rule>,
    // dispatch[state * 8 + read] .. dispatch[state * 8 + read + 1] indexes into `matched`
    dispatch: Vec<u32>,
    matched: Vec<u32>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.states == other.states && self.rules == other.rules
    }
}

impl Eq for Program {}

impl Program {
    pub const START: StateId = StateId(0);
    pub const LIMIT: StateId = StateId(1);
    pub const HALT: StateId = StateId(2);

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn kind(&self, id: StateId) -> StateKind {
        match id {
            Self::START => StateKind::Start,
            Self::LIMIT => StateKind::Limit,
            Self::HALT => StateKind::Halt,
            _ => StateKind::Ordinary,
        }
    }

    /// Rules in file order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Instructions enabled at `state` reading `read`, in choice order.
    pub fn matching(&self, state: StateId, read: [bool; 3]) -> impl Iterator<Item = &Instruction> {
        let slot = state.index() * 8 + read_index(read);
        let (lo, hi) = (self.dispatch[slot] as usize, self.dispatch[slot + 1] as usize);
        self.matched[lo..hi]
            .iter()
            .map(move |&r| &self.rules[r as usize].instr)
    }

    pub fn alternatives(&self, state: StateId, read: [bool; 3]) -> usize {
        let slot = state.index() * 8 + read_index(read);
        (self.dispatch[slot + 1] - self.dispatch[slot]) as usize
    }

    /// Choice `k` at `(state, read)`; `None` when there is no such alternative.
    pub fn alternative(&self, state: StateId, read: [bool; 3], k: usize) -> Option<&Instruction> {
        let slot = state.index() * 8 + read_index(read);
        let lo = self.dispatch[slot] as usize;
        let hi = self.dispatch[slot + 1] as usize;
        (lo + k < hi).then(|| &self.rules[self.matched[lo + k] as usize].instr)
    }

    /// Largest number of alternatives at any `(state, read)`.
    pub fn branching_width(&self) -> usize {
        self.dispatch
            .windows(2)
            .map(|w| (w[1] - w[0]) as usize)
            .max()
            .unwrap_or(0)
    }

    /// The relation is a partial function.
    pub fn is_deterministic(&self) -> bool {
        self.branching_width() <= 1
    }

    pub fn has_limit_rules(&self) -> bool {
        self.rules.iter().any(|r| r.state == Self::LIMIT)
    }

    /// Snapshot at stage 0: input on the input tape, head on cell 1, start state.
    pub fn start_snapshot(&self, input: BitStream) -> Snapshot {
        Snapshot {
            program: self.name.clone(),
            tapes: TapeTriple::with_input(input),
            head: 1,
            state: Self::START,
            stage: Ordinal::zero(),
        }
    }

    /// Renders the DSL text; parsing it gives back an equal program.
    pub fn to_dsl(&self) -> String {
        let mut out = format!("program {}\n", self.name);
        out.push_str(&format!(
            "states start={} limit={} halt={}",
            self.states[0], self.states[1], self.states[2]
        ));
        if self.states.len() > 3 {
            out.push_str(" others:");
            for s in &self.states[3..] {
                out.push(' ');
                out.push_str(s);
            }
        }
        out.push('\n');
        for r in &self.rules {
            out.push_str(&format!(
                "rule {} {} -> {} {} {}\n",
                self.states[r.state.index()],
                r.pattern,
                r.instr.write,
                match r.instr.mv {
                    Move::Left => "L",
                    Move::Right => "R",
                },
                self.states[r.instr.next.index()]
            ));
        }
        out
    }

    /// Same program under a new name.
    pub fn renamed(&self, name: &str) -> Program {
        Program {
            name: name.to_string(),
            ..self.clone()
        }
    }

    fn assemble(name: String, states: Vec<String>, rules: Vec<Rule>) -> Program {
        let n = states.len();
        let mut dispatch = Vec::with_capacity(n * 8 + 1);
        let mut matched = Vec::new();
        let mut by_state: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, r) in rules.iter().enumerate() {
            by_state[r.state.index()].push(i as u32);
        }
        for own in &by_state {
            for read in 0..8 {
                dispatch.push(matched.len() as u32);
                let bits = read_from_index(read);
                let mut hits: Vec<u32> = own
                    .iter()
                    .copied()
                    .filter(|&i| rules[i as usize].pattern.matches(bits))
                    .collect();
                hits.sort_by_key(|&i| rules[i as usize].pattern.wildcards());
                matched.extend(hits);
            }
        }
        dispatch.push(matched.len() as u32);
        Program {
            name,
            states,
            rules,
            dispatch,
            matched,
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

/// Incremental construction of programs in code.
#[derive(Debug, Clone)]
pub struct ProgramBuilder {
    name: String,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    rules: Vec<Rule>,
}

impl ProgramBuilder {
    pub fn new(name: &str, start: &str, limit: &str, halt: &str) -> Self {
        let mut b = Self {
            name: name.to_string(),
            states: Vec::new(),
            index: Default::default(),
            rules: Vec::new(),
        };
        for s in [start, limit, halt] {
            b.state(s);
        }
        assert_eq!(b.states.len(), 3, "start, limit and halt must be distinct");
        b
    }

    /// Id of the named state, declaring it on first use.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn rule(
        &mut self,
        state: StateId,
        pattern: ReadPattern,
        write: WriteAction,
        mv: Move,
        next: StateId,
    ) -> &mut Self {
        assert!(state != Program::HALT, "no rule may fire from the halt state");
        assert!(next != Program::LIMIT, "the limit state is entered only at limits");
        self.rules.push(Rule {
            state,
            pattern,
            instr: Instruction { write, mv, next },
        });
        self
    }

    pub fn build(self) -> Program {
        Program::assemble(self.name, self.states, self.rules)
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

/// Parses program DSL text:
///
/// ```text
/// program <name>
/// states start=<id> limit=<id> halt=<id> [others: <id> ...]
/// rule <state> <i><s><o> -> <wi><ws><wo> <L|R> <state>
/// ```
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut name: Option<String> = None;
    let mut states: Option<Vec<String>> = None;
    let mut index: HashMap<String, StateId> = HashMap::new();
    let mut rules = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let syntax = |col: usize, msg: String| ParseError::new(line_no, col, msg);
        match head.text {
            "program" => {
                if name.is_some() {
                    return Err(syntax(head.column, "duplicate `program` line".into()));
                }
                match toks.as_slice() {
                    [_, n] => name = Some(n.text.to_string()),
                    _ => return Err(syntax(head.column, "expected `program <name>`".into())),
                }
            }
            "states" => {
                if name.is_none() {
                    return Err(ParseError::with_kind(
                        line_no,
                        head.column,
                        ParseErrorKind::MissingDeclaration("program"),
                        "`states` before `program`",
                    ));
                }
                if states.is_some() {
                    return Err(syntax(head.column, "duplicate `states` line".into()));
                }
                let declared = parse_states(&toks, line_no)?;
                index = declared
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), StateId(i as u32)))
                    .collect();
                states = Some(declared);
            }
            "rule" => {
                if states.is_none() {
                    return Err(ParseError::with_kind(
                        line_no,
                        head.column,
                        ParseErrorKind::MissingDeclaration("states"),
                        "`rule` before `states`",
                    ));
                }
                rules.push(parse_rule(&toks, &index, line_no)?);
            }
            other => {
                return Err(syntax(head.column, format!("unknown directive `{other}`")));
            }
        }
    }
    let name = name.ok_or_else(|| {
        ParseError::with_kind(
            1,
            1,
            ParseErrorKind::MissingDeclaration("program"),
            "missing `program` line",
        )
    })?;
    let states = states.ok_or_else(|| {
        ParseError::with_kind(
            1,
            1,
            ParseErrorKind::MissingDeclaration("states"),
            "missing `states` line",
        )
    })?;
    Ok(Program::assemble(name, states, rules))
}

fn parse_states(toks: &[Token<'_>], line_no: usize) -> Result<Vec<String>, ParseError> {
    let mut special: [Option<String>; 3] = [None, None, None];
    let mut others: Vec<String> = Vec::new();
    let mut in_others = false;
    for t in &toks[1..] {
        if in_others {
            others.push(t.text.to_string());
            continue;
        }
        if t.text == "others:" {
            in_others = true;
            continue;
        }
        let (key, value) = t.text.split_once('=').ok_or_else(|| {
            ParseError::new(line_no, t.column, format!("expected key=value, got `{}`", t.text))
        })?;
        let slot = match key {
            "start" => 0,
            "limit" => 1,
            "halt" => 2,
            _ => {
                return Err(ParseError::new(line_no, t.column, format!("unknown key `{key}`")))
            }
        };
        if value.is_empty() {
            return Err(ParseError::new(line_no, t.column, "empty state name"));
        }
        special[slot] = Some(value.to_string());
    }
    let mut all = Vec::new();
    for (slot, label) in special.into_iter().zip(["start", "limit", "halt"]) {
        match slot {
            Some(s) => all.push(s),
            None => {
                return Err(ParseError::with_kind(
                    line_no,
                    1,
                    ParseErrorKind::MissingDeclaration(label),
                    format!("missing `{label}=` declaration"),
                ))
            }
        }
    }
    all.extend(others);
    let mut seen = HashSet::new();
    for s in &all {
        if !seen.insert(s) {
            return Err(ParseError::with_kind(
                line_no,
                1,
                ParseErrorKind::DuplicateState(s.clone()),
                format!("state `{s}` declared twice"),
            ));
        }
    }
    Ok(all)
}

fn parse_rule(toks: &[Token<'_>], states: &HashMap<String, StateId>, line_no: usize) -> Result<Rule, ParseError> {
    let [_, from, pat, arrow, write, mv, to] = toks else {
        let col = toks.first().map_or(1, |t| t.column);
        return Err(ParseError::new(
            line_no,
            col,
            "expected `rule <state> <read> -> <write> <L|R> <state>`",
        ));
    };
    let lookup = |t: &Token<'_>| {
        states
            .get(t.text)
            .copied()
            .ok_or_else(|| {
                ParseError::with_kind(
                    line_no,
                    t.column,
                    ParseErrorKind::UnknownState(t.text.to_string()),
                    format!("undeclared state `{}`", t.text),
                )
            })
    };
    let state = lookup(from)?;
    if state == Program::HALT {
        return Err(ParseError::with_kind(
            line_no,
            from.column,
            ParseErrorKind::RuleFromHalt(from.text.to_string()),
            "rules may not fire from the halt state",
        ));
    }
    let pattern = ReadPattern::parse(pat.text).ok_or_else(|| {
        ParseError::new(line_no, pat.column, format!("bad read pattern `{}`", pat.text))
    })?;
    if arrow.text != "->" {
        return Err(ParseError::new(line_no, arrow.column, "expected `->`"));
    }
    let write = WriteAction::parse(write.text).ok_or_else(|| {
        ParseError::new(line_no, write.column, format!("bad write action `{}`", write.text))
    })?;
    let mv = match mv.text {
        "L" => Move::Left,
        "R" => Move::Right,
        other => {
            return Err(ParseError::new(line_no, mv.column, format!("bad move `{other}`")));
        }
    };
    let next = lookup(to)?;
    if next == Program::LIMIT {
        return Err(ParseError::with_kind(
            line_no,
            to.column,
            ParseErrorKind::TargetsLimit(to.text.to_string()),
            "the limit state is entered only by the limit rule",
        ));
    }
    Ok(Rule {
        state,
        pattern,
        instr: Instruction { write, mv, next },
    })
}

/// Complete instantaneous description of a run at one stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub program: String,
    pub tapes: TapeTriple,
    pub head: u64,
    pub state: StateId,
    pub stage: Ordinal,
}

impl Snapshot {
    pub fn is_halting(&self) -> bool {
        self.state == Program::HALT
    }

    /// The three bits under the head.
    pub fn read(&self) -> Result<[bool; 3], MachineError> {
        Ok(self.tapes.read(self.head)?)
    }
}

fn check_program(p: &Program, snap: &Snapshot) -> Result<(), MachineError> {
    if p.name != snap.program {
        return Err(MachineError::WrongProgram {
            expected: p.name.clone(),
            found: snap.program.clone(),
        });
    }
    Ok(())
}

/// Every instruction enabled at `snap`, in choice order.
pub fn successors(p: &Program, snap: &Snapshot) -> Result<Vec<Instruction>, MachineError> {
    check_program(p, snap)?;
    if snap.is_halting() {
        return Err(MachineError::NoSuccessor);
    }
    Ok(p.matching(snap.state, snap.read()?).copied().collect())
}

/// One successor step. The argument is left untouched.
pub fn apply_instruction(snap: &Snapshot, instr: &Instruction) -> Result<Snapshot, MachineError> {
    let mut tapes = snap.tapes.clone();
    for tape in Tape::ALL {
        if let Some(bit) = instr.write.0[tape as usize] {
            let t = tapes.get_mut(tape);
            *t = t.write_bit(snap.head, bit)?;
        }
    }
    let head = match instr.mv {
        Move::Left => (snap.head - 1).max(1),
        Move::Right => snap.head + 1,
    };
    Ok(Snapshot {
        program: snap.program.clone(),
        tapes,
        head,
        state: instr.next,
        stage: snap.stage.succ(),
    })
}
