//! Transfinite operational semantics.
//!
//! A run is a sequence of blocks. Each block steps the machine until it halts,
//! gets stuck, or a [`RecurrenceCertificate`] proves that it repeats forever;
//! in the last case [`limit_jump`] computes the limit snapshot exactly (state
//! `Limit`, head on cell 1, every cell the limsup of its history) and the next
//! block starts there.
//!
//! A certificate `(m, n, d)` says that configuration `n` is configuration `m`
//! translated `d` cells to the right on every cell the segment `[m, n)` can
//! still reach: same state, same choice cursor, `head(n) = head(m) + d`,
//! `tape_n(c + d) = tape_m(c)` for every `c ≥ lo` where `lo` is the least cell
//! visited in the segment, and no left move was attempted on cell 1 inside the
//! segment. With `d = 0` this is an exact loop. Either way, by induction the
//! segment repeats forever, each copy shifted by another `d`.

use std::collections::{HashMap, VecDeque};

use serde_json::{json, Value};

use crate::error::StreamError;
use crate::machine::{Move, Program, Snapshot, StateId};
use crate::ordinal::Ordinal;
use crate::streams::{BitStream, QueryStream, TapeTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunBudget {
    pub max_successor_steps_per_block: u64,
    pub max_limit_jumps: u32,
    /// How many past steps are searched for a recurrence.
    pub history_window: usize,
}

impl Default for RunBudget {
    fn default() -> Self {
        Self {
            max_successor_steps_per_block: 100_000,
            max_limit_jumps: 4,
            history_window: 4096,
        }
    }
}

/// Where a resolver is in its choice sequence. Two configurations can only be
/// part of a recurrence if their keys agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CursorKey {
    Fixed,
    Script(usize),
    Tail(usize),
}

/// Picks one alternative at each branch point of a run.
pub trait ChoiceResolver {
    /// Called only when `alternatives ≥ 2`; the result is reduced mod `alternatives`.
    fn choose(&mut self, alternatives: usize) -> usize;
    fn key(&self) -> CursorKey;
}

/// Always takes the first alternative.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstChoice;

impl ChoiceResolver for FirstChoice {
    fn choose(&mut self, _alternatives: usize) -> usize {
        0
    }

    fn key(&self) -> CursorKey {
        CursorKey::Fixed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceCertificate {
    /// Step indices within the block (0 is the block's first configuration).
    pub m: u64,
    pub n: u64,
    pub shift: u64,
    pub period: u64,
    /// Least head position over the segment `[m, n)`.
    pub min_head: u64,
    /// Greatest head position over the block up to step `n`.
    pub frontier: u64,
    pub state: StateId,
    pub stage_m: Ordinal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted(Snapshot),
    Stuck(Snapshot),
    BudgetExceeded(Snapshot),
    AccelerationFailed(Snapshot, String),
    /// A limit was reached and the program has no limit-state rules.
    NonHalting {
        limit: Snapshot,
        certificate: RecurrenceCertificate,
    },
    /// The program tried to write on a read-only query tape.
    Faulted(Snapshot, String),
}

impl RunOutcome {
    pub fn snapshot(&self) -> &Snapshot {
        match self {
            Self::Halted(s)
            | Self::Stuck(s)
            | Self::BudgetExceeded(s)
            | Self::AccelerationFailed(s, _)
            | Self::Faulted(s, _) => s,
            Self::NonHalting { limit, .. } => limit,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, Self::Halted(_))
    }

    /// Cell 1 of the output tape, for halted runs.
    pub fn output_bit(&self) -> Option<bool> {
        match self {
            Self::Halted(s) => s.tapes.output.bit_at(1).ok(),
            _ => None,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Halted(_) => "halted",
            Self::Stuck(_) => "stuck",
            Self::BudgetExceeded(_) => "budget",
            Self::AccelerationFailed(..) => "accel_failed",
            Self::NonHalting { .. } => "nonhalting",
            Self::Faulted(..) => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Step,
    Limit,
    Halt,
    Stuck,
}

impl TraceEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Step => "step",
            Self::Limit => "limit",
            Self::Halt => "halt",
            Self::Stuck => "stuck",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub snapshot: Snapshot,
    /// Alternative taken to reach this snapshot, when that step was a branch point.
    pub choice: Option<usize>,
    pub event: TraceEvent,
}

impl TraceEntry {
    /// One JSON-lines record.
    pub fn to_json(&self, program: &Program) -> Value {
        let mut v = snapshot_json(program, &self.snapshot);
        v["choice"] = json!(self.choice);
        v["event"] = json!(self.event.as_str());
        v
    }
}

/// JSON rendering of a snapshot: stage, state name, head, and the three tapes.
pub fn snapshot_json(program: &Program, s: &Snapshot) -> Value {
    json!({
        "stage": s.stage.to_string(),
        "state": program.state_name(s.state),
        "head": s.head,
        "tapes": {
            "input": s.tapes.input,
            "scratch": s.tapes.scratch,
            "output": s.tapes.output,
        },
    })
}

/// Receives trace entries as they are produced.
pub type TraceSink<'a> = &'a mut dyn FnMut(TraceEntry);

fn classify(program: &Program, snap: &Snapshot) -> TraceEvent {
    if snap.is_halting() {
        TraceEvent::Halt
    } else if snap
        .read()
        .is_ok_and(|r| program.alternatives(snap.state, r) == 0)
    {
        TraceEvent::Stuck
    } else {
        TraceEvent::Step
    }
}

/// Mutable tape used while stepping: a dense written region followed by the
/// periodic tail of the stream it started from.
#[derive(Debug, Clone)]
enum WorkTape {
    Dense {
        cells: Vec<bool>,
        period: Vec<bool>,
        phase: usize,
    },
    Query(QueryStream),
}

impl WorkTape {
    fn new(stream: &BitStream) -> Self {
        match stream {
            BitStream::Periodic { prefix, period } => Self::Dense {
                cells: prefix.clone(),
                period: period.clone(),
                phase: 0,
            },
            BitStream::Query(q) => Self::Query(q.clone()),
        }
    }

    #[inline]
    fn read(&self, pos: u64) -> bool {
        match self {
            Self::Dense {
                cells,
                period,
                phase,
            } => {
                let i = (pos - 1) as usize;
                if i < cells.len() {
                    cells[i]
                } else {
                    period[(phase + i - cells.len()) % period.len()]
                }
            }
            Self::Query(q) => q.contains(pos),
        }
    }

    /// Returns the old value.
    #[inline]
    fn write(&mut self, pos: u64, bit: bool) -> Result<bool, StreamError> {
        match self {
            Self::Dense {
                cells,
                period,
                phase,
            } => {
                let i = (pos - 1) as usize;
                while cells.len() <= i {
                    cells.push(period[*phase]);
                    *phase = (*phase + 1) % period.len();
                }
                Ok(std::mem::replace(&mut cells[i], bit))
            }
            Self::Query(_) => Err(StreamError::ReadOnly),
        }
    }

    fn to_stream(&self) -> BitStream {
        match self {
            Self::Dense {
                cells,
                period,
                phase,
            } => {
                let mut tail = period.clone();
                tail.rotate_left(*phase);
                BitStream::periodic(cells.clone(), tail).canonicalize()
            }
            Self::Query(q) => BitStream::Query(q.clone()),
        }
    }
}

#[inline]
fn zobrist(tape: usize, cell: u64) -> u64 {
    let mut z = cell.wrapping_mul(4).wrapping_add(tape as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
struct StepRecord {
    state: StateId,
    head: u64,
    cursor: CursorKey,
    hash: u64,
    bounces_before: u64,
    record_step: bool,
    /// (old, new) per tape for the write performed at `head` by this step.
    writes: [Option<(bool, bool)>; 3],
}

/// The state of a block at the moment it ended, plus the recent step history.
#[derive(Debug, Clone)]
pub struct BlockHistory {
    program: String,
    tapes: [WorkTape; 3],
    start_stage: Ordinal,
    head: u64,
    state: StateId,
    step: u64,
    first: u64,
    records: VecDeque<StepRecord>,
}

impl BlockHistory {
    /// Snapshot at the last step of the block.
    pub fn current(&self) -> Snapshot {
        Snapshot {
            program: self.program.clone(),
            tapes: TapeTriple {
                input: self.tapes[0].to_stream(),
                scratch: self.tapes[1].to_stream(),
                output: self.tapes[2].to_stream(),
            },
            head: self.head,
            state: self.state,
            stage: &self.start_stage + &Ordinal::finite(self.step),
        }
    }

    fn record(&self, t: u64) -> &StepRecord {
        &self.records[(t - self.first) as usize]
    }
}

/// How a block ended.
#[derive(Debug, Clone)]
pub enum BlockOutcome {
    Halted(Snapshot),
    Stuck(Snapshot),
    Certified {
        certificate: RecurrenceCertificate,
        history: BlockHistory,
    },
    BudgetExceeded(Snapshot),
    AccelerationFailed(Snapshot, String),
    Faulted(Snapshot, String),
}

struct Engine<'p, 'r, 's> {
    program: &'p Program,
    resolver: &'r mut dyn ChoiceResolver,
    budget: RunBudget,
    sink: Option<TraceSink<'s>>,
    h: BlockHistory,
    base: [BitStream; 3],
    hash: u64,
    bounces: u64,
    max_head: u64,
    exact: HashMap<(StateId, u64, CursorKey, u64), u64>,
    shifted: HashMap<(StateId, CursorKey), VecDeque<u64>>,
}

enum Detect {
    None,
    Found(RecurrenceCertificate),
    Undecidable(String),
}

const MAX_SHIFT_CANDIDATES: usize = 64;

impl<'p, 'r, 's> Engine<'p, 'r, 's> {
    fn new(
        program: &'p Program,
        snap: &Snapshot,
        resolver: &'r mut dyn ChoiceResolver,
        budget: RunBudget,
        sink: Option<TraceSink<'s>>,
    ) -> Self {
        let t = &snap.tapes;
        let base = [t.input.canonicalize(), t.scratch.canonicalize(), t.output.canonicalize()];
        let tapes = [WorkTape::new(&base[0]), WorkTape::new(&base[1]), WorkTape::new(&base[2])];
        Self {
            program,
            resolver,
            budget,
            sink,
            h: BlockHistory {
                program: snap.program.clone(),
                tapes,
                start_stage: snap.stage.clone(),
                head: snap.head,
                state: snap.state,
                step: 0,
                first: 0,
                records: VecDeque::new(),
            },
            base,
            hash: 0,
            bounces: 0,
            max_head: snap.head,
            exact: HashMap::new(),
            shifted: HashMap::new(),
        }
    }

    fn read(&self) -> [bool; 3] {
        let pos = self.h.head;
        [
            self.h.tapes[0].read(pos),
            self.h.tapes[1].read(pos),
            self.h.tapes[2].read(pos),
        ]
    }

    fn run(mut self) -> BlockOutcome {
        loop {
            if self.h.state == Program::HALT {
                return BlockOutcome::Halted(self.h.current());
            }
            let read = self.read();
            let alternatives = self.program.alternatives(self.h.state, read);
            if alternatives == 0 {
                return BlockOutcome::Stuck(self.h.current());
            }
            if self.h.step >= self.budget.max_successor_steps_per_block {
                return BlockOutcome::BudgetExceeded(self.h.current());
            }
            let cursor = self.resolver.key();
            let choice = (alternatives > 1).then(|| self.resolver.choose(alternatives) % alternatives);
            let instr = *self
                .program
                .alternative(self.h.state, read, choice.unwrap_or(0))
                .expect("choice is reduced mod the alternative count");

            let head = self.h.head;
            let mut writes = [None; 3];
            for (tape, w) in instr.write.0.iter().enumerate() {
                let Some(bit) = *w else { continue };
                match self.h.tapes[tape].write(head, bit) {
                    Ok(old) => {
                        if old != bit {
                            self.hash ^= zobrist(tape, head);
                        }
                        writes[tape] = Some((old, bit));
                    }
                    Err(e) => return BlockOutcome::Faulted(self.h.current(), e.to_string()),
                }
            }
            let record = StepRecord {
                state: self.h.state,
                head,
                cursor,
                hash: 0,
                bounces_before: self.bounces,
                record_step: false,
                writes,
            };
            self.push_record(record);

            self.h.head = match instr.mv {
                Move::Left if head == 1 => {
                    self.bounces += 1;
                    1
                }
                Move::Left => head - 1,
                Move::Right => head + 1,
            };
            self.h.state = instr.next;
            self.h.step += 1;

            if let Some(sink) = self.sink.as_mut() {
                let snapshot = self.h.current();
                let event = classify(self.program, &snapshot);
                sink(TraceEntry {
                    snapshot,
                    choice,
                    event,
                });
            }

            if self.h.state == Program::HALT {
                continue;
            }
            match self.detect() {
                Detect::None => {}
                Detect::Found(certificate) => {
                    return BlockOutcome::Certified {
                        certificate,
                        history: self.h,
                    }
                }
                Detect::Undecidable(reason) => {
                    return BlockOutcome::AccelerationFailed(self.h.current(), reason)
                }
            }
        }
    }

    /// Appends the record for the step just taken from configuration `h.step`.
    /// The hash and record flag describe that configuration, so they are filled
    /// in from the values before this step's writes.
    fn push_record(&mut self, mut record: StepRecord) {
        let t = self.h.step;
        let mut pre_hash = self.hash;
        for (tape, w) in record.writes.iter().enumerate() {
            if let Some((old, new)) = *w {
                if old != new {
                    pre_hash ^= zobrist(tape, record.head);
                }
            }
        }
        record.hash = pre_hash;
        if t == 0 || record.head > self.max_head {
            record.record_step = true;
        }
        self.max_head = self.max_head.max(record.head);
        self.exact
            .insert((record.state, record.head, record.cursor, record.hash), t);
        if record.record_step {
            self.shifted
                .entry((record.state, record.cursor))
                .or_default()
                .push_back(t);
        }
        self.h.records.push_back(record);
        if self.h.records.len() > self.budget.history_window.max(1) {
            let old = self.h.records.pop_front().expect("nonempty");
            let t_old = self.h.first;
            self.h.first += 1;
            let key = (old.state, old.head, old.cursor, old.hash);
            if self.exact.get(&key) == Some(&t_old) {
                self.exact.remove(&key);
            }
            if old.record_step {
                if let Some(list) = self.shifted.get_mut(&(old.state, old.cursor)) {
                    if list.front() == Some(&t_old) {
                        list.pop_front();
                    }
                }
            }
        }
    }

    fn detect(&mut self) -> Detect {
        let cursor = self.resolver.key();
        let key = (self.h.state, self.h.head, cursor, self.hash);
        if let Some(&m) = self.exact.get(&key) {
            if m >= self.h.first && self.exact_loop(m) {
                return Detect::Found(self.certificate(m, 0));
            }
        }
        if self.h.head <= self.max_head {
            return Detect::None;
        }
        let Some(cands) = self.shifted.get(&(self.h.state, cursor)) else {
            return Detect::None;
        };
        let cands: Vec<u64> = cands
            .iter()
            .rev()
            .copied()
            .filter(|&m| m >= self.h.first)
            .take(MAX_SHIFT_CANDIDATES)
            .collect();
        let mut undecidable = None;
        for m in cands {
            match self.shifted_loop(m) {
                ShiftCheck::No => {}
                ShiftCheck::Yes(d) => return Detect::Found(self.certificate(m, d)),
                ShiftCheck::Undecidable(reason) => undecidable = Some(reason),
            }
        }
        match undecidable {
            Some(reason) => Detect::Undecidable(reason),
            None => Detect::None,
        }
    }

    fn certificate(&self, m: u64, shift: u64) -> RecurrenceCertificate {
        let min_head = (m..self.h.step)
            .map(|t| self.h.record(t).head)
            .min()
            .unwrap_or(self.h.head);
        RecurrenceCertificate {
            m,
            n: self.h.step,
            shift,
            period: self.h.step - m,
            min_head,
            frontier: self.max_head.max(self.h.head),
            state: self.h.state,
            stage_m: &self.h.start_stage + &Ordinal::finite(m),
        }
    }

    /// Net effect of the writes in `[m, n)` is nothing.
    fn exact_loop(&self, m: u64) -> bool {
        let mut first_old: HashMap<(usize, u64), bool> = HashMap::new();
        for t in m..self.h.step {
            let r = self.h.record(t);
            for (tape, w) in r.writes.iter().enumerate() {
                if let Some((old, _)) = *w {
                    first_old.entry((tape, r.head)).or_insert(old);
                }
            }
        }
        first_old
            .into_iter()
            .all(|((tape, cell), old)| self.h.tapes[tape].read(cell) == old)
    }

    fn shifted_loop(&self, m: u64) -> ShiftCheck {
        let rm = self.h.record(m);
        let n = self.h.step;
        if self.h.head <= rm.head {
            return ShiftCheck::No;
        }
        let d = self.h.head - rm.head;
        if rm.bounces_before != self.bounces {
            return ShiftCheck::No;
        }
        // Cells at or beyond `untouched` have never been visited in this block.
        let untouched = self.h.head;
        let mut query_input = false;
        for (tape, base) in self.base.iter().enumerate() {
            match base {
                BitStream::Periodic { prefix, period } => {
                    if (untouched as usize) <= prefix.len() || !(d as usize).is_multiple_of(period.len()) {
                        return ShiftCheck::No;
                    }
                }
                BitStream::Query(q) => {
                    if q.families().is_empty() {
                        if q.support().last().is_some_and(|&max| max >= untouched) {
                            return ShiftCheck::No;
                        }
                    } else {
                        debug_assert_eq!(tape, 0);
                        query_input = true;
                    }
                }
            }
        }
        let mut undo: HashMap<(usize, u64), bool> = HashMap::new();
        let mut lo = u64::MAX;
        for t in m..n {
            let r = self.h.record(t);
            lo = lo.min(r.head);
            for (tape, w) in r.writes.iter().enumerate() {
                if let Some((old, _)) = *w {
                    undo.entry((tape, r.head)).or_insert(old);
                }
            }
        }
        for tape in 0..3 {
            for c in lo..untouched {
                let at_m = undo
                    .get(&(tape, c))
                    .copied()
                    .unwrap_or_else(|| self.h.tapes[tape].read(c));
                if at_m != self.h.tapes[tape].read(c + d) {
                    return ShiftCheck::No;
                }
            }
        }
        if query_input {
            return ShiftCheck::Undecidable(format!(
                "run repeats with shift {d} but the query input tape cannot be compared under a shift"
            ));
        }
        ShiftCheck::Yes(d)
    }
}

enum ShiftCheck {
    No,
    Yes(u64),
    Undecidable(String),
}

/// Steps from `snap` until halt, stuck, a recurrence certificate, or budget.
/// Successor snapshots are passed to `sink` as they are produced; `snap` itself is not.
pub fn run_block(
    program: &Program,
    snap: &Snapshot,
    resolver: &mut dyn ChoiceResolver,
    budget: RunBudget,
    sink: Option<TraceSink<'_>>,
) -> BlockOutcome {
    Engine::new(program, snap, resolver, budget, sink).run()
}

/// The limit snapshot of a certified block: limit state, head on cell 1, stage the
/// next limit after step `m`, and each cell the limsup of its values.
pub fn limit_jump(cert: &RecurrenceCertificate, history: &BlockHistory) -> Snapshot {
    let stream = |tape: usize| -> BitStream {
        if cert.shift == 0 {
            if let WorkTape::Query(q) = &history.tapes[tape] {
                return BitStream::Query(q.clone());
            }
            // Cells touched in the loop are 1 at the limit iff 1 at some step of the loop.
            let mut out = history.tapes[tape].to_stream();
            let mut seen: HashMap<u64, bool> = HashMap::new();
            for t in cert.m..cert.n {
                let r = history.record(t);
                if let Some((old, new)) = r.writes[tape] {
                    let e = seen.entry(r.head).or_insert(false);
                    *e |= old | new;
                }
            }
            for (cell, one) in seen {
                out = out.write_bit(cell, one).expect("dense tape");
            }
            out
        } else {
            // Cells below `lo + d` are never visited after step n; from `lo` on the
            // limit repeats with period d.
            let lo = cert.min_head;
            let prefix: Vec<bool> = (1..lo).map(|c| history.tapes[tape].read(c)).collect();
            let period: Vec<bool> = (lo..lo + cert.shift)
                .map(|c| history.tapes[tape].read(c))
                .collect();
            BitStream::periodic(prefix, period).canonicalize()
        }
    };
    Snapshot {
        program: history.program.clone(),
        tapes: TapeTriple {
            input: stream(0),
            scratch: stream(1),
            output: stream(2),
        },
        head: 1,
        state: Program::LIMIT,
        stage: cert.stage_m.next_limit(),
    }
}

/// Result of a full transfinite run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub trace: Vec<TraceEntry>,
}

/// Runs `program` from its start snapshot on `input` through successor steps and
/// limit jumps, emitting every snapshot to `sink`.
pub fn run_transfinite_with(
    program: &Program,
    input: &BitStream,
    resolver: &mut dyn ChoiceResolver,
    budget: RunBudget,
    sink: Option<TraceSink<'_>>,
) -> RunOutcome {
    run_from(program, program.start_snapshot(input.canonicalize()), resolver, budget, sink)
}

/// Like [`run_transfinite_with`], but starting from an arbitrary snapshot of `program`.
pub fn run_from(
    program: &Program,
    mut snap: Snapshot,
    resolver: &mut dyn ChoiceResolver,
    budget: RunBudget,
    mut sink: Option<TraceSink<'_>>,
) -> RunOutcome {
    if let Some(s) = sink.as_mut() {
        s(TraceEntry {
            event: classify(program, &snap),
            snapshot: snap.clone(),
            choice: None,
        });
    }
    let mut jumps = 0;
    loop {
        let block = run_block(program, &snap, resolver, budget, sink.as_mut().map(|s| &mut **s as TraceSink<'_>));
        match block {
            BlockOutcome::Halted(s) => return RunOutcome::Halted(s),
            BlockOutcome::Stuck(s) => return RunOutcome::Stuck(s),
            BlockOutcome::BudgetExceeded(s) => return RunOutcome::BudgetExceeded(s),
            BlockOutcome::AccelerationFailed(s, r) => return RunOutcome::AccelerationFailed(s, r),
            BlockOutcome::Faulted(s, r) => return RunOutcome::Faulted(s, r),
            BlockOutcome::Certified {
                certificate,
                history,
            } => {
                if jumps >= budget.max_limit_jumps {
                    return RunOutcome::BudgetExceeded(history.current());
                }
                jumps += 1;
                let limit = limit_jump(&certificate, &history);
                if let Some(s) = sink.as_mut() {
                    s(TraceEntry {
                        snapshot: limit.clone(),
                        choice: None,
                        event: TraceEvent::Limit,
                    });
                }
                if !program.has_limit_rules() {
                    return RunOutcome::NonHalting {
                        limit,
                        certificate,
                    };
                }
                snap = limit;
            }
        }
    }
}

/// [`run_transfinite_with`] collecting the whole trace.
pub fn run_transfinite(
    program: &Program,
    input: &BitStream,
    resolver: &mut dyn ChoiceResolver,
    budget: RunBudget,
) -> RunReport {
    let mut trace = Vec::new();
    let mut push = |e: TraceEntry| trace.push(e);
    let outcome = run_transfinite_with(program, input, resolver, budget, Some(&mut push));
    RunReport { outcome, trace }
}

/// [`run_transfinite_with`] without a trace.
pub fn run_outcome(
    program: &Program,
    input: &BitStream,
    resolver: &mut dyn ChoiceResolver,
    budget: RunBudget,
) -> RunOutcome {
    run_transfinite_with(program, input, resolver, budget, None)
}
