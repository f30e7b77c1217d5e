//! Nondeterministic semantics: choice policies, finite-depth computation trees,
//! and bounded recognition.
//!
//! A [`ChoicePolicy`] is a finite script followed by a periodic tail of choice
//! indices; each one picks out a single branch of the computation tree, including
//! its behavior across limit stages. Exploring every policy within some bounds is
//! a finite sample of the tree. A bounded search can find a witness for
//! membership but can never refute it, so recognition answers either
//! [`Recognition::Accept`] or [`Recognition::NoWitnessFound`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{ExploreError, ParseError};
use crate::machine::{apply_instruction, successors, Program, Snapshot};
use crate::ordinal::Ordinal;
use crate::semantics::{
    run_transfinite, run_transfinite_with, ChoiceResolver, CursorKey, RunBudget, RunOutcome,
    TraceEntry,
};
use crate::streams::BitStream;
use crate::word;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoicePolicy {
    pub script: Vec<usize>,
    /// Never empty.
    pub tail: Vec<usize>,
}

impl ChoicePolicy {
    /// Panics on an empty tail.
    pub fn new(script: Vec<usize>, tail: Vec<usize>) -> Self {
        assert!(!tail.is_empty(), "policy tail must be nonempty");
        Self { script, tail }
    }

    pub fn constant(index: usize) -> Self {
        Self::new(Vec::new(), vec![index])
    }

    /// The `k`-th choice (0-based) before reduction mod the local width.
    pub fn index(&self, k: usize) -> usize {
        *word::letter_at(&self.script, &self.tail, k)
    }

    /// The first `n` choices.
    pub fn resolved(&self, n: usize) -> Vec<usize> {
        (0..n).map(|k| self.index(k)).collect()
    }

    /// Shortest script and primitive tail describing the same choice sequence.
    pub fn canonical(&self) -> Self {
        let (script, tail) = word::canonical(&self.script, &self.tail);
        Self { script, tail }
    }

    fn order_key(&self) -> (usize, &[usize], usize, &[usize]) {
        (self.script.len(), &self.script, self.tail.len(), &self.tail)
    }

    pub fn cursor(&self) -> PolicyCursor<'_> {
        PolicyCursor {
            policy: self,
            consumed: 0,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "script": self.script, "tail": self.tail })
    }
}

impl PartialOrd for ChoicePolicy {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical enumeration order: by script length, script, tail length, tail.
impl Ord for ChoicePolicy {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

/// `script=1.0.1,tail=0.1`; the script part is omitted when empty.
impl fmt::Display for ChoicePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.script.is_empty() {
            write!(f, "script={},", join(&self.script))?;
        }
        write!(f, "tail={}", join(&self.tail))
    }
}

impl FromStr for ChoicePolicy {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let list = |v: &str| -> Result<Vec<usize>, ParseError> {
            v.split('.')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| ParseError::new(1, 1, format!("bad choice index `{t}`")))
                })
                .collect()
        };
        let mut script = Vec::new();
        let mut tail = None;
        for part in s.trim().split(',') {
            match part.split_once('=') {
                Some(("script", v)) => script = list(v)?,
                Some(("tail", v)) => tail = Some(list(v)?),
                _ => return Err(ParseError::new(1, 1, format!("bad policy part `{part}`"))),
            }
        }
        match tail {
            Some(t) if !t.is_empty() => Ok(Self::new(script, t)),
            _ => Err(ParseError::new(1, 1, "policy needs a nonempty `tail=`")),
        }
    }
}

/// A policy being consumed by one run.
#[derive(Debug, Clone)]
pub struct PolicyCursor<'a> {
    policy: &'a ChoicePolicy,
    consumed: usize,
}

impl ChoiceResolver for PolicyCursor<'_> {
    fn choose(&mut self, alternatives: usize) -> usize {
        let i = self.policy.index(self.consumed);
        self.consumed += 1;
        i % alternatives
    }

    fn key(&self) -> CursorKey {
        let s = self.policy.script.len();
        if self.consumed < s {
            CursorKey::Script(self.consumed)
        } else {
            CursorKey::Tail((self.consumed - s) % self.policy.tail.len())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyBounds {
    pub max_script: usize,
    pub max_tail: usize,
}

impl Default for PolicyBounds {
    fn default() -> Self {
        Self {
            max_script: 4,
            max_tail: 3,
        }
    }
}

pub const DEFAULT_POLICY_CAP: usize = 1 << 16;

/// Every policy over indices `0..width` with script length ≤ `max_script` and tail
/// length in `1..=max_tail`, deduplicated by canonical form, in canonical order.
pub fn enumerate_policies(
    bounds: PolicyBounds,
    width: usize,
    cap: usize,
) -> Result<Vec<ChoicePolicy>, ExploreError> {
    let width = width.max(1);
    let words = |max_len: usize, min_len: usize| -> Result<Vec<Vec<usize>>, ExploreError> {
        let mut out = Vec::new();
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        for len in 0..=max_len {
            if len >= min_len {
                out.extend(level.iter().cloned());
                if out.len() > cap {
                    return Err(ExploreError::TooManyPolicies(cap));
                }
            }
            if len < max_len {
                level = level
                    .iter()
                    .flat_map(|w| {
                        (0..width).map(move |i| {
                            let mut w = w.clone();
                            w.push(i);
                            w
                        })
                    })
                    .collect();
            }
        }
        Ok(out)
    };
    let scripts = words(bounds.max_script, 0)?;
    let tails = words(bounds.max_tail, 1)?;
    if scripts.len().saturating_mul(tails.len()) > cap {
        return Err(ExploreError::TooManyPolicies(cap));
    }
    let set: BTreeSet<ChoicePolicy> = scripts
        .iter()
        .flat_map(|s| tails.iter().map(move |t| ChoicePolicy::new(s.clone(), t.clone()).canonical()))
        .collect();
    Ok(set.into_iter().collect())
}

/// A node of the computation tree, keyed by the choices made at branch points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// Choice indices taken at the branch points on the way here.
    pub choices: Vec<usize>,
    pub snapshot: Snapshot,
    /// Keyed by choice index; a forced step has the single key 0.
    pub children: BTreeMap<usize, TreeNode>,
}

impl TreeNode {
    pub fn leaves(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            if n.children.is_empty() {
                out.push(n);
            } else {
                stack.extend(n.children.values().rev());
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.values().map(TreeNode::node_count).sum::<usize>()
    }

    pub fn to_json(&self, program: &Program) -> Value {
        let s = &self.snapshot;
        let children: Vec<Value> = self
            .children
            .iter()
            .map(|(k, c)| json!({ "choice": k, "node": c.to_json(program) }))
            .collect();
        json!({
            "choices": self.choices,
            "stage": s.stage.to_string(),
            "state": program.state_name(s.state),
            "head": s.head,
            "tapes": { "input": s.tapes.input, "scratch": s.tapes.scratch, "output": s.tapes.output },
            "children": children,
        })
    }
}

pub const DEFAULT_NODE_CAP: usize = 1 << 20;

/// Breadth-first materialization of the tree's first `depth` successor steps.
/// Halted and stuck nodes are leaves.
pub fn expand_tree(
    program: &Program,
    input: &BitStream,
    depth: usize,
    node_cap: usize,
) -> Result<TreeNode, ExploreError> {
    struct Flat {
        parent: Option<(usize, usize)>,
        choices: Vec<usize>,
        snapshot: Snapshot,
        depth: usize,
    }
    let mut arena = vec![Flat {
        parent: None,
        choices: Vec::new(),
        snapshot: program.start_snapshot(input.canonicalize()),
        depth: 0,
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if arena[i].depth >= depth || arena[i].snapshot.is_halting() {
            continue;
        }
        let Ok(alts) = successors(program, &arena[i].snapshot) else {
            continue;
        };
        let branching = alts.len() > 1;
        for (k, instr) in alts.iter().enumerate() {
            let Ok(next) = apply_instruction(&arena[i].snapshot, instr) else {
                continue;
            };
            if arena.len() >= node_cap {
                return Err(ExploreError::TreeTooLarge(node_cap));
            }
            let mut choices = arena[i].choices.clone();
            if branching {
                choices.push(k);
            }
            arena.push(Flat {
                parent: Some((i, k)),
                choices,
                snapshot: next,
                depth: arena[i].depth + 1,
            });
            queue.push_back(arena.len() - 1);
        }
    }
    // Children always come after their parent, so fold from the back.
    let mut built: Vec<Option<TreeNode>> = arena
        .iter()
        .map(|f| {
            Some(TreeNode {
                choices: f.choices.clone(),
                snapshot: f.snapshot.clone(),
                children: BTreeMap::new(),
            })
        })
        .collect();
    for i in (1..arena.len()).rev() {
        let node = built[i].take().expect("each node is attached once");
        let (p, k) = arena[i].parent.expect("non-root");
        built[p]
            .as_mut()
            .expect("parent not yet attached")
            .children
            .insert(k, node);
    }
    Ok(built[0].take().expect("root"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Uses rayon when the `parallel` feature is on; otherwise sequential.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreOptions {
    pub parallelism: Parallelism,
    pub keep_traces: bool,
    pub policy_cap: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self {
            parallelism: Parallelism::default(),
            keep_traces: false,
            policy_cap: DEFAULT_POLICY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathResult {
    pub policy: ChoicePolicy,
    pub outcome: RunOutcome,
    pub halt_stage: Option<Ordinal>,
    /// Cell 1 of the output tape at halt.
    pub output_bit: Option<bool>,
    pub trace: Option<Vec<TraceEntry>>,
}

impl PathResult {
    pub fn accepts(&self) -> bool {
        self.output_bit == Some(true)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "policy": self.policy.to_json(),
            "outcome": self.outcome.label(),
            "halt_stage": self.halt_stage.as_ref().map(Ordinal::to_string),
            "output_bit": self.output_bit.map(u8::from),
        })
    }
}

/// Runs `policy` to completion.
pub fn run_path(
    program: &Program,
    input: &BitStream,
    policy: &ChoicePolicy,
    budget: RunBudget,
    keep_trace: bool,
) -> PathResult {
    let mut cursor = policy.cursor();
    let (outcome, trace) = if keep_trace {
        let report = run_transfinite(program, input, &mut cursor, budget);
        (report.outcome, Some(report.trace))
    } else {
        (run_transfinite_with(program, input, &mut cursor, budget, None), None)
    };
    let halt_stage = outcome.is_halted().then(|| outcome.snapshot().stage.clone());
    PathResult {
        policy: policy.clone(),
        output_bit: outcome.output_bit(),
        halt_stage,
        outcome,
        trace,
    }
}

/// Maps `f` over `items` preserving order, in parallel when asked and available.
pub fn map_ordered<T, U, F>(items: &[T], parallelism: Parallelism, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match parallelism {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// First item (in order) for which `f` returns `Some`.
fn find_first<T, U, F>(items: &[T], parallelism: Parallelism, f: F) -> Option<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync + Send,
{
    match parallelism {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => items.par_iter().find_map_first(f),
        _ => items.iter().find_map(f),
    }
}

/// One run per enumerated policy, in canonical policy order.
pub fn explore(
    program: &Program,
    input: &BitStream,
    bounds: PolicyBounds,
    budget: RunBudget,
    options: ExploreOptions,
) -> Result<Vec<PathResult>, ExploreError> {
    let policies = enumerate_policies(bounds, program.branching_width(), options.policy_cap)?;
    Ok(map_ordered(&policies, options.parallelism, |p| {
        run_path(program, input, p, budget, options.keep_traces)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recognition {
    /// Some explored path halted with output 1; the first such policy.
    Accept(ChoicePolicy),
    /// No explored path accepted. This is not evidence of non-membership.
    NoWitnessFound,
}

impl Recognition {
    pub fn is_accept(&self) -> bool {
        matches!(self, Self::Accept(_))
    }
}

/// Searches the bounded policy space for a path that halts with output 1.
pub fn recognizes(
    program: &Program,
    input: &BitStream,
    bounds: PolicyBounds,
    budget: RunBudget,
    options: ExploreOptions,
) -> Result<Recognition, ExploreError> {
    let policies = enumerate_policies(bounds, program.branching_width(), options.policy_cap)?;
    let witness = find_first(&policies, options.parallelism, |p| {
        run_path(program, input, p, budget, false)
            .accepts()
            .then(|| p.clone())
    });
    Ok(witness.map_or(Recognition::NoWitnessFound, Recognition::Accept))
}

/// Same search as [`recognizes`]; `program` is taken to recognize the complement, so
/// `Accept` means the input is outside the set.
pub fn co_recognizes(
    program: &Program,
    input: &BitStream,
    bounds: PolicyBounds,
    budget: RunBudget,
    options: ExploreOptions,
) -> Result<Recognition, ExploreError> {
    recognizes(program, input, bounds, budget, options)
}

/// The JSON exploration report: every path plus an acceptance summary.
pub fn exploration_report(paths: &[PathResult]) -> Value {
    let witness = paths.iter().find(|p| p.accepts()).map(|p| p.policy.to_json());
    json!({
        "paths": paths.iter().map(PathResult::to_json).collect::<Vec<_>>(),
        "summary": { "accepted": witness.is_some(), "witness": witness },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(script: &[usize], tail: &[usize]) -> ChoicePolicy {
        ChoicePolicy::new(script.to_vec(), tail.to_vec())
    }

    #[test]
    fn enumeration_examples() {
        let pols = enumerate_policies(PolicyBounds { max_script: 0, max_tail: 1 }, 2, 1000).unwrap();
        assert_eq!(pols, vec![p(&[], &[0]), p(&[], &[1])]);

        // By hand: 2 empty-script policies plus 4 with one script letter; [0]0^ω and
        // [1]1^ω collapse, leaving 4.
        let pols = enumerate_policies(PolicyBounds { max_script: 1, max_tail: 1 }, 2, 1000).unwrap();
        assert_eq!(pols, vec![p(&[], &[0]), p(&[], &[1]), p(&[0], &[1]), p(&[1], &[0])]);

        let pols = enumerate_policies(PolicyBounds { max_script: 3, max_tail: 3 }, 1, 1000).unwrap();
        assert_eq!(pols, vec![p(&[], &[0])]);
    }

    #[test]
    fn enumeration_cap() {
        let r = enumerate_policies(PolicyBounds { max_script: 10, max_tail: 10 }, 3, 100);
        assert_eq!(r, Err(ExploreError::TooManyPolicies(100)));
    }

    #[test]
    fn canonical_policies() {
        assert_eq!(p(&[0, 1], &[0, 1]).canonical(), p(&[], &[0, 1]));
        assert_eq!(p(&[1], &[0, 1]).canonical(), p(&[], &[1, 0]));
        assert_eq!(p(&[1, 0, 1], &[0]).canonical(), p(&[1, 0, 1], &[0]));
        assert_eq!(p(&[], &[1, 1, 1]).canonical(), p(&[], &[1]));
    }

    #[test]
    fn cursor_keys() {
        let pol = p(&[1], &[0, 1]);
        let mut c = pol.cursor();
        assert_eq!(c.key(), CursorKey::Script(0));
        assert_eq!(c.choose(2), 1);
        assert_eq!(c.key(), CursorKey::Tail(0));
        assert_eq!(c.choose(2), 0);
        assert_eq!(c.key(), CursorKey::Tail(1));
        assert_eq!(c.choose(2), 1);
        assert_eq!(c.key(), CursorKey::Tail(0));
        let wide = p(&[], &[5]);
        assert_eq!(wide.cursor().choose(3), 2);
    }

    #[test]
    fn policy_strings() {
        let pol: ChoicePolicy = "tail=1".parse().unwrap();
        assert_eq!(pol, p(&[], &[1]));
        let pol: ChoicePolicy = "script=1.0.1,tail=0".parse().unwrap();
        assert_eq!(pol, p(&[1, 0, 1], &[0]));
        assert_eq!(pol.to_string(), "script=1.0.1,tail=0");
        assert!("script=1".parse::<ChoicePolicy>().is_err());
        assert!("tail=".parse::<ChoicePolicy>().is_err());
    }
}
