//! The `ittm` command line.
//!
//! Exit codes for `run`: 0 halted with output 1, 1 halted with output 0, 2 budget
//! exhausted / acceleration failed / no limit rules, 3 usage, parse, stuck, or
//! runtime errors. `explore` and `recognize`: 0 witness found, 1 none found, 2 a
//! global resource cap was hit, 3 usage errors.

use std::ffi::OsString;
use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use crate::coding::{self, RelationCode};
use crate::explorer::{
    self, exploration_report, ChoicePolicy, ExploreOptions, Parallelism, PolicyBounds,
    Recognition,
};
use crate::machine::{parse_program, Program};
use crate::programs;
use crate::semantics::{
    run_transfinite_with, snapshot_json, ChoiceResolver, FirstChoice, RunBudget, RunOutcome,
    TraceEntry,
};
use crate::streams::BitStream;

#[derive(Debug, Parser)]
#[command(name = "ittm", version, about = "Infinite time Turing machine simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one branch through successor and limit stages.
    Run(RunArgs),
    /// Run every policy within the bounds and report each path.
    Explore(ExploreArgs),
    /// Search the bounded policy space for an accepting path.
    Recognize(RecognizeArgs),
    /// Print the computation tree down to a finite depth.
    Tree(TreeArgs),
    /// Pair positions, relation codes, snapshot and run codes.
    #[command(subcommand)]
    Encode(EncodeCommand),
    /// Inverse of `encode`.
    #[command(subcommand)]
    Decode(DecodeCommand),
    /// Built-in programs.
    #[command(subcommand)]
    Samples(SamplesCommand),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Program file, or a built-in sample name (see `samples list`).
    pub program: String,
    /// Input stream spec.
    #[arg(long, default_value = "prefix=,period=0")]
    pub input: String,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_limits: u32,
}

impl BudgetArgs {
    fn budget(&self) -> RunBudget {
        RunBudget {
            max_successor_steps_per_block: self.max_steps,
            max_limit_jumps: self.max_limits,
            ..RunBudget::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 4)]
    pub script_len: usize,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub tail_len: u64,
    /// Evaluate paths one at a time.
    #[arg(long)]
    pub sequential: bool,
}

impl BoundArgs {
    fn bounds(&self) -> PolicyBounds {
        PolicyBounds {
            max_script: self.script_len,
            max_tail: self.tail_len as usize,
        }
    }

    fn options(&self) -> ExploreOptions {
        ExploreOptions {
            parallelism: if self.sequential {
                Parallelism::Sequential
            } else {
                Parallelism::Parallel
            },
            ..ExploreOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Summary,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    /// Choice policy, e.g. `script=1.0,tail=1`; required when the program branches.
    #[arg(long)]
    pub policy: Option<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct RecognizeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Treat the program as a recognizer of the complement.
    #[arg(long)]
    pub complement: bool,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = explorer::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum EncodeCommand {
    /// Position `2^i · 3^j` of a pair.
    Pair {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
    },
    /// Relation code of pairs like `(0,1),(1,2)`.
    Relation {
        #[arg(long)]
        pairs: String,
    },
    /// Code of the start snapshot of a program on an input.
    Snapshot {
        #[command(flatten)]
        source: Source,
    },
    /// Code of the trace of a run (which must stay short).
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        policy: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Interleaving of two streams.
    RealPair {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum DecodeCommand {
    Pair {
        #[arg(long)]
        pos: u64,
    },
    Relation {
        #[arg(long)]
        stream: String,
        #[arg(long, default_value_t = programs::COUNT_FIELD_BOUND)]
        field: u32,
    },
    /// Decodes a snapshot code (read from standard input when omitted).
    Snapshot {
        #[arg(long)]
        program: String,
        code: Option<String>,
    },
    Run {
        #[arg(long)]
        program: String,
        #[arg(long)]
        stream: String,
    },
    RealPair {
        #[arg(long)]
        stream: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum SamplesCommand {
    List,
    /// Print the DSL text of a built-in program.
    Emit { name: String },
}

/// A failure that ends the command with a diagnostic.
struct Fail {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Fail {
    Fail {
        code: 3,
        message: message.into(),
    }
}

fn io_fail(e: io::Error) -> Fail {
    usage(format!("i/o error: {e}"))
}

/// Resolves a sample name, `guess-check:<file>`, or a program file.
pub fn load_program(spec: &str) -> Result<Program, String> {
    if let Some(p) = programs::sample(spec) {
        return Ok(p);
    }
    let read = |path: &str| {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        parse_program(&text).map_err(|e| format!("{path}:{e}"))
    };
    if let Some(path) = spec.strip_prefix("guess-check:") {
        let checker = read(path)?;
        return programs::make_guess_and_check(&checker).map_err(|e| e.to_string());
    }
    read(spec)
}

fn load(source: &Source) -> Result<(Program, BitStream), Fail> {
    let program = load_program(&source.program).map_err(usage)?;
    let input = parse_stream(&source.input)?;
    Ok((program, input))
}

fn parse_stream(s: &str) -> Result<BitStream, Fail> {
    s.parse()
        .map_err(|e| usage(format!("bad stream spec `{s}`: {e}")))
}

fn parse_policy(s: &str) -> Result<ChoicePolicy, Fail> {
    s.parse()
        .map_err(|e| usage(format!("bad policy `{s}`: {e}")))
}

fn resolver<'a>(
    program: &Program,
    policy: &'a Option<ChoicePolicy>,
) -> Result<Box<dyn ChoiceResolver + 'a>, Fail> {
    match policy {
        Some(p) => Ok(Box::new(p.cursor())),
        None if program.is_deterministic() => Ok(Box::new(FirstChoice)),
        None => Err(usage(format!(
            "program `{}` branches; pass --policy (e.g. --policy tail=0)",
            program.name()
        ))),
    }
}

/// Renders a stream, listing the 1s of finitely supported streams.
fn stream_spec(s: &BitStream) -> String {
    match s {
        BitStream::Periodic { prefix, period } if period.iter().all(|b| !b) && !prefix.is_empty() => {
            let ones: Vec<String> = prefix
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| (i + 1).to_string())
                .collect();
            format!("support={}", ones.join(","))
        }
        _ => s.to_string(),
    }
}

fn parse_pairs(s: &str) -> Result<RelationCode, Fail> {
    let nums: Vec<u32> = s
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("bad number `{t}`"))))
        .collect::<Result<_, _>>()?;
    if !nums.len().is_multiple_of(2) {
        return Err(usage("pairs need an even count of numbers"));
    }
    Ok(RelationCode::new(nums.chunks(2).map(|c| (c[0], c[1]))))
}

fn render_relation(r: &RelationCode) -> String {
    let mut pairs: Vec<(u64, u32, u32)> = r
        .pairs
        .iter()
        .map(|&(i, j)| (coding::pos_of_pair(i, j).unwrap_or(u64::MAX), i, j))
        .collect();
    pairs.sort_unstable();
    let body: Vec<String> = pairs.iter().map(|(_, i, j)| format!("({i},{j})")).collect();
    format!("{{{}}}", body.join(","))
}

/// Exit code for a finished run.
pub fn run_exit_code(outcome: &RunOutcome) -> i32 {
    match outcome {
        RunOutcome::Halted(_) if outcome.output_bit() == Some(true) => 0,
        RunOutcome::Halted(_) => 1,
        RunOutcome::BudgetExceeded(_)
        | RunOutcome::AccelerationFailed(..)
        | RunOutcome::NonHalting { .. } => 2,
        RunOutcome::Stuck(_) | RunOutcome::Faulted(..) => 3,
    }
}

fn outcome_summary(program: &Program, outcome: &RunOutcome) -> serde_json::Value {
    let mut v = snapshot_json(program, outcome.snapshot());
    v["outcome"] = json!(outcome.label());
    v["output_bit"] = json!(outcome.output_bit().map(u8::from));
    if let RunOutcome::AccelerationFailed(_, why) | RunOutcome::Faulted(_, why) = outcome {
        v["reason"] = json!(why);
    }
    v
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Fail> {
    match cmd {
        Command::Run(a) => run_command(a, out),
        Command::Explore(a) => explore_command(a, out),
        Command::Recognize(a) => recognize_command(a, out),
        Command::Tree(a) => {
            let (program, input) = load(&a.source)?;
            match explorer::expand_tree(&program, &input, a.depth, a.node_cap) {
                Ok(tree) => {
                    writeln!(out, "{}", tree.to_json(&program)).map_err(io_fail)?;
                    Ok(0)
                }
                Err(e) => Err(Fail {
                    code: 2,
                    message: e.to_string(),
                }),
            }
        }
        Command::Encode(c) => encode_command(c, out).map(|_| 0),
        Command::Decode(c) => decode_command(c, out).map(|_| 0),
        Command::Samples(SamplesCommand::List) => {
            for name in programs::SAMPLE_NAMES {
                writeln!(out, "{name}").map_err(io_fail)?;
            }
            Ok(0)
        }
        Command::Samples(SamplesCommand::Emit { name }) => {
            let p = load_program(&name).map_err(usage)?;
            write!(out, "{}", p.to_dsl()).map_err(io_fail)?;
            Ok(0)
        }
    }
}

fn run_command(a: RunArgs, out: &mut dyn Write) -> Result<i32, Fail> {
    let (program, input) = load(&a.source)?;
    let policy = a.policy.as_deref().map(parse_policy).transpose()?;
    let mut res = resolver(&program, &policy)?;
    let mut write_err = None;
    let outcome = {
        let mut emit = |e: TraceEntry| {
            if write_err.is_none() {
                if let Err(x) = writeln!(out, "{}", e.to_json(&program)) {
                    write_err = Some(x);
                }
            }
        };
        let sink: Option<&mut dyn FnMut(TraceEntry)> = match a.format {
            Format::Jsonl => Some(&mut emit),
            Format::Summary => None,
        };
        run_transfinite_with(&program, &input, res.as_mut(), a.budget.budget(), sink)
    };
    if let Some(e) = write_err {
        return Err(io_fail(e));
    }
    if a.format == Format::Summary {
        writeln!(out, "{}", outcome_summary(&program, &outcome)).map_err(io_fail)?;
    }
    Ok(run_exit_code(&outcome))
}

fn explore_command(a: ExploreArgs, out: &mut dyn Write) -> Result<i32, Fail> {
    let (program, input) = load(&a.source)?;
    match explorer::explore(&program, &input, a.bounds.bounds(), a.budget.budget(), a.bounds.options()) {
        Ok(paths) => {
            let report = exploration_report(&paths);
            writeln!(out, "{report}").map_err(io_fail)?;
            Ok(if paths.iter().any(|p| p.accepts()) { 0 } else { 1 })
        }
        Err(e) => Err(Fail {
            code: 2,
            message: e.to_string(),
        }),
    }
}

fn recognize_command(a: RecognizeArgs, out: &mut dyn Write) -> Result<i32, Fail> {
    let (program, input) = load(&a.source)?;
    let search = if a.complement {
        explorer::co_recognizes
    } else {
        explorer::recognizes
    };
    let result = search(&program, &input, a.bounds.bounds(), a.budget.budget(), a.bounds.options())
        .map_err(|e| Fail {
            code: 2,
            message: e.to_string(),
        })?;
    let set = if a.complement { "complement" } else { "set" };
    let v = match &result {
        Recognition::Accept(p) => json!({
            "membership": set, "result": "accept", "witness": p.to_json(),
        }),
        Recognition::NoWitnessFound => json!({
            "membership": set, "result": "no_witness_found", "witness": null,
        }),
    };
    writeln!(out, "{v}").map_err(io_fail)?;
    Ok(if result.is_accept() { 0 } else { 1 })
}

fn coding_fail(e: crate::error::CodingError) -> Fail {
    usage(e.to_string())
}

fn encode_command(c: EncodeCommand, out: &mut dyn Write) -> Result<(), Fail> {
    let line = match c {
        EncodeCommand::Pair { i, j } => coding::pos_of_pair(i, j).map_err(coding_fail)?.to_string(),
        EncodeCommand::Relation { pairs } => {
            stream_spec(&coding::encode_relation(&parse_pairs(&pairs)?).map_err(coding_fail)?)
        }
        EncodeCommand::Snapshot { source } => {
            let (program, input) = load(&source)?;
            let snap = program.start_snapshot(input.canonicalize());
            coding::encode_snapshot(&snap, std::slice::from_ref(&program))
                .map_err(coding_fail)?
                .to_string()
        }
        EncodeCommand::Run {
            source,
            policy,
            budget,
        } => {
            let (program, input) = load(&source)?;
            let policy = policy.as_deref().map(parse_policy).transpose()?;
            let mut res = resolver(&program, &policy)?;
            let mut trace = Vec::new();
            let mut push = |e: TraceEntry| trace.push(e.snapshot);
            run_transfinite_with(&program, &input, res.as_mut(), budget.budget(), Some(&mut push));
            stream_spec(&coding::encode_run(&trace, std::slice::from_ref(&program)).map_err(coding_fail)?)
        }
        EncodeCommand::RealPair { a, b } => {
            coding::pair_real(&parse_stream(&a)?, &parse_stream(&b)?)
                .map_err(coding_fail)?
                .to_string()
        }
    };
    writeln!(out, "{line}").map_err(io_fail)
}

fn decode_command(c: DecodeCommand, out: &mut dyn Write) -> Result<(), Fail> {
    let text = match c {
        DecodeCommand::Pair { pos } => match coding::pair_of_pos(pos) {
            Some((i, j)) => format!("({i},{j})"),
            None => return Err(usage(format!("{pos} is not of the form 2^i·3^j"))),
        },
        DecodeCommand::Relation { stream, field } => {
            render_relation(&coding::decode_relation(&parse_stream(&stream)?, field).map_err(coding_fail)?)
        }
        DecodeCommand::Snapshot { program, code } => {
            let program = load_program(&program).map_err(usage)?;
            let code = match code {
                Some(c) => c,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s).map_err(io_fail)?;
                    s
                }
            };
            let n: BigUint = code
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad code `{}`", code.trim())))?;
            let snap = coding::decode_snapshot(&n, std::slice::from_ref(&program)).map_err(coding_fail)?;
            snapshot_json(&program, &snap).to_string()
        }
        DecodeCommand::Run { program, stream } => {
            let program = load_program(&program).map_err(usage)?;
            let trace = coding::decode_run(&parse_stream(&stream)?, std::slice::from_ref(&program))
                .map_err(coding_fail)?;
            trace
                .iter()
                .map(|s| snapshot_json(&program, s).to_string())
                .collect::<Vec<_>>()
                .join("\n")
        }
        DecodeCommand::RealPair { stream } => {
            let (a, b) = coding::unpair_real(&parse_stream(&stream)?).map_err(coding_fail)?;
            format!("{a}\n{b}")
        }
    };
    writeln!(out, "{text}").map_err(io_fail)
}

/// Entry point of the `ittm` binary.
pub fn main() -> i32 {
    let mut out = io::stdout().lock();
    let code = run_cli(std::env::args_os(), &mut out, &mut io::stderr());
    let _ = out.flush();
    code
}
