//! Simulator and library for infinite time Turing machines (ITTMs) and their
//! nondeterministic variant.
//!
//! Runs advance through ordinal stages below ω^ω. Successor steps are simulated
//! directly; limit stages are reached by detecting a sound recurrence and
//! computing the limsup of every cell exactly.

pub mod cli;
pub mod coding;
pub mod error;
pub mod explorer;
pub mod machine;
pub mod ordinal;
pub mod programs;
pub mod semantics;
pub mod streams;
pub mod word;

pub use error::{ExploreError, MachineError, ParseError, StreamError};
pub use explorer::{ChoicePolicy, PolicyBounds, Recognition};
pub use machine::{parse_program, Program, Snapshot};
pub use ordinal::Ordinal;
pub use streams::{BitStream, Tape, TapeTriple};
pub use semantics::{RunBudget, RunOutcome};
