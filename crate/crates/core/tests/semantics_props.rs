mod common;

use common::{random_function_program, random_periodic, Naive};
use ittm_core::machine::Program;
use ittm_core::semantics::{
    limit_jump, run_block, run_transfinite, BlockOutcome, FirstChoice, RunBudget, RunOutcome, TraceEvent,
};
use ittm_core::streams::BitStream;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_budget() -> RunBudget {
    RunBudget {
        max_successor_steps_per_block: 5_000,
        max_limit_jumps: 3,
        history_window: 4096,
    }
}

fn setup(seed: u64, halting: bool) -> (Program, BitStream) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_function_program(&mut rng, "p", halting);
    let input = random_periodic(&mut rng, 4, 3);
    (p, input)
}

fn first(_: usize, _: usize) -> usize {
    0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// A certified segment replays cycle for cycle with the claimed drift, and the
    /// limit snapshot agrees with the limsup seen by a naive simulation.
    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let (p, input) = setup(seed, false);
        let start = p.start_snapshot(input.canonicalize());
        let BlockOutcome::Certified { certificate: cert, history } =
            run_block(&p, &start, &mut FirstChoice, small_budget(), None)
        else {
            return Ok(());
        };
        let period = cert.n - cert.m;
        let d = cert.shift;
        let window = cert.frontier + 2 * d + 8;
        let cycles = if d == 0 { 3 } else { (window - cert.min_head) / d + 3 };

        let mut naive = Naive::new(&p, &input);
        let mut trail = Vec::new();
        let total = cert.m + cycles * period;
        while naive.steps < total {
            trail.push((naive.state, naive.head, [0, 1, 2].map(|t| naive.get(t, naive.head))));
            prop_assert!(naive.step(&first));
        }
        for t in 0..period as usize {
            let (state, head, read) = trail[cert.m as usize + t];
            for k in 1..cycles as usize {
                let (s2, h2, r2) = trail[cert.m as usize + k * period as usize + t];
                prop_assert_eq!(s2, state);
                prop_assert_eq!(h2, head + k as u64 * d);
                prop_assert_eq!(r2, read);
            }
        }

        let mut limsup = vec![[false; 3]; window as usize + 1];
        for _ in 0..=period {
            for c in 1..=window {
                for t in 0..3 {
                    limsup[c as usize][t] |= naive.get(t, c);
                }
            }
            naive.step(&first);
        }
        let limit = limit_jump(&cert, &history);
        prop_assert_eq!(limit.head, 1);
        prop_assert_eq!(limit.state, Program::LIMIT);
        prop_assert!(limit.stage.is_limit());
        for c in 1..=window {
            let got = limit.tapes.read(c).unwrap();
            prop_assert_eq!(got, limsup[c as usize], "cell {}", c);
        }
    }

    #[test]
    fn traces_are_well_formed(seed in any::<u64>()) {
        let (p, input) = setup(seed, true);
        let report = run_transfinite(&p, &input, &mut FirstChoice, small_budget());
        let again = run_transfinite(&p, &input, &mut FirstChoice, small_budget());
        prop_assert_eq!(&report, &again);

        let trace = &report.trace;
        for pair in trace.windows(2) {
            prop_assert!(pair[0].snapshot.stage < pair[1].snapshot.stage);
        }
        for e in trace.iter().filter(|e| e.event == TraceEvent::Limit) {
            prop_assert_eq!(e.snapshot.head, 1);
            prop_assert_eq!(e.snapshot.state, Program::LIMIT);
            prop_assert!(e.snapshot.stage.is_limit());
        }
        for e in trace.iter().filter(|e| e.snapshot.stage.is_limit()) {
            prop_assert_eq!(e.event, TraceEvent::Limit);
        }
        let last = trace.last().unwrap();
        prop_assert_eq!(&last.snapshot, report.outcome.snapshot());
        if let RunOutcome::Halted(s) = &report.outcome {
            prop_assert!(s.is_halting());
            prop_assert_eq!(last.event, TraceEvent::Halt);
            prop_assert_eq!(trace.iter().filter(|e| e.snapshot.is_halting()).count(), 1);
        }
    }

    /// Up to the first limit, every successor snapshot in the trace matches the
    /// naive simulation.
    #[test]
    fn finite_prefix_matches_naive(seed in any::<u64>()) {
        let (p, input) = setup(seed, true);
        let report = run_transfinite(&p, &input, &mut FirstChoice, small_budget());
        let mut naive = Naive::new(&p, &input);
        for e in report.trace.iter().skip(1).take_while(|e| e.event != TraceEvent::Limit) {
            prop_assert!(naive.step(&first));
            prop_assert_eq!(e.snapshot.state, naive.state);
            prop_assert_eq!(e.snapshot.head, naive.head);
            for c in 1..12 {
                prop_assert_eq!(e.snapshot.tapes.read(c).unwrap(), [0, 1, 2].map(|t| naive.get(t, c)));
            }
        }
    }
}
