use std::collections::BTreeSet;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ittm_core::coding::{encode_relation, RelationCode};
use ittm_core::explorer::{explore, map_ordered, ExploreOptions, Parallelism, PolicyBounds};
use ittm_core::programs::{checker_prefix_equals_input, make_count_through, make_guess_and_check};
use ittm_core::semantics::{run_outcome, FirstChoice, RunBudget};
use ittm_core::streams::BitStream;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn explore_policies(c: &mut Criterion) {
    let program = make_guess_and_check(&checker_prefix_equals_input(6)).unwrap();
    let input = BitStream::from_bits("101101", "0");
    let bounds = PolicyBounds { max_script: 4, max_tail: 3 };
    let mut group = c.benchmark_group("explore_policies");
    for (label, parallelism) in MODES {
        let options = ExploreOptions { parallelism, ..ExploreOptions::default() };
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| explore(&program, &input, bounds, RunBudget::default(), options).unwrap())
        });
    }
    group.finish();
}

/// The order 0 < 1 < ... < n-1 written in reverse field order.
fn descending(n: u32) -> BitStream {
    let pairs: BTreeSet<(u32, u32)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (n - 1 - b, n - 1 - a))).collect();
    encode_relation(&RelationCode { pairs }).unwrap()
}

fn count_through_batch(c: &mut Criterion) {
    let program = make_count_through();
    let inputs: Vec<BitStream> = (1..=4).map(descending).collect();
    let budget = RunBudget { max_successor_steps_per_block: 20_000_000, ..RunBudget::default() };
    let mut group = c.benchmark_group("count_through_batch");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for (label, parallelism) in MODES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                map_ordered(&inputs, parallelism, |x| {
                    run_outcome(&program, x, &mut FirstChoice, budget).is_halted()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, explore_policies, count_through_batch);
criterion_main!(benches);
