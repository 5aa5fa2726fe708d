use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shiftdim_core::lattice::{IntRect, LatticeSet};
use shiftdim_core::subshift::{count_with, three_dot, CountMethod, CountOptions};

fn bench_counting(c: &mut Criterion) {
    let td = three_dot();
    let mut group = c.benchmark_group("three_dot_transfer");
    for side in [10u64, 14] {
        let support = LatticeSet::from_rect(&IntRect::sized(4 * side, side).unwrap());
        for (name, opts) in [("parallel", CountOptions::default()), ("sequential", CountOptions::sequential())] {
            group.bench_with_input(BenchmarkId::new(name, side), &support, |b, s| {
                b.iter(|| count_with(&td, s, &opts).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("three_dot_backtrack");
    let support = LatticeSet::from_rect(&IntRect::sized(6, 5).unwrap());
    for (name, opts) in [("parallel", CountOptions::default()), ("sequential", CountOptions::sequential())] {
        let opts = opts.with_method(CountMethod::Backtrack);
        group.bench_function(name, |b| b.iter(|| count_with(&td, &support, &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_counting);
criterion_main!(benches);
