use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eichler_core::cocycle::ParabolicCocycle;
use eichler_core::g2es::triv_sym_expansions;
use eichler_core::par::set_parallel;

const PREC: u32 = 128;

fn double_coset_sums(c: &mut Criterion) {
    let phi = ParabolicCocycle::for_delta(PREC).unwrap();
    let mut group = c.benchmark_group("triv_sym_expansions");
    group.sample_size(10);
    for c_max in [32u64, 64] {
        for (name, on) in [("sequential", false), ("parallel", true)] {
            group.bench_with_input(BenchmarkId::new(name, c_max), &c_max, |b, &c_max| {
                set_parallel(on);
                b.iter(|| triv_sym_expansions(&phi, &[14, 10, 8], 10, 8, c_max, PREC).unwrap());
            });
        }
    }
    group.finish();
    set_parallel(true);
}

criterion_group!(benches, double_coset_sums);
criterion_main!(benches);
