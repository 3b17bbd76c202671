use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use otoc_core::otoc::{estimate_otoc, OtocConfig};
use otoc_core::random_unitary::{frame_potentials, DesignScheme, PairEstimator, RandomizationScheme};
use otoc_core::Execution;

fn strategies() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn protocol(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_otoc");
    group.sample_size(10);
    let mut config = OtocConfig::standard(RandomizationScheme::GlobalHaar, 7);
    config.n_unitaries = 100;
    config.n_periods_max = 10;
    for (name, exec) in strategies() {
        group.bench_with_input(BenchmarkId::new("global-haar", name), &exec, |b, &exec| {
            b.iter(|| estimate_otoc(&config, exec).unwrap())
        });
    }
    group.finish();
}

fn frame(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame_potentials");
    group.sample_size(10);
    let scheme = RandomizationScheme::DesignHamiltonian(DesignScheme::standard());
    for (name, exec) in strategies() {
        group.bench_with_input(BenchmarkId::new("design-200", name), &exec, |b, &exec| {
            b.iter(|| {
                let members = scheme.sample_many(4, 3, 200, exec).unwrap();
                frame_potentials(&members, PairEstimator::DistinctPairs, exec).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, protocol, frame);
criterion_main!(benches);
