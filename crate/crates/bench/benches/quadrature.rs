use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zenoline_bench::benchmark_setup;
use zenoline_core::dephasing::chi;
use zenoline_core::udw::{survival_perturbative, Channel, ChannelSpec};
use zenoline_core::Worldline;

fn dephasing(c: &mut Criterion) {
    let mut group = c.benchmark_group("chi");
    group.sample_size(10);
    let worldlines = [
        ("stationary", Worldline::stationary()),
        ("uniform_acceleration", Worldline::uniform_acceleration(10.0).unwrap()),
        ("oscillating", Worldline::oscillating_with_frequency(1.98, 0.99).unwrap()),
        ("circular", Worldline::circular_with_frequency(9.9, 0.99).unwrap()),
    ];
    for (name, w) in &worldlines {
        let (q, reg, spec) = benchmark_setup(3.0, 150);
        group.bench_with_input(BenchmarkId::from_parameter(name), w, |b, w| b.iter(|| chi(w, q, reg, &spec).unwrap()));
    }
    group.finish();
}

fn cumulative_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sigma_x_stationary");
    group.sample_size(10);
    let ch = ChannelSpec::new(Channel::SigmaX);
    for t_max in [1.0, 2.0, 4.0] {
        let (q, reg, spec) = benchmark_setup(t_max, 50);
        group.bench_with_input(BenchmarkId::from_parameter(t_max), &spec, |b, spec| {
            b.iter(|| survival_perturbative(&Worldline::stationary(), q, &ch, reg, spec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dephasing, cumulative_scaling);
criterion_main!(benches);
