use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use supercrit::{shoot, Precision};
use supercrit_bench::{lin_ni, shot_params, SHOT_U0};

fn double(c: &mut Criterion) {
    let spec = lin_ni();
    let params = shot_params(&spec);
    let mut group = c.benchmark_group("shoot_double");
    for (name, u0) in SHOT_U0 {
        group.bench_with_input(BenchmarkId::from_parameter(name), &u0, |b, &u0| {
            b.iter(|| shoot(&spec, black_box(u0), &params).unwrap())
        });
    }
    group.finish();
}

fn extended(c: &mut Criterion) {
    let spec = lin_ni();
    let mut group = c.benchmark_group("shoot_extended");
    group.sample_size(10);
    for bits in [128, 256] {
        let params = shot_params(&spec).with_precision(Precision::Extended(bits));
        group.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, _| {
            b.iter(|| shoot(&spec, black_box(1.7), &params).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, double, extended);
criterion_main!(benches);
