use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use patchwork::{bitwise_eval, q_sweep, Domain, MagmaOp, RadixFixed, Resolution, SurfaceSpec, Workers};

fn point(c: &mut Criterion) {
    let op: MagmaOp = "2:13903:3".parse().unwrap();
    let mut group = c.benchmark_group("bitwise_eval");
    for frac in [12u32, 48] {
        let u = RadixFixed::from_decimal_str("73.1415926535", 3, frac).unwrap();
        let v = RadixFixed::from_decimal_str("41.2718281828", 3, frac).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(frac), &frac, |b, _| {
            b.iter(|| bitwise_eval(black_box(&op), black_box(&[u.clone(), v.clone()]), 3).unwrap())
        });
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let op: MagmaOp = "2:13903:3".parse().unwrap();
    let domain = Domain::square("0", "100").unwrap();
    let mut group = c.benchmark_group("surface");
    group.sample_size(10);
    for n in [32usize, 64] {
        let spec = SurfaceSpec::new(op.clone(), 3, domain.clone(), Resolution::square(n).unwrap(), 12);
        group.bench_with_input(BenchmarkId::new("sample", n), &n, |b, _| {
            b.iter(|| spec.sample(Workers::Auto).unwrap())
        });
    }
    let qs: Vec<u32> = (3..=11).collect();
    group.bench_function("q_sweep_32", |b| {
        b.iter(|| q_sweep(&op, &domain, Resolution::square(32).unwrap(), 12, black_box(&qs), Workers::Auto).unwrap())
    });
    group.finish();
}

criterion_group!(benches, point, grid);
criterion_main!(benches);
