use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra_persist::{
    decompose_with, default_r_max, pages_direct_with, random_complex, rips_with, verify_with, Execution, FieldSpec,
    PointCloud,
};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn engines(c: &mut Criterion) {
    for (field, size) in [(FieldSpec::Prime(2), 400), (FieldSpec::Prime(32003), 200), (FieldSpec::Rational, 120)] {
        let complex = random_complex(field, size, 42);
        let r_max = default_r_max(&complex);
        let label = format!("{field}/{size}");

        let mut g = c.benchmark_group("decompose");
        for (name, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(name, &label), &complex, |b, x| {
                b.iter(|| decompose_with(black_box(x), exec).unwrap())
            });
        }
        g.finish();

        let mut g = c.benchmark_group("pages_direct");
        g.sample_size(10);
        for (name, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(name, &label), &complex, |b, x| {
                b.iter(|| pages_direct_with(black_box(x), r_max, exec).unwrap())
            });
        }
        g.finish();
    }

    let complex = random_complex(FieldSpec::Prime(5), 50, 7);
    let mut g = c.benchmark_group("verify");
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| b.iter(|| verify_with(black_box(&complex), default_r_max(&complex), exec).unwrap()));
    }
    g.finish();
}

fn rips_bench(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points = (0..60).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let cloud = PointCloud::from_points(points).unwrap();
    let mut g = c.benchmark_group("rips");
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| b.iter(|| rips_with(black_box(&cloud), 3, Some(0.6), exec)));
    }
    g.finish();
}

criterion_group!(benches, engines, rips_bench);
criterion_main!(benches);
