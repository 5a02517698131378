use braidcalc::corpus::fixture;
use braidcalc::rewrite::run_pipeline;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_pipeline");
    group.sample_size(20);
    for name in ["torus35", "grid8", "grid12", "mixed_grid8"] {
        let m = fixture(name).unwrap();
        group.bench_function(name, |b| b.iter(|| run_pipeline(black_box(&m)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
