use braidcalc::random::{random_word, rng};
use braidcalc::{conjugacy_key, left_normal_form, words_equal};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn normal_form(c: &mut Criterion) {
    let mut group = c.benchmark_group("left_normal_form");
    for &(n, len) in &[(3, 20), (4, 40), (6, 80)] {
        let w = random_word(&mut rng(1), n, len);
        group.bench_with_input(BenchmarkId::from_parameter(format!("B{n}x{len}")), &w, |b, w| {
            b.iter(|| left_normal_form(black_box(w)))
        });
    }
    group.finish();
    let a = random_word(&mut rng(2), 4, 30);
    let b = a.concat(&a.inverse()).unwrap().concat(&a).unwrap();
    c.bench_function("words_equal B4", |bench| bench.iter(|| words_equal(black_box(&a), black_box(&b))));
    c.bench_function("conjugacy_key B4", |bench| bench.iter(|| conjugacy_key(black_box(&b))));
}

criterion_group!(benches, normal_form);
criterion_main!(benches);
