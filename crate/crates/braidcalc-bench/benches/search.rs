use braidcalc::random::{rng, scramble};
use braidcalc::{iterated_torus_braid, schubert_min_index, search_reduction, CablingSchedule, SearchBudget};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search_reduction");
    group.sample_size(10);
    for pairs in [vec![(2, 3)], vec![(3, 5)], vec![(2, 3), (2, 13)]] {
        let s = CablingSchedule::new(pairs.clone()).unwrap();
        let w = scramble(&mut rng(7), &iterated_torus_braid(&s).unwrap(), 3, 6);
        let target = schubert_min_index(&s) as usize;
        let budget = SearchBudget::default();
        group.bench_function(format!("{pairs:?}"), |b| b.iter(|| search_reduction(black_box(&w), target, &budget).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, search);
criterion_main!(benches);
