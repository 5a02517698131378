//! Criterion benchmarks for braidcalc live under `benches/`.
