//! Criterion benchmarks for `numrad-core` live in `benches/`.
