//! Criterion benchmarks for the patchwork core; see `benches/`.
