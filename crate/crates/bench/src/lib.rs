//! Criterion benchmarks for the connectx crate; see `benches/`.
