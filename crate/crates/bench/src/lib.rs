//! Benchmarks for the k1alex pipeline live in `benches/`.
