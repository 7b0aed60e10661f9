//! Criterion benchmarks for coopgame live in `benches/`.
