//! Criterion benchmarks for the backflow solvers; see `benches/`.
