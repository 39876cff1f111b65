//! Criterion benchmarks for the depth-reduction passes; see `benches/passes.rs`.
