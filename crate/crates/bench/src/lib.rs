//! Criterion benchmarks for the demifield kernels. See `benches/kernels.rs`.
