//! Criterion benchmarks for the `ipool` kernels live in `benches/`.
