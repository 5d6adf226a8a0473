//! Criterion benchmarks for the transform, multiplier and time-stepping kernels; see `benches/`.
