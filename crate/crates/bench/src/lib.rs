//! Criterion benchmarks for the core kernels live under `benches/`; run them
//! with `cargo bench -p ttrpca-bench`.
