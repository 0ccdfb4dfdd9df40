//! Benchmarks for `qmix-core`; see `benches/`.
