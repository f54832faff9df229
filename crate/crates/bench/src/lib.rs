//! Benchmarks for the dispatcher and scenario generation; see `benches/`.
