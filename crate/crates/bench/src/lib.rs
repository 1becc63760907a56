//! Criterion benchmarks for `denjoy-core`; see `benches/core.rs`.
