//! Empty library target; the benchmarks live under `benches/`.
