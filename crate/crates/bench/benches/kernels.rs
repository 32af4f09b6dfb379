use criterion::{criterion_group, criterion_main};

criterion_group!(benches, pgl2_llc_bench::benchmarks);
criterion_main!(benches);
