//! Benchmarks for the hot paths of the verifier.

use std::hint::black_box;

use criterion::Criterion;
use pgl2_llc::characters::{build_mu, build_tau_tilde, enumerate_pairs};
use pgl2_llc::constants::{weil_index, AdditiveChar};
use pgl2_llc::cover::{debacker_kernel, formula_f, sample_points, GenuineChar, PositiveRoot};
use pgl2_llc::gl2;
use pgl2_llc::{FieldConfig, PadicElem};

pub fn benchmarks(c: &mut Criterion) {
    let psi = AdditiveChar::standard(5);
    let a = PadicElem::from_int(5, 10, 6);
    c.bench_function("weil_index p=5", |b| b.iter(|| weil_index(black_box(&a), &psi)));

    let cfg = FieldConfig::new(3, 3, 6).expect("ramified p=3");
    let pair = enumerate_pairs(&cfg, 2, true)
        .expect("pairs")
        .into_iter()
        .next()
        .expect("a PGL pair");
    let tau = build_tau_tilde(pair.chi.quotient(), 0).expect("tau");
    let mu = build_mu(&pair).expect("mu");
    let g = GenuineChar::new(pair.clone()).expect("genuine");
    let sample = sample_points(&cfg, pair.minimal_level(), 2).expect("sample");
    c.bench_function("formula_f over sample p=3 ramified", |b| {
        b.iter(|| {
            for w in &sample {
                black_box(formula_f(&g, w, PositiveRoot::Standard, &tau).expect("in range"));
            }
        })
    });
    c.bench_function("debacker_kernel over sample p=3 ramified", |b| {
        b.iter(|| {
            for w in &sample {
                black_box(debacker_kernel(&pair, &mu, w).expect("in range"));
            }
        })
    });

    let mut group = c.benchmark_group("finite group");
    group.sample_size(10);
    group.bench_function("class inventory and certificates q=5", |b| {
        b.iter(|| {
            let g = gl2::class_inventory(5).expect("q=5");
            for t in gl2::regular_theta_reps(5) {
                black_box(gl2::certify_cuspidal(&g, &t).expect("regular"));
            }
        })
    });
    group.bench_function("enumerate_pairs p=5 unramified level 1", |b| {
        let cfg = FieldConfig::new(5, 2, 6).expect("unramified p=5");
        b.iter(|| black_box(enumerate_pairs(&cfg, 1, true).expect("pairs")))
    });
    group.finish();
}
