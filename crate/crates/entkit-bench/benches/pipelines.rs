//! Throughput of the main pipelines: spectral data, the basis-decomposition
//! bijection, full diagram verification, and Monte Carlo sampling.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use entkit_bench::{random_density, rotated_range_basis};
use entkit_core::decomp::{cvl_forward, cvl_inverse};
use entkit_core::diagrams::{verify_diagram1, DiagramContext};
use entkit_core::measure::{sample, sample_parallel, MeasurementSetup};
use entkit_core::state::{correlation_operator, schmidt, BipartiteState};

fn spectral(c: &mut Criterion) {
    for (d1, d2) in [(4, 4), (8, 8), (16, 16)] {
        let state = BipartiteState::random(d1, d2, 42);
        c.bench_function(&format!("schmidt {d1}x{d2}"), |b| {
            b.iter(|| schmidt(black_box(&state)))
        });
        c.bench_function(&format!("correlation operator {d1}x{d2}"), |b| {
            b.iter(|| correlation_operator(black_box(&state)))
        });
    }
}

fn bijection(c: &mut Criterion) {
    for (dim, rank) in [(6, 6), (8, 5), (16, 12)] {
        let rho = random_density(dim, rank, 7);
        let basis = rotated_range_basis(&rho, 11);
        let decomp = cvl_forward(&rho, &basis).expect("fixture basis spans the range");
        c.bench_function(&format!("bijection round trip dim {dim} rank {rank}"), |b| {
            b.iter(|| {
                let dec = cvl_forward(black_box(&rho), black_box(&basis)).unwrap();
                cvl_inverse(black_box(&rho), &dec).unwrap()
            })
        });
        c.bench_function(&format!("bijection inverse dim {dim} rank {rank}"), |b| {
            b.iter(|| cvl_inverse(black_box(&rho), black_box(&decomp)).unwrap())
        });
    }
}

fn diagram(c: &mut Criterion) {
    for (d1, d2) in [(3, 3), (5, 4), (6, 6)] {
        let ctx = DiagramContext::new(BipartiteState::random(d1, d2, 23));
        let basis = rotated_range_basis(ctx.rho1(), 29);
        c.bench_function(&format!("diagram verification {d1}x{d2}"), |b| {
            b.iter(|| verify_diagram1(black_box(&ctx), black_box(&basis)).unwrap())
        });
    }
}

fn sampling(c: &mut Criterion) {
    let state = BipartiteState::random(4, 4, 31);
    let ctx = DiagramContext::new(state.clone());
    let basis = rotated_range_basis(ctx.rho1(), 37);
    let setup = MeasurementSetup::repeatable(state, basis).expect("fixture basis is orthonormal");
    for shots in [1_000_u64, 100_000] {
        c.bench_function(&format!("sample {shots} shots"), |b| {
            b.iter(|| sample(black_box(&setup), shots, 5).unwrap())
        });
        c.bench_function(&format!("sample {shots} shots in parallel"), |b| {
            b.iter(|| sample_parallel(black_box(&setup), shots, 5).unwrap())
        });
    }
}

criterion_group!(pipelines, spectral, bijection, diagram, sampling);
criterion_main!(pipelines);
