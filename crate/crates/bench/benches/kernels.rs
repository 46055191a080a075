use std::hint::black_box;

use carmarkov::car::{build_fock, regional_subalgebra, Region};
use carmarkov::entropy::ssa_residual;
use carmarkov::linalg::hermitian_eig;
use carmarkov::markov::counterexample;
use carmarkov::states::{random_state, restrict, StateKind};
use carmarkov_bench::triple_fixture;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    for n in [4usize, 6, 8] {
        let rep = build_fock(n).unwrap();
        let rho = random_state(&rep, StateKind::General, 1).into_matrix();
        group.bench_with_input(BenchmarkId::from_parameter(1 << n), &rho, |b, m| {
            b.iter(|| hermitian_eig(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn conditional_expectation(c: &mut Criterion) {
    let rep = build_fock(5).unwrap();
    let alg = regional_subalgebra(&rep, &Region::span(1, 3)).unwrap();
    let psi = random_state(&rep, StateKind::General, 2);
    c.bench_function("restrict_3_of_5", |b| {
        b.iter(|| restrict(black_box(&psi), &alg))
    });
}

fn ssa(c: &mut Criterion) {
    let (_, triple, psi) = triple_fixture(1, 1, 1, 3);
    c.bench_function("ssa_residual_1_1_1", |b| {
        b.iter(|| ssa_residual(black_box(&psi), &triple).unwrap())
    });
    let (_, triple, psi) = triple_fixture(1, 3, 1, 4);
    c.bench_function("ssa_residual_1_3_1", |b| {
        b.iter(|| ssa_residual(black_box(&psi), &triple).unwrap())
    });
}

fn hopping_counterexample(c: &mut Criterion) {
    let mut group = c.benchmark_group("counterexample");
    group.sample_size(10);
    group.bench_function("build", |b| {
        b.iter(|| counterexample(black_box(1.0)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    eig,
    conditional_expectation,
    ssa,
    hopping_counterexample
);
criterion_main!(benches);
