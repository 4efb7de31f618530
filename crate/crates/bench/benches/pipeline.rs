use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use plt_bench::random_tensors;
use plt_core::jacobi::hermitian_eigenvalues;
use plt_core::{lsvd, ppt_verdict, separable_decomposition, verdict, Status, Tolerances};

const N: usize = 64;
const SEED: u64 = 17;

fn pipeline(c: &mut Criterion) {
    let tol = Tolerances::default();
    let inputs = random_tensors(N, SEED);
    let separable: Vec<_> = inputs
        .iter()
        .filter(|(rho, _)| verdict(rho.matrix(), &tol).unwrap().status == Status::Separable)
        .map(|(_, a)| lsvd(a, &tol).unwrap())
        .collect();

    c.bench_function("lsvd", |b| {
        b.iter(|| {
            for (_, a) in &inputs {
                black_box(lsvd(black_box(a), &tol).unwrap());
            }
        })
    });
    c.bench_function("verdict", |b| {
        b.iter(|| {
            for (rho, _) in &inputs {
                black_box(verdict(black_box(rho.matrix()), &tol).unwrap());
            }
        })
    });
    c.bench_function("ppt", |b| {
        b.iter(|| {
            for (rho, _) in &inputs {
                black_box(ppt_verdict(black_box(rho), tol.boundary));
            }
        })
    });
    c.bench_function("hermitian_eigenvalues", |b| {
        b.iter(|| {
            for (rho, _) in &inputs {
                black_box(hermitian_eigenvalues(black_box(rho.matrix())));
            }
        })
    });
    if !separable.is_empty() {
        c.bench_function("decomposition", |b| {
            b.iter_batched(
                || separable.clone(),
                |rs| {
                    for r in &rs {
                        black_box(separable_decomposition(r, false, &tol).unwrap());
                    }
                },
                BatchSize::SmallInput,
            )
        });
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
