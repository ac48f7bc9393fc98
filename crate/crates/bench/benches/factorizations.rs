use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use saddle_bench::{saddle_problem, tall_matrix, SIZES};
use saddle_core::saddle::{factor, solve};
use saddle_core::{bcgs, bcgs2, thin_householder_qr, BlockPartition, Method};

fn qr_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("qr");
    for (m, n) in SIZES {
        let l = m + n;
        let x = tall_matrix(l, l, 6.0);
        let part = BlockPartition::split(&x, m).unwrap();
        let id = format!("{l}x{l}");
        g.bench_with_input(BenchmarkId::new("householder", &id), &x, |b, x| {
            b.iter(|| thin_householder_qr(black_box(x)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bcgs", &id), &part, |b, p| {
            b.iter(|| bcgs(black_box(p)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bcgs2", &id), &part, |b, p| {
            b.iter(|| bcgs2(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn saddle_solves(c: &mut Criterion) {
    let mut g = c.benchmark_group("saddle");
    g.sample_size(20);
    for (m, n) in SIZES {
        let p = saddle_problem(m, n);
        let id = format!("m{m}_n{n}");
        for method in Method::ALL {
            g.bench_with_input(
                BenchmarkId::new(format!("solve_{method}"), &id),
                &p,
                |b, p| b.iter(|| solve(black_box(&p.blocks), black_box(&p.f), method).unwrap()),
            );
        }
        let f = factor(&p.blocks, Method::Bcgs2).unwrap();
        g.bench_with_input(BenchmarkId::new("back_solve", &id), &f, |b, f| {
            b.iter(|| f.solve(black_box(&p.f)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, qr_kernels, saddle_solves);
criterion_main!(benches);
