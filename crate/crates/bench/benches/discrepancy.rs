use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gmld_bench::{corpus, hj, irrational_chain};
use gmld_core::coefflattice::rational::rat;
use gmld_core::coefflattice::{compare, partition_of_one};
use gmld_core::discrepancy::{mld_oracle, profile};
use gmld_core::explorer::{run_scan, Family, ScanConfig};

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("profile");
    for n in [7, 31, 101] {
        let m = hj(n, 2);
        g.bench_with_input(BenchmarkId::new("hj", n), &m, |b, m| b.iter(|| profile(black_box(m))));
    }
    for len in [4, 16, 48] {
        let m = irrational_chain(len);
        g.bench_with_input(BenchmarkId::new("sqrt2-chain", len), &m, |b, m| {
            b.iter(|| profile(black_box(m)))
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let m = irrational_chain(6);
    let mut g = c.benchmark_group("oracle");
    for depth in 1..=3 {
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &d| {
            b.iter(|| mld_oracle(black_box(&m), d))
        });
    }
    g.finish();
}

fn lattice(c: &mut Criterion) {
    let m = irrational_chain(8);
    let a = profile(&m).unwrap().discrepancies;
    c.bench_function("compare/sqrt2-discrepancies", |b| {
        b.iter(|| compare(black_box(&a[0].1), black_box(&a[1].1)))
    });
    c.bench_function("partition/sqrt2-delta-1e-3", |b| {
        b.iter(|| partition_of_one(black_box(m.basis()), &rat(1, 1000)))
    });
}

fn scan(c: &mut Criterion) {
    let models = corpus(40);
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    g.bench_function("random-40", |b| {
        b.iter(|| run_scan(&ScanConfig::new(Family::Models(models.clone()))))
    });
    g.finish();
}

criterion_group!(benches, solve, oracle, lattice, scan);
criterion_main!(benches);
