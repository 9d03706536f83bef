use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hgbs_core::field::lagrange_interpolate;
use hgbs_core::rng::{sub_rng, uniform_below};
use hgbs_core::simulate::{agreement_sweep, mc_compromise_random};
use hgbs_core::{assign_keying_material, make_grid, DegreePolicy, Deployment, FieldModulus, PolicyKind, SymBivarPoly};

fn deployment(n: u32, k: u32, kind: PolicyKind) -> Deployment {
    let grid = make_grid(n, k).unwrap();
    let policy = DegreePolicy::new(kind, 0.6, grid.zone_size()).unwrap();
    assign_keying_material(grid, policy, FieldModulus::default(), 1).unwrap()
}

fn field(c: &mut Criterion) {
    let q = FieldModulus::default();
    let mut group = c.benchmark_group("share");
    for t in [9usize, 36, 144] {
        let f = SymBivarPoly::random(t, q, &mut sub_rng(2, &[t as u64]));
        let share = f.share(q.element(37)).unwrap();
        group.bench_with_input(BenchmarkId::new("key_with", t), &t, |b, _| {
            b.iter(|| share.key_with(black_box(q.element(1234))).unwrap())
        });
        let mut rng = sub_rng(3, &[]);
        let points: Vec<_> = (0..=t as u64)
            .map(|x| (q.element(x + 1), q.element(uniform_below(&mut rng, q.value()))))
            .collect();
        group.bench_with_input(BenchmarkId::new("interpolate", t), &t, |b, _| {
            b.iter(|| lagrange_interpolate(black_box(&points)).unwrap())
        });
    }
    group.finish();
}

fn keying(c: &mut Criterion) {
    let mut group = c.benchmark_group("deployment");
    group.sample_size(20);
    for (n, k) in [(3, 2), (5, 2)] {
        for kind in [PolicyKind::Flat, PolicyKind::Doubling] {
            let id = format!("n{n}k{k}-{kind}");
            group.bench_function(BenchmarkId::new("assign", &id), |b| b.iter(|| deployment(n, k, kind)));
        }
    }
    let dep = deployment(4, 2, PolicyKind::Doubling);
    let nodes: Vec<_> = dep.grid().nodes().collect();
    group.bench_function("establish_key", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 37) % nodes.len();
            dep.establish_key(nodes[0], nodes[i.max(1)]).unwrap()
        })
    });
    group.bench_function("agreement_sweep_n4k2", |b| b.iter(|| agreement_sweep(&dep).unwrap()));
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let dep = deployment(3, 2, PolicyKind::Flat);
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    group.bench_function("compromise_random_nc30_1k", |b| {
        b.iter(|| mc_compromise_random(&dep, 30, 1000, black_box(5)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, field, keying, simulation);
criterion_main!(benches);
