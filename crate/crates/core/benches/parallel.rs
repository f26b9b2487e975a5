//! Sequential against data-parallel execution on the hot loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wreathgen::lattice::{hom_count, SubgroupLattice};
use wreathgen::{catalog, genprob, Caps, Execution};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn exhaustive_pk(c: &mut Criterion) {
    let a5 = catalog::alternating(5);
    let caps = Caps::default();
    let mut group = c.benchmark_group("pk_exact_exhaustive A5 k=3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| genprob::pk_exact_exhaustive(&a5, 3, &caps, exec).unwrap())
        });
    }
    group.finish();
}

fn montecarlo_pk(c: &mut Criterion) {
    let spec = wreathgen::tower::TowerSpec::new(catalog::alternating(5)).unwrap();
    let l2 = spec.build_level(2, 1000).unwrap();
    let mut group = c.benchmark_group("pk_montecarlo L2 2000 samples");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| genprob::pk_montecarlo(&l2, 2, 2000, 7, exec).unwrap())
        });
    }
    group.finish();
}

fn homomorphisms(c: &mut Criterion) {
    let a5 = catalog::alternating(5);
    let target = catalog::a5_squared();
    let caps = Caps { lattice_order: 4000, ..Caps::default() };
    let mut group = c.benchmark_group("hom_count A5 -> A5xA5");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| hom_count(&a5, &target, &caps, exec).unwrap())
        });
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let s5 = catalog::symmetric(5);
    let mut group = c.benchmark_group("subgroup lattice S5");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| SubgroupLattice::build_with(&s5, 2000, exec).unwrap().len())
        });
    }
    group.finish();
}

criterion_group!(benches, exhaustive_pk, montecarlo_pk, homomorphisms, lattice);
criterion_main!(benches);
