use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use conemetric::cones::{random_vector, Cone};
use conemetric::fixedpoint::{dyadic_halving, estimate_contraction};
use conemetric::metric::{random_table, scalarize};
use conemetric::ordernorm::{compare_norms, DEFAULT_GAUGE_REL_TOL};
use conemetric::{par, OrderUnitSpace, Vector};

fn norm_batch(space: &OrderUnitSpace, xs: &[Vector]) -> usize {
    par::map_indices(xs.len(), |i| {
        compare_norms(space, &xs[i], DEFAULT_GAUGE_REL_TOL)
            .unwrap()
            .agree
    })
    .into_iter()
    .filter(|a| *a)
    .count()
}

fn inputs() -> (OrderUnitSpace, Vec<Vector>) {
    let space = OrderUnitSpace::canonical(Cone::lorentz(4).unwrap());
    let mut rng = par::stream_rng(7, 0);
    let xs = (0..2000).map(|_| random_vector(4, &mut rng)).collect();
    (space, xs)
}

#[cfg(feature = "parallel")]
fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    [1, threads]
        .into_iter()
        .map(|n| {
            (
                format!("{n}-threads"),
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .unwrap(),
            )
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn run<R: Send>(c: &mut Criterion, group: &str, work: impl Fn() -> R + Sync) {
    let mut g = c.benchmark_group(group);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| black_box(work())))
        });
    }
    g.finish();
}

#[cfg(not(feature = "parallel"))]
fn run<R>(c: &mut Criterion, group: &str, work: impl Fn() -> R) {
    let mut g = c.benchmark_group(group);
    g.bench_function(BenchmarkId::from_parameter("sequential"), |b| {
        b.iter(|| black_box(work()))
    });
    g.finish();
}

fn benches(c: &mut Criterion) {
    let (space, xs) = inputs();
    run(c, "norm_agreement_2000", || norm_batch(&space, &xs));

    let psd = OrderUnitSpace::canonical(Cone::psd(2).unwrap());
    let table = random_table(&psd, 30, 3).unwrap();
    run(c, "scalarize_table_30", || scalarize(&table).unwrap());

    let (problem, _) = dyadic_halving(60).unwrap();
    run(c, "contraction_dyadic_60", || {
        estimate_contraction(&problem)
    });
}

criterion_group! {
    name = batches;
    config = Criterion::default().sample_size(20);
    targets = benches
}
criterion_main!(batches);
