use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fliprepair::lab::{exact_kernel, spectral_gap, SkewMatrix, SubsetWeightTable};
use fliprepair::oracle::{best_count, enumerate_tours};
use fliprepair::switchnet::{build_network, exact_lift_counts};
use fliprepair::WalkRng;
use fliprepair_bench::walk_fixture;

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_kernel");
    for n in [4usize, 6, 8] {
        let a = SkewMatrix::random(n, &mut WalkRng::from_seed(n as u64));
        group.bench_function(BenchmarkId::new("kernel_and_gap", n), |b| {
            b.iter(|| {
                let t = SubsetWeightTable::new(&a).unwrap();
                spectral_gap(&exact_kernel(&t).unwrap())
            })
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let (g, _) = walk_fixture(12, 5);
    c.bench_function("enumerate_tours/m=12", |b| b.iter(|| enumerate_tours(&g).unwrap().count()));
    let (g, _) = walk_fixture(400, 6);
    c.bench_function("best_count/m=400", |b| b.iter(|| best_count(&g).unwrap()));
}

fn networks(c: &mut Criterion) {
    let net = build_network(3, 0.25, 0.25, 2.0, &mut WalkRng::from_seed(7)).unwrap();
    c.bench_function("lift_counts/D=3", |b| b.iter(|| exact_lift_counts(&net).unwrap()));
}

criterion_group!(benches, kernels, oracles, networks);
criterion_main!(benches);
