use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fliprepair::store::{CandidateOrder, ChordStore};
use fliprepair::walk::{FlatWalk, PositionWalk, RepairWalk};
use fliprepair::WalkRng;
use fliprepair_bench::walk_fixture;

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for m in [1_000usize, 10_000, 40_000] {
        let (g, t) = walk_fixture(m, 1);
        let mut store = ChordStore::build(&g, &t, None).unwrap();
        store.set_candidate_order(CandidateOrder::Classed);
        let mut naive = PositionWalk::new(&g, &t).unwrap();
        let mut rng = WalkRng::from_seed(2);
        group.bench_function(BenchmarkId::new("store", m), |b| b.iter(|| store.step(&mut rng)));
        group.bench_function(BenchmarkId::new("naive", m), |b| b.iter(|| naive.step(&mut rng)));
        if let Ok(mut flat) = FlatWalk::new(&g, &t) {
            group.bench_function(BenchmarkId::new("flat", m), |b| b.iter(|| flat.step(&mut rng)));
        }
    }
    group.finish();
}

fn chunk_sweep(c: &mut Criterion) {
    let m = 40_000;
    let (g, t) = walk_fixture(m, 3);
    let mut group = c.benchmark_group("chunk_size");
    for b in [50usize, 100, 200, 400, 800] {
        let mut store = ChordStore::build(&g, &t, Some(b)).unwrap();
        store.set_candidate_order(CandidateOrder::Classed);
        let mut rng = WalkRng::from_seed(4);
        group.bench_function(BenchmarkId::from_parameter(b), |bch| bch.iter(|| store.step(&mut rng)));
    }
    group.finish();
}

criterion_group!(benches, steps, chunk_sweep);
criterion_main!(benches);
