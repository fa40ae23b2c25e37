//! Fixtures shared by the benchmarks.

use fliprepair::gen::regular2;
use fliprepair::{hierholzer_tour, DirectedMultigraph, Tour, WalkRng};

/// Random 2-in/2-out graph with `m` arcs and its Hierholzer tour.
pub fn walk_fixture(m: usize, seed: u64) -> (DirectedMultigraph, Tour) {
    let mut rng = WalkRng::from_seed(seed);
    let g = regular2((m / 2).max(2), &mut rng).expect("regular2 generation");
    let t = hierholzer_tour(&g).unwrap();
    (g, t)
}
