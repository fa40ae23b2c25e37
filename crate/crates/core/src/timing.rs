//! Timed walks for the scaling ladder.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::hierholzer_tour;
use crate::rng::{pick_index, WalkRng, STREAM_AUX, STREAM_WALK};
use crate::sampler::Engine;
use crate::store::{CandidateOrder, ChordStore};
use crate::walk::{FlatWalk, PositionWalk, RepairWalk};

pub const DEFAULT_LADDER: [usize; 3] = [10_000, 40_000, 160_000];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub m: usize,
    pub engine: Engine,
    pub chunk: Option<usize>,
    pub steps: u64,
    pub ns_per_step: f64,
    /// Crossing count plus candidate selection, per step.
    pub query_ns: f64,
    pub update_ns: f64,
}

impl LadderRow {
    pub const CSV_HEADER: &'static str = "M,engine,chunk,steps,ns_per_step,query_ns,update_ns";

    pub fn csv(&self) -> String {
        let engine = match self.engine {
            Engine::Auto => "auto",
            Engine::Flat => "flat",
            Engine::Naive => "naive",
            Engine::Store => "store",
        };
        let chunk = self.chunk.map(|b| b.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{:.1},{:.1},{:.1}",
            self.m, engine, chunk, self.steps, self.ns_per_step, self.query_ns, self.update_ns
        )
    }
}

/// Walk `steps` steps on a random 2-in/2-out graph with `m` arcs after a
/// short warm-up. `Engine::Auto` means the chunk store.
pub fn time_walk(m: usize, engine: Engine, steps: u64, seed: u64, chunk: Option<usize>) -> LadderRow {
    let mut rng = WalkRng::new(seed, STREAM_AUX);
    let g = crate::gen::regular2((m / 2).max(2), &mut rng).expect("regular2 generation");
    let t = hierholzer_tour(&g).unwrap();
    let mut walk: Box<dyn RepairWalk> = match engine {
        Engine::Flat => Box::new(FlatWalk::new(&g, &t).expect("graph too large for the flat engine")),
        Engine::Naive => Box::new(PositionWalk::new(&g, &t).unwrap()),
        Engine::Store | Engine::Auto => {
            let mut s = ChordStore::build(&g, &t, chunk).expect("store build");
            s.set_candidate_order(CandidateOrder::Classed);
            Box::new(s)
        }
    };
    let mut rng = WalkRng::new(seed, STREAM_WALK);
    for _ in 0..steps.min(64) {
        walk.step(&mut rng);
    }
    let n = walk.vertex_count();
    let (mut query, mut update) = (0u128, 0u128);
    let start = Instant::now();
    for _ in 0..steps {
        let x = rng.below(n);
        let u = rng.unit();
        let t0 = Instant::now();
        let w = walk.crossing_count(x);
        let y = walk.candidate(x, pick_index(u, w));
        let t1 = Instant::now();
        if y != x {
            walk.apply_flip_pair(x, y);
        }
        update += t1.elapsed().as_nanos();
        query += (t1 - t0).as_nanos();
    }
    let total = start.elapsed().as_nanos();
    let per = |x: u128| if steps == 0 { 0.0 } else { x as f64 / steps as f64 };
    LadderRow {
        m: g.arc_count(),
        engine,
        chunk,
        steps,
        ns_per_step: per(total),
        query_ns: per(query),
        update_ns: per(update),
    }
}

/// Consecutive ratios of a column.
pub fn ratios(xs: &[f64]) -> Vec<f64> {
    xs.windows(2).map(|w| w[1] / w[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_have_the_requested_shape() {
        for engine in [Engine::Flat, Engine::Naive, Engine::Store] {
            let r = time_walk(200, engine, 50, 1, None);
            assert_eq!(r.m, 200);
            assert_eq!(r.steps, 50);
            assert!(r.ns_per_step > 0.0);
            assert!(r.query_ns + r.update_ns <= r.ns_per_step * 1.5);
        }
        let empty = time_walk(64, Engine::Naive, 0, 1, None);
        assert_eq!(empty.ns_per_step, 0.0);
    }

    #[test]
    fn csv_line() {
        let r = LadderRow {
            m: 10,
            engine: Engine::Store,
            chunk: Some(4),
            steps: 3,
            ns_per_step: 1.25,
            query_ns: 0.5,
            update_ns: 0.75,
        };
        assert_eq!(r.csv(), "10,store,4,3,1.2,0.5,0.8");
        assert_eq!(ratios(&[1.0, 2.0, 8.0]), vec![2.0, 4.0]);
    }
}
