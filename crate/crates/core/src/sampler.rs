//! End-to-end sampler: special cases, suppression, expansion, walk and
//! projection back to the input graph.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{hierholzer_tour, suppress_degree_one, DirectedMultigraph, GraphError, Tour};
use crate::rng::{WalkRng, STREAM_NETWORK, STREAM_WALK};
use crate::store::{CandidateOrder, ChordStore, StoreError, MAX_CHUNK};
use crate::switchnet::{expand_graph, ExpandParams, ExpansionMap};
use crate::walk::{mixing_steps, run_walk, FlatWalk, PositionWalk, RepairWalk, WalkError, DEFAULT_C_MIX, FLAT_MAX_ARCS};

/// Below this many arcs [`Engine::Auto`] prefers a linear engine to the chunk store.
pub const ENGINE_CROSSOVER: usize = 150_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("eps must lie in (0, 1), got {0}")]
    BadEps(f64),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("input graph: {0}")]
    NotEulerian(GraphError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("projected output is not a tour of the input: {0}")]
    BadOutput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Auto,
    /// 16-bit position array, up to [`FLAT_MAX_ARCS`] arcs.
    Flat,
    Naive,
    Store,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub eps: f64,
    pub seed: u64,
    pub c_mix: f64,
    pub c_net: f64,
    pub gadget_min_degree: usize,
    pub steps: Option<u64>,
    pub engine: Engine,
    pub chunk: Option<usize>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            eps: 0.1,
            seed: 0,
            c_mix: DEFAULT_C_MIX,
            c_net: 2.0,
            gadget_min_degree: 3,
            steps: None,
            engine: Engine::Auto,
            chunk: None,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), SampleError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(SampleError::BadEps(self.eps));
        }
        if !(self.c_mix > 0.0) || !(self.c_net > 0.0) {
            return Err(SampleError::BadConfig("constants must be positive".into()));
        }
        if self.gadget_min_degree < 2 {
            return Err(SampleError::BadConfig("gadget_min_degree must be at least 2".into()));
        }
        if matches!(self.chunk, Some(b) if b == 0 || b > MAX_CHUNK) {
            return Err(SampleError::BadConfig(format!("chunk size must lie in 1..={MAX_CHUNK}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub prepare_s: f64,
    pub walk_s: f64,
    pub project_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleReport {
    pub tour: Tour,
    /// Arcs of the expanded degree-two graph (0 when no walk was needed).
    pub expanded_arcs: usize,
    pub gadgets: usize,
    pub steps: u64,
    pub eta_total: f64,
    pub fallback: bool,
    pub engine: Option<Engine>,
    pub seed: u64,
    pub times: PhaseTimes,
}

impl PartialEq for SampleReport {
    /// Timings are ignored.
    fn eq(&self, o: &Self) -> bool {
        self.tour == o.tour
            && self.expanded_arcs == o.expanded_arcs
            && self.gadgets == o.gadgets
            && self.steps == o.steps
            && self.eta_total == o.eta_total
            && self.fallback == o.fallback
            && self.engine == o.engine
            && self.seed == o.seed
    }
}

/// Expansion with the per-gadget accuracy `eps / (16 m)`.
pub fn prepare(g: &DirectedMultigraph, cfg: &SampleConfig) -> Result<ExpansionMap, String> {
    let (reduced, trace) = suppress_degree_one(g).map_err(|e| e.to_string())?;
    let m = g.arc_count() as f64;
    let eta = cfg.eps / (16.0 * m);
    let params = ExpandParams { eta, delta: eta, c: cfg.c_net, gadget_min_degree: cfg.gadget_min_degree };
    let mut rng = WalkRng::new(cfg.seed, STREAM_NETWORK);
    let map = expand_graph(g, &reduced, trace, &params, &mut rng).map_err(|e| e.to_string())?;
    assert!(map.gadgets.len() <= g.arc_count());
    assert!(map.eta_total <= cfg.eps / 16.0 * (1.0 + 1e-12));
    Ok(map)
}

pub fn sample_tour(g: &DirectedMultigraph, cfg: &SampleConfig) -> Result<SampleReport, SampleError> {
    cfg.validate()?;
    g.check_eulerian().map_err(SampleError::NotEulerian)?;
    let t0 = Instant::now();
    let mut report = SampleReport {
        tour: Tour::from_cyclic_unchecked(Vec::new()),
        expanded_arcs: 0,
        gadgets: 0,
        steps: 0,
        eta_total: 0.0,
        fallback: false,
        engine: None,
        seed: cfg.seed,
        times: PhaseTimes::default(),
    };
    if (0..g.vertex_count()).all(|v| g.degree(v) <= 1) {
        report.tour = hierholzer_tour(g).map_err(SampleError::NotEulerian)?;
        report.times.prepare_s = t0.elapsed().as_secs_f64();
        return Ok(report);
    }
    let map = match prepare(g, cfg) {
        Ok(map) if map.is_valid() => map,
        _ => {
            report.tour = hierholzer_tour(g).map_err(SampleError::NotEulerian)?;
            report.fallback = true;
            report.times.prepare_s = t0.elapsed().as_secs_f64();
            return Ok(report);
        }
    };
    report.expanded_arcs = map.expanded_arcs();
    report.gadgets = map.gadgets.len();
    report.eta_total = map.eta_total;
    report.times.prepare_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let h = &map.expanded;
    let t_star = if h.vertex_count() == 1 {
        hierholzer_tour(h).map_err(SampleError::NotEulerian)?
    } else {
        let mut rng = WalkRng::new(cfg.seed, STREAM_WALK);
        let (t, steps, engine) = sample_degree_two(h, cfg.eps / 2.0, cfg, &mut rng)?;
        report.steps = steps;
        report.engine = Some(engine);
        t
    };
    report.times.walk_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let out = map.project_tour(&t_star).map_err(|e| SampleError::BadOutput(e.to_string()))?;
    report.tour = Tour::new(g, out.arcs().to_vec()).map_err(|e| SampleError::BadOutput(e.to_string()))?;
    report.times.project_s = t2.elapsed().as_secs_f64();
    Ok(report)
}

/// Walk on a 2-in/2-out graph from its Hierholzer tour. Returns the final
/// tour, the number of steps and the engine used.
pub fn sample_degree_two(
    h: &DirectedMultigraph,
    eps: f64,
    cfg: &SampleConfig,
    rng: &mut WalkRng,
) -> Result<(Tour, u64, Engine), SampleError> {
    if !h.is_degree_two() {
        return Err(WalkError::NotDegreeTwo.into());
    }
    let start = hierholzer_tour(h).map_err(SampleError::NotEulerian)?;
    if h.vertex_count() == 1 {
        return Ok((start, 0, Engine::Naive));
    }
    let steps = cfg.steps.unwrap_or_else(|| mixing_steps(h.vertex_count(), eps, cfg.c_mix));
    let engine = match cfg.engine {
        Engine::Auto if h.arc_count() <= FLAT_MAX_ARCS => Engine::Flat,
        Engine::Auto if h.arc_count() < ENGINE_CROSSOVER => Engine::Naive,
        Engine::Auto => Engine::Store,
        e => e,
    };
    let tour = match engine {
        Engine::Flat => {
            let mut w = FlatWalk::new(h, &start)?;
            run_walk(&mut w, steps, rng);
            w.tour()
        }
        Engine::Naive => {
            let mut w = PositionWalk::new(h, &start)?;
            run_walk(&mut w, steps, rng);
            w.tour()
        }
        _ => {
            let mut s = ChordStore::build(h, &start, cfg.chunk)?;
            s.set_candidate_order(CandidateOrder::Classed);
            run_walk(&mut s, steps, rng);
            s.tour()
        }
    };
    Ok((tour, steps, engine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::triangle;
    use crate::oracle::{enumerate_tours, tv_from_counts};

    fn uv() -> DirectedMultigraph {
        DirectedMultigraph::new(2, &[(0, 1), (1, 0), (0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn cycle_needs_no_walk() {
        let g = DirectedMultigraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let r = sample_tour(&g, &SampleConfig { seed: 7, ..Default::default() }).unwrap();
        assert_eq!(r.tour.arcs(), &[0, 1, 2, 3, 4]);
        assert_eq!(r.steps, 0);
        assert!(!r.fallback);
    }

    #[test]
    fn two_loops_unique_tour() {
        let g = DirectedMultigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        let r = sample_tour(&g, &SampleConfig::default()).unwrap();
        assert_eq!(r.tour.arcs(), &[0, 1]);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn rejects_bad_input() {
        let g = DirectedMultigraph::new(2, &[(0, 1)]).unwrap();
        assert!(matches!(sample_tour(&g, &SampleConfig::default()), Err(SampleError::NotEulerian(_))));
        let bad = SampleConfig { eps: 1.5, ..Default::default() };
        assert!(matches!(sample_tour(&uv(), &bad), Err(SampleError::BadEps(_))));
    }

    #[test]
    fn deterministic_reports() {
        let mut rng = WalkRng::from_seed(3);
        let g = crate::gen::random_eulerian(4, 3, &mut rng).unwrap();
        let cfg = SampleConfig { seed: 11, steps: Some(2000), ..Default::default() };
        let a = sample_tour(&g, &cfg).unwrap();
        let b = sample_tour(&g, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.gadgets > 0);
        assert!(a.eta_total <= cfg.eps / 16.0);
        assert!(Tour::new(&g, a.tour.arcs().to_vec()).is_ok());
    }

    #[test]
    fn every_engine_produces_tours() {
        let mut rng = WalkRng::from_seed(8);
        let g = crate::gen::random_eulerian(6, 3, &mut rng).unwrap();
        for engine in [Engine::Flat, Engine::Naive, Engine::Store] {
            let cfg = SampleConfig { seed: 2, engine, chunk: Some(3), steps: Some(2000), ..Default::default() };
            let r = sample_tour(&g, &cfg).unwrap();
            assert_eq!(r.engine, Some(engine));
            assert!(Tour::new(&g, r.tour.arcs().to_vec()).is_ok());
        }
    }

    #[test]
    fn small_graphs_near_uniform() {
        for g in [uv(), triangle()] {
            let census = enumerate_tours(&g).unwrap();
            let mut hits = vec![0u64; census.count()];
            let runs = 4000;
            for seed in 0..runs {
                let r = sample_tour(&g, &SampleConfig { seed, ..Default::default() }).unwrap();
                hits[census.index_of(&r.tour).unwrap()] += 1;
            }
            let tv = tv_from_counts(&hits, runs);
            assert!(tv < 0.05 + 3.0 * (census.count() as f64 / runs as f64).sqrt(), "tv {tv}");
        }
    }

    #[test]
    fn flat_and_naive_agree_step_for_step() {
        let mut rng = WalkRng::from_seed(4);
        let g = crate::gen::random_eulerian(5, 3, &mut rng).unwrap();
        let a = sample_tour(&g, &SampleConfig { seed: 9, engine: Engine::Flat, steps: Some(3000), ..Default::default() });
        let b = sample_tour(&g, &SampleConfig { seed: 9, engine: Engine::Naive, steps: Some(3000), ..Default::default() });
        assert_eq!(a.unwrap().tour, b.unwrap().tour);
    }
}
