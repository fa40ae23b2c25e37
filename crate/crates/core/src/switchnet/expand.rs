//! Expansion of a suppressed graph to a 2-in/2-out graph.
//!
//! Every vertex of degree at least `gadget_min_degree` is replaced by a
//! switching network: switch `k` on wires `(i, j)` becomes a vertex with
//! one in-arc and one out-arc per wire. Wire `w` enters through the
//! `w`-th in-arc of the vertex and leaves through its `w`-th out-arc.
//! Ports are spliced directly, so no degree-one vertex is created.
//!
//! Arc ids: arcs of the suppressed graph keep their ids `0..m`; wire
//! segments between switches get ids from `m` on. Contracting a
//! trajectory means following successors until the next arc below `m`.

use serde::{Deserialize, Serialize};

use super::{build_network, exact_lift_counts, find_setting, SwitchError, SwitchingNetwork, MAX_EXACT_WIDTH};
use crate::graph::{
    lift_suppressed, project_suppressed, DirectedMultigraph, SuppressionTrace, Tour, TransitionSystem,
};
use crate::rng::WalkRng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpandParams {
    pub eta: f64,
    pub delta: f64,
    pub c: f64,
    pub gadget_min_degree: usize,
}

impl Default for ExpandParams {
    fn default() -> Self {
        ExpandParams { eta: 0.01, delta: 0.01, c: 2.0, gadget_min_degree: 3 }
    }
}

/// Arcs at one switch vertex. Index 0 is the lower wire of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchArcs {
    pub vertex: usize,
    pub ins: [usize; 2],
    pub outs: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gadget {
    /// Vertex of the suppressed graph.
    pub vertex: usize,
    pub net: SwitchingNetwork,
    pub in_arcs: Vec<usize>,
    pub out_arcs: Vec<usize>,
    pub switches: Vec<SwitchArcs>,
}

impl Gadget {
    /// Local permutation of a transition system of the suppressed graph.
    pub fn local_permutation(&self, t: &TransitionSystem) -> Vec<u8> {
        self.in_arcs
            .iter()
            .map(|&e| {
                let f = t.next(e);
                self.out_arcs.iter().position(|&o| o == f).expect("successor leaves the gadget vertex") as u8
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionMap {
    pub original: DirectedMultigraph,
    pub trace: SuppressionTrace,
    pub reduced: DirectedMultigraph,
    pub expanded: DirectedMultigraph,
    /// Pre-compaction id of each vertex of the expanded graph.
    pub vertex_origin: Vec<usize>,
    pub gadgets: Vec<Gadget>,
    pub eta_total: f64,
}

pub fn expand_graph(
    original: &DirectedMultigraph,
    reduced: &DirectedMultigraph,
    trace: SuppressionTrace,
    params: &ExpandParams,
    rng: &mut WalkRng,
) -> Result<ExpansionMap, SwitchError> {
    if params.gadget_min_degree < 2 {
        return Err(SwitchError::BadInput("gadget_min_degree must be at least 2".into()));
    }
    if trace.reduced_arcs() != reduced.arc_count() || trace.original_arcs != original.arc_count() {
        return Err(SwitchError::BadInput("trace does not match the graphs".into()));
    }
    let n = reduced.vertex_count();
    for v in 0..n {
        let (i, o) = (reduced.in_arcs(v).len(), reduced.out_arcs(v).len());
        if i != o {
            return Err(SwitchError::BadInput(format!("vertex {v} is unbalanced")));
        }
        if i == 1 {
            return Err(SwitchError::BadInput(format!("vertex {v} has degree one")));
        }
    }
    let mut tails: Vec<usize> = reduced.arcs().iter().map(|a| a.tail).collect();
    let mut heads: Vec<usize> = reduced.arcs().iter().map(|a| a.head).collect();
    let mut next_vertex = n;
    let mut gadgets = Vec::new();
    for v in 0..n {
        let d = reduced.degree(v);
        if d < params.gadget_min_degree {
            continue;
        }
        let net = build_network(d, params.eta, params.delta, params.c, rng)?;
        let ins = reduced.in_arcs(v).to_vec();
        let outs = reduced.out_arcs(v).to_vec();
        let base = next_vertex;
        let mut sw: Vec<SwitchArcs> = (0..net.switch_count())
            .map(|k| SwitchArcs { vertex: base + k, ins: [usize::MAX; 2], outs: [usize::MAX; 2] })
            .collect();
        let mut pending: Vec<Option<(usize, usize)>> = vec![None; d];
        for (k, &(i, j)) in net.switches.iter().enumerate() {
            for (side, w) in [(0, i as usize), (1, j as usize)] {
                match pending[w] {
                    Some((pk, pside)) => {
                        let seg = tails.len();
                        tails.push(base + pk);
                        heads.push(base + k);
                        sw[pk].outs[pside] = seg;
                        sw[k].ins[side] = seg;
                    }
                    None => {
                        sw[k].ins[side] = ins[w];
                        heads[ins[w]] = base + k;
                    }
                }
                pending[w] = Some((k, side));
            }
        }
        for w in 0..d {
            let (k, side) = pending[w].expect("guard touches every wire");
            sw[k].outs[side] = outs[w];
            tails[outs[w]] = base + k;
        }
        next_vertex += net.switch_count();
        gadgets.push(Gadget { vertex: v, net, in_arcs: ins, out_arcs: outs, switches: sw });
    }
    let pairs: Vec<(usize, usize)> = tails.into_iter().zip(heads).collect();
    let pre = DirectedMultigraph::new(next_vertex, &pairs)?;
    let (expanded, vertex_origin) = pre.compact_vertices();
    let mut new_of_old = vec![usize::MAX; next_vertex];
    for (new, &old) in vertex_origin.iter().enumerate() {
        new_of_old[old] = new;
    }
    for gd in gadgets.iter_mut() {
        for s in gd.switches.iter_mut() {
            s.vertex = new_of_old[s.vertex];
        }
    }
    let eta_total = gadgets.iter().map(|g| g.net.eta).sum();
    Ok(ExpansionMap {
        original: original.clone(),
        trace,
        reduced: reduced.clone(),
        expanded,
        vertex_origin,
        gadgets,
        eta_total,
    })
}

impl ExpansionMap {
    pub fn expanded_arcs(&self) -> usize {
        self.expanded.arc_count()
    }

    /// 2-in/2-out and strongly connected.
    pub fn is_valid(&self) -> bool {
        self.expanded.is_degree_two() && self.expanded.check_eulerian().is_ok()
    }

    /// Contract gadget trajectories: a transition system of the expanded
    /// graph to one of the suppressed graph.
    pub fn contract(&self, t: &TransitionSystem) -> Result<TransitionSystem, SwitchError> {
        let m_star = self.expanded.arc_count();
        if t.len() != m_star {
            return Err(SwitchError::BadInput(format!("system has {} arcs, expected {m_star}", t.len())));
        }
        let m = self.reduced.arc_count();
        let succ = (0..m)
            .map(|e| {
                let mut f = t.next(e);
                while f >= m {
                    f = t.next(f);
                }
                f
            })
            .collect();
        Ok(TransitionSystem::new(&self.reduced, succ)?)
    }

    /// Tour of the expanded graph to a tour of the original graph.
    pub fn project_tour(&self, t_star: &Tour) -> Result<Tour, SwitchError> {
        let reduced = self.contract(&t_star.transition_system())?;
        let lifted = lift_suppressed(&self.trace, &reduced)?;
        Ok(lifted.to_tour()?)
    }

    /// One transition system of the expanded graph contracting to `t`.
    pub fn lift_system(&self, t: &TransitionSystem) -> Result<TransitionSystem, SwitchError> {
        let m = self.reduced.arc_count();
        if t.len() != m {
            return Err(SwitchError::BadInput("system does not match the suppressed graph".into()));
        }
        let mut succ = vec![usize::MAX; self.expanded.arc_count()];
        let mut in_gadget = vec![false; self.reduced.vertex_count()];
        for gd in &self.gadgets {
            in_gadget[gd.vertex] = true;
            let setting = find_setting(&gd.net, &gd.local_permutation(t))?;
            for (s, &x) in gd.switches.iter().zip(&setting) {
                let (a, b) = (s.ins, s.outs);
                if x {
                    succ[a[0]] = b[1];
                    succ[a[1]] = b[0];
                } else {
                    succ[a[0]] = b[0];
                    succ[a[1]] = b[1];
                }
            }
        }
        for e in 0..m {
            if !in_gadget[self.reduced.head(e)] {
                succ[e] = t.next(e);
            }
        }
        Ok(TransitionSystem::new(&self.expanded, succ)?)
    }

    /// `prod_v l_v(pi_v(T)) d_v! / 2^{r_v}` for a tour of the original graph.
    pub fn lift_count_ratio(&self, t: &Tour) -> Result<f64, SwitchError> {
        if let Some(gd) = self.gadgets.iter().find(|g| g.net.wires > MAX_EXACT_WIDTH) {
            return Err(SwitchError::TooWide(gd.net.wires));
        }
        let reduced = project_suppressed(&self.trace, &t.transition_system())?;
        let mut ratio = 1.0;
        for gd in &self.gadgets {
            let lc = exact_lift_counts(&gd.net)?;
            ratio *= lc.ratio(&gd.local_permutation(&reduced));
        }
        Ok(ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{hierholzer_tour, suppress_degree_one};
    use crate::verify::random_system;

    /// Uniformly random bijection at every vertex.
    fn expand(g: &DirectedMultigraph, p: &ExpandParams, seed: u64) -> ExpansionMap {
        let (r, tr) = suppress_degree_one(g).unwrap();
        expand_graph(g, &r, tr, p, &mut WalkRng::from_seed(seed)).unwrap()
    }

    fn sample_graph() -> DirectedMultigraph {
        crate::gen::one_gadget_graph()
    }

    #[test]
    fn degree_two_graph_is_kept() {
        let g = crate::graph::tests::triangle();
        let map = expand(&g, &ExpandParams::default(), 1);
        assert!(map.gadgets.is_empty());
        assert_eq!(map.expanded, g);
        let t = hierholzer_tour(&g).unwrap();
        assert_eq!(map.project_tour(&t).unwrap(), t);
    }

    #[test]
    fn gadget_graph_is_degree_two() {
        let mut rng = WalkRng::from_seed(3);
        for trial in 0..30 {
            let g = crate::gen::random_eulerian(5, 3, &mut rng).unwrap();
            let map = expand(&g, &ExpandParams { eta: 0.3, delta: 0.3, c: 1.0, gadget_min_degree: 3 }, trial);
            assert!(map.is_valid(), "trial {trial}");
            assert_eq!(map.gadgets.len(), 5);
            let s: usize = map.gadgets.iter().map(|g| g.net.switch_count()).sum();
            assert_eq!(map.expanded.vertex_count(), s);
        }
    }

    #[test]
    fn one_degree_three_vertex() {
        let g = sample_graph();
        assert!(g.check_eulerian().is_ok());
        let map = expand(&g, &ExpandParams { eta: 0.25, delta: 0.25, c: 2.0, gadget_min_degree: 3 }, 5);
        assert_eq!(map.gadgets.len(), 1);
        assert_eq!(map.gadgets[0].net.wires, 3);
        assert!(map.is_valid());
    }

    #[test]
    fn contraction_preserves_cycle_counts() {
        let mut rng = WalkRng::from_seed(11);
        let g = sample_graph();
        let map = expand(&g, &ExpandParams { eta: 0.25, delta: 0.25, c: 2.0, gadget_min_degree: 2 }, 2);
        for _ in 0..1000 {
            let t = random_system(&map.expanded, &mut rng);
            let c = map.contract(&t).unwrap();
            assert_eq!(t.cycle_count(), c.cycle_count());
        }
    }

    #[test]
    fn contract_after_lift_is_identity() {
        let mut rng = WalkRng::from_seed(13);
        for trial in 0..50 {
            let g = crate::gen::bidirected(4, 2, &mut rng).unwrap();
            let map = expand(&g, &ExpandParams { eta: 0.4, delta: 0.4, c: 1.0, gadget_min_degree: 2 }, trial);
            let t = random_system(&map.reduced, &mut rng);
            match map.lift_system(&t) {
                Ok(l) => assert_eq!(map.contract(&l).unwrap(), t),
                Err(SwitchError::Unreachable) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn projected_tours_are_tours_of_g() {
        let g = crate::graph::tests::triangle();
        let (r, tr) = suppress_degree_one(&g).unwrap();
        let p = ExpandParams { eta: 0.25, delta: 0.25, c: 2.0, gadget_min_degree: 2 };
        let map = expand_graph(&g, &r, tr, &p, &mut WalkRng::from_seed(4)).unwrap();
        let mut rng = WalkRng::from_seed(1);
        let mut found = 0;
        for _ in 0..2000 {
            let t = random_system(&map.expanded, &mut rng);
            if let Ok(tour) = t.to_tour() {
                let out = map.project_tour(&tour).unwrap();
                assert!(Tour::new(&g, out.arcs().to_vec()).is_ok());
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn lift_ratio_and_factorization() {
        let g = sample_graph();
        let p = ExpandParams { eta: 0.25, delta: 0.25, c: 2.0, gadget_min_degree: 3 };
        let map = expand(&g, &p, 9);
        let lc = exact_lift_counts(&map.gadgets[0].net).unwrap();
        let t = hierholzer_tour(&g).unwrap();
        let ratio = map.lift_count_ratio(&t).unwrap();
        let pi = map.gadgets[0].local_permutation(&project_suppressed(&map.trace, &t.transition_system()).unwrap());
        assert_eq!(ratio, lc.ratio(&pi));
        if super::super::audit_counts(&lc, 0.25) {
            assert!(ratio >= (-0.25f64).exp() && ratio <= 0.25f64.exp());
        }
        let id = expand(&crate::graph::tests::triangle(), &p, 1);
        let tt = hierholzer_tour(&id.original).unwrap();
        assert_eq!(id.lift_count_ratio(&tt).unwrap(), 1.0);
    }

    #[test]
    fn serde_round_trip() {
        let map = expand(&sample_graph(), &ExpandParams::default(), 3);
        let s = serde_json::to_string(&map).unwrap();
        let back: ExpansionMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn degree_one_input_rejected() {
        let g = sample_graph();
        let id = SuppressionTrace { original_arcs: 8, records: vec![], reduced_to_working: (0..8).collect() };
        assert!(expand_graph(&g, &g, id, &ExpandParams::default(), &mut WalkRng::from_seed(0)).is_err());
    }
}
