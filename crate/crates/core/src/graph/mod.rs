//! Directed multigraphs, transition systems and Eulerian tours.
//!
//! Arcs are identified by their index in the input list. A transition
//! system is stored as a successor map on arcs: `succ[e]` is the arc that
//! leaves `head(e)` right after `e` arrives there.

mod io;
mod suppress;

pub use io::{parse_graph, parse_tour, write_graph, write_tour};
pub use suppress::{lift_suppressed, project_suppressed, suppress_degree_one, SuppressionTrace};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc {arc} has endpoint {vertex} outside 0..{n}")]
    VertexOutOfRange { arc: usize, vertex: usize, n: usize },
    #[error("graph has no arcs")]
    Empty,
    #[error("vertex {vertex} has in-degree {indeg} but out-degree {outdeg}")]
    Unbalanced { vertex: usize, indeg: usize, outdeg: usize },
    #[error("vertex {vertex} is not strongly connected to vertex {root}")]
    Disconnected { vertex: usize, root: usize },
    #[error("transition at arc {arc}: successor {succ} does not leave vertex {vertex}")]
    BadTransition { arc: usize, succ: usize, vertex: usize },
    #[error("successor map is not a permutation of the arcs")]
    NotPermutation,
    #[error("transition system has {cycles} cycles, not 1")]
    NotATour { cycles: usize },
    #[error("tour has length {got}, expected {expected}")]
    TourLength { got: usize, expected: usize },
    #[error("single loop on a single vertex cannot be suppressed")]
    SingleLoop,
    #[error("transition system does not match the suppression trace ({got} arcs, expected {expected})")]
    TraceMismatch { got: usize, expected: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct DirectedMultigraph {
    n: usize,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl From<DirectedMultigraph> for GraphRepr {
    fn from(g: DirectedMultigraph) -> Self {
        GraphRepr { n: g.n, arcs: g.pairs() }
    }
}

impl TryFrom<GraphRepr> for DirectedMultigraph {
    type Error = GraphError;

    fn try_from(r: GraphRepr) -> Result<Self, GraphError> {
        DirectedMultigraph::new(r.n, &r.arcs)
    }
}

impl DirectedMultigraph {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        let mut arcs = Vec::with_capacity(pairs.len());
        for (id, &(tail, head)) in pairs.iter().enumerate() {
            for v in [tail, head] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { arc: id, vertex: v, n });
                }
            }
            out_arcs[tail].push(id);
            in_arcs[head].push(id);
            arcs.push(Arc { tail, head });
        }
        Ok(DirectedMultigraph { n, arcs, out_arcs, in_arcs })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, e: usize) -> Arc {
        self.arcs[e]
    }

    pub fn tail(&self, e: usize) -> usize {
        self.arcs[e].tail
    }

    pub fn head(&self, e: usize) -> usize {
        self.arcs[e].head
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_arcs[v]
    }

    /// Out-degree; equals the in-degree on balanced graphs.
    pub fn degree(&self, v: usize) -> usize {
        self.out_arcs[v].len()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.arcs.iter().map(|a| (a.tail, a.head)).collect()
    }

    /// True if every vertex has in- and out-degree exactly 2.
    pub fn is_degree_two(&self) -> bool {
        (0..self.n).all(|v| self.out_arcs[v].len() == 2 && self.in_arcs[v].len() == 2)
    }

    /// Drop zero-degree vertices. Returns the new graph and the old id of each new vertex.
    pub fn compact_vertices(&self) -> (DirectedMultigraph, Vec<usize>) {
        let mut new_id = vec![usize::MAX; self.n];
        let mut old_of_new = Vec::new();
        for v in 0..self.n {
            if !self.out_arcs[v].is_empty() || !self.in_arcs[v].is_empty() {
                new_id[v] = old_of_new.len();
                old_of_new.push(v);
            }
        }
        let pairs: Vec<(usize, usize)> =
            self.arcs.iter().map(|a| (new_id[a.tail], new_id[a.head])).collect();
        let g = DirectedMultigraph::new(old_of_new.len(), &pairs).expect("ids in range");
        (g, old_of_new)
    }

    /// Check balance and strong connectivity of the arc set.
    pub fn check_eulerian(&self) -> Result<(), GraphError> {
        if self.arcs.is_empty() {
            return Err(GraphError::Empty);
        }
        for v in 0..self.n {
            let (i, o) = (self.in_arcs[v].len(), self.out_arcs[v].len());
            if i != o {
                return Err(GraphError::Unbalanced { vertex: v, indeg: i, outdeg: o });
            }
        }
        let root = self.arcs[0].tail;
        let fwd = self.reach(root, true);
        let bwd = self.reach(root, false);
        for v in 0..self.n {
            if self.out_arcs[v].is_empty() {
                continue;
            }
            if !fwd[v] || !bwd[v] {
                return Err(GraphError::Disconnected { vertex: v, root });
            }
        }
        Ok(())
    }

    fn reach(&self, root: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            let nbrs = if forward { &self.out_arcs[v] } else { &self.in_arcs[v] };
            for &e in nbrs {
                let w = if forward { self.arcs[e].head } else { self.arcs[e].tail };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Balanced and strongly connected on the non-isolated vertices. An empty arc set is rejected.
pub fn validate_eulerian(g: &DirectedMultigraph) -> bool {
    g.check_eulerian().is_ok()
}

/// Successor map on arcs with `tail(succ[e]) == head(e)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionSystem {
    succ: Vec<usize>,
}

impl TransitionSystem {
    pub fn new(g: &DirectedMultigraph, succ: Vec<usize>) -> Result<Self, GraphError> {
        let m = g.arc_count();
        if succ.len() != m {
            return Err(GraphError::TourLength { got: succ.len(), expected: m });
        }
        let mut hit = vec![false; m];
        for (e, &f) in succ.iter().enumerate() {
            if f >= m || hit[f] {
                return Err(GraphError::NotPermutation);
            }
            hit[f] = true;
            if g.tail(f) != g.head(e) {
                return Err(GraphError::BadTransition { arc: e, succ: f, vertex: g.head(e) });
            }
        }
        Ok(TransitionSystem { succ })
    }

    pub(crate) fn from_raw(succ: Vec<usize>) -> Self {
        TransitionSystem { succ }
    }

    pub fn succ(&self) -> &[usize] {
        &self.succ
    }

    pub fn next(&self, e: usize) -> usize {
        self.succ[e]
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycles of the successor permutation, each starting at its smallest arc.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let m = self.succ.len();
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for s in 0..m {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut e = s;
            while !seen[e] {
                seen[e] = true;
                cyc.push(e);
                e = self.succ[e];
            }
            out.push(cyc);
        }
        out
    }

    pub fn to_tour(&self) -> Result<Tour, GraphError> {
        let cycles = self.cycles();
        if cycles.len() != 1 {
            return Err(GraphError::NotATour { cycles: cycles.len() });
        }
        Ok(Tour { arcs: cycles.into_iter().next().unwrap() })
    }

    /// Swap the successors of the two in-arcs at each listed degree-two vertex.
    pub fn flipped(&self, g: &DirectedMultigraph, vertices: &[usize]) -> TransitionSystem {
        let mut succ = self.succ.clone();
        for &v in vertices {
            let ins = g.in_arcs(v);
            debug_assert_eq!(ins.len(), 2);
            succ.swap(ins[0], ins[1]);
        }
        TransitionSystem { succ }
    }
}

/// Eulerian tour stored in canonical rotation (starting at arc 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tour {
    arcs: Vec<usize>,
}

impl Tour {
    /// Validate a cyclic arc sequence and rotate it to canonical form.
    pub fn new(g: &DirectedMultigraph, seq: Vec<usize>) -> Result<Self, GraphError> {
        let m = g.arc_count();
        if seq.len() != m {
            return Err(GraphError::TourLength { got: seq.len(), expected: m });
        }
        let mut succ = vec![usize::MAX; m];
        for i in 0..m {
            let (e, f) = (seq[i], seq[(i + 1) % m]);
            if e >= m || succ[e] != usize::MAX {
                return Err(GraphError::NotPermutation);
            }
            succ[e] = f;
        }
        let ts = TransitionSystem::new(g, succ)?;
        ts.to_tour()
    }

    /// Canonical rotation without checks.
    pub fn from_cyclic_unchecked(mut seq: Vec<usize>) -> Self {
        if let Some(p) = seq.iter().position(|&e| e == 0) {
            seq.rotate_left(p);
        }
        Tour { arcs: seq }
    }

    pub fn arcs(&self) -> &[usize] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn transition_system(&self) -> TransitionSystem {
        let m = self.arcs.len();
        let mut succ = vec![0; m];
        for i in 0..m {
            succ[self.arcs[i]] = self.arcs[(i + 1) % m];
        }
        TransitionSystem { succ }
    }
}

/// Deterministic iterative Hierholzer in linear time. The tour starts at the tail of arc 0.
pub fn hierholzer_tour(g: &DirectedMultigraph) -> Result<Tour, GraphError> {
    g.check_eulerian()?;
    let mut ptr = vec![0usize; g.vertex_count()];
    let start = g.tail(0);
    let mut stack: Vec<(usize, usize)> = vec![(start, usize::MAX)];
    let mut circuit = Vec::with_capacity(g.arc_count());
    while let Some(&(v, via)) = stack.last() {
        let outs = g.out_arcs(v);
        if ptr[v] < outs.len() {
            let e = outs[ptr[v]];
            ptr[v] += 1;
            stack.push((g.head(e), e));
        } else {
            stack.pop();
            if via != usize::MAX {
                circuit.push(via);
            }
        }
    }
    circuit.reverse();
    Ok(Tour::from_cyclic_unchecked(circuit))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn triangle() -> DirectedMultigraph {
        crate::gen::bidirected_triangle()
    }

    #[test]
    fn validation_examples() {
        let two_cycle = DirectedMultigraph::new(2, &[(0, 1), (1, 0)]).unwrap();
        assert!(validate_eulerian(&two_cycle));
        let split = DirectedMultigraph::new(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        assert!(matches!(split.check_eulerian(), Err(GraphError::Disconnected { vertex: 2, .. })));
        let unbal = DirectedMultigraph::new(3, &[(0, 1), (1, 2), (0, 2), (2, 0)]).unwrap();
        assert_eq!(
            unbal.check_eulerian(),
            Err(GraphError::Unbalanced { vertex: 0, indeg: 1, outdeg: 2 })
        );
        let isolated = DirectedMultigraph::new(3, &[(0, 1), (1, 0)]).unwrap();
        assert!(validate_eulerian(&isolated));
        assert!(!validate_eulerian(&DirectedMultigraph::new(2, &[]).unwrap()));
        assert!(DirectedMultigraph::new(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn hierholzer_two_cycle_and_loops() {
        let g = DirectedMultigraph::new(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(hierholzer_tour(&g).unwrap().arcs(), &[0, 1]);
        let loops = DirectedMultigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        assert_eq!(hierholzer_tour(&loops).unwrap().arcs(), &[0, 1]);
        let t = hierholzer_tour(&triangle()).unwrap();
        assert_eq!(t.transition_system().cycle_count(), 1);
        assert_eq!(Tour::new(&triangle(), t.arcs().to_vec()).unwrap(), t);
    }

    #[test]
    fn tour_rejects_bad_sequences() {
        let g = triangle();
        assert!(Tour::new(&g, vec![0, 1, 2]).is_err());
        assert!(Tour::new(&g, vec![0, 2, 3, 1, 4, 5]).is_err());
        // 0->1 then 1->0: two arcs used twice
        assert!(Tour::new(&g, vec![0, 1, 0, 1, 0, 1]).is_err());
        let t = Tour::new(&g, vec![2, 3, 1, 5, 4, 0]).unwrap();
        assert_eq!(t.arcs()[0], 0);
    }

    #[test]
    fn cycles_of_flipped_system() {
        let g = DirectedMultigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        let t = hierholzer_tour(&g).unwrap().transition_system();
        assert_eq!(t.cycle_count(), 1);
        assert_eq!(t.flipped(&g, &[0]).cycle_count(), 2);
    }

    fn random_eulerian(n: usize, k: usize, seed: u64) -> DirectedMultigraph {
        let mut rng = crate::rng::WalkRng::from_seed(seed);
        let mut pairs = Vec::new();
        for _ in 0..k {
            let p = rng.permutation(n);
            for v in 0..n {
                pairs.push((v, p[v]));
            }
        }
        DirectedMultigraph::new(n, &pairs).unwrap()
    }

    proptest! {
        #[test]
        fn hierholzer_is_a_tour(n in 1usize..12, k in 1usize..4, seed in 0u64..1000) {
            let g = random_eulerian(n, k, seed);
            match hierholzer_tour(&g) {
                Ok(t) => {
                    prop_assert!(validate_eulerian(&g));
                    prop_assert_eq!(t.len(), g.arc_count());
                    prop_assert_eq!(t.transition_system().cycle_count(), 1);
                    prop_assert!(Tour::new(&g, t.arcs().to_vec()).is_ok());
                }
                Err(_) => prop_assert!(!validate_eulerian(&g)),
            }
        }
    }
}
