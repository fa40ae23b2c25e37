//! Degree-one suppression and its inverse on transition systems.
//!
//! A vertex with a single in-arc `e` and single out-arc `f` carries no
//! choice. Replacing `e, f` by one arc `tail(e) -> head(f)` gives a graph
//! whose transition systems are in bijection with the original ones, with
//! the same number of cycles.
//!
//! Inside the trace, arcs use "working" ids: the original arcs keep their
//! ids and every inserted arc gets the next free id.

use serde::{Deserialize, Serialize};

use super::{DirectedMultigraph, GraphError, TransitionSystem};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suppression {
    pub vertex: usize,
    pub arc_in: usize,
    pub arc_out: usize,
    pub merged: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuppressionTrace {
    pub original_arcs: usize,
    pub records: Vec<Suppression>,
    /// Working id of each arc of the reduced graph.
    pub reduced_to_working: Vec<usize>,
}

impl SuppressionTrace {
    pub fn is_identity(&self) -> bool {
        self.records.is_empty()
    }

    pub fn reduced_arcs(&self) -> usize {
        self.reduced_to_working.len()
    }

    fn working_len(&self) -> usize {
        self.original_arcs + self.records.len()
    }
}

/// Suppress every vertex with in- and out-degree one. Vertex ids are kept;
/// suppressed vertices end up isolated. A graph that is one directed cycle
/// reduces to a single loop, which is left in place.
pub fn suppress_degree_one(
    g: &DirectedMultigraph,
) -> Result<(DirectedMultigraph, SuppressionTrace), GraphError> {
    let m = g.arc_count();
    if m == 1 && g.tail(0) == g.head(0) {
        return Err(GraphError::SingleLoop);
    }
    let mut ends: Vec<(usize, usize)> = g.pairs();
    let mut alive = vec![true; m];
    let n = g.vertex_count();
    let deg1: Vec<bool> =
        (0..n).map(|v| g.in_arcs(v).len() == 1 && g.out_arcs(v).len() == 1).collect();
    let mut cur_in = vec![NONE; n];
    let mut cur_out = vec![NONE; n];
    for v in 0..n {
        if deg1[v] {
            cur_in[v] = g.in_arcs(v)[0];
            cur_out[v] = g.out_arcs(v)[0];
        }
    }
    let mut records = Vec::new();
    for v in 0..n {
        if !deg1[v] {
            continue;
        }
        let (e, f) = (cur_in[v], cur_out[v]);
        if e == f {
            continue;
        }
        let (u, w) = (ends[e].0, ends[f].1);
        let merged = ends.len();
        ends.push((u, w));
        alive.push(true);
        alive[e] = false;
        alive[f] = false;
        if deg1[u] {
            cur_out[u] = merged;
        }
        if deg1[w] {
            cur_in[w] = merged;
        }
        cur_in[v] = NONE;
        cur_out[v] = NONE;
        records.push(Suppression { vertex: v, arc_in: e, arc_out: f, merged });
    }
    let reduced_to_working: Vec<usize> = (0..ends.len()).filter(|&a| alive[a]).collect();
    let pairs: Vec<(usize, usize)> = reduced_to_working.iter().map(|&a| ends[a]).collect();
    let reduced = DirectedMultigraph::new(n, &pairs)?;
    Ok((reduced, SuppressionTrace { original_arcs: m, records, reduced_to_working }))
}

/// Transition system of the original graph induced by one of the reduced graph.
pub fn lift_suppressed(
    trace: &SuppressionTrace,
    t: &TransitionSystem,
) -> Result<TransitionSystem, GraphError> {
    if t.len() != trace.reduced_arcs() {
        return Err(GraphError::TraceMismatch { got: t.len(), expected: trace.reduced_arcs() });
    }
    let total = trace.working_len();
    let mut succ = vec![NONE; total];
    let mut pred = vec![NONE; total];
    let r2w = &trace.reduced_to_working;
    for r in 0..t.len() {
        let (a, b) = (r2w[r], r2w[t.next(r)]);
        succ[a] = b;
        pred[b] = a;
    }
    for rec in trace.records.iter().rev() {
        let (e, f, g) = (rec.arc_in, rec.arc_out, rec.merged);
        let (p, s) = (pred[g], succ[g]);
        succ[g] = NONE;
        pred[g] = NONE;
        if s == g {
            succ[e] = f;
            pred[f] = e;
            succ[f] = e;
            pred[e] = f;
        } else {
            succ[p] = e;
            pred[e] = p;
            succ[e] = f;
            pred[f] = e;
            succ[f] = s;
            pred[s] = f;
        }
    }
    succ.truncate(trace.original_arcs);
    Ok(TransitionSystem::from_raw(succ))
}

/// Inverse of [`lift_suppressed`]: contract every suppressed pair `e, f` into its merged arc.
pub fn project_suppressed(
    trace: &SuppressionTrace,
    t: &TransitionSystem,
) -> Result<TransitionSystem, GraphError> {
    if t.len() != trace.original_arcs {
        return Err(GraphError::TraceMismatch { got: t.len(), expected: trace.original_arcs });
    }
    let total = trace.working_len();
    let mut succ = vec![NONE; total];
    let mut pred = vec![NONE; total];
    for e in 0..t.len() {
        succ[e] = t.next(e);
        pred[t.next(e)] = e;
    }
    for rec in &trace.records {
        let (e, f, g) = (rec.arc_in, rec.arc_out, rec.merged);
        debug_assert_eq!(succ[e], f);
        let (p, s) = (pred[e], succ[f]);
        if p == f {
            succ[g] = g;
            pred[g] = g;
        } else {
            succ[p] = g;
            pred[g] = p;
            succ[g] = s;
            pred[s] = g;
        }
    }
    let mut w2r = vec![NONE; total];
    for (r, &w) in trace.reduced_to_working.iter().enumerate() {
        w2r[w] = r;
    }
    let out = trace.reduced_to_working.iter().map(|&w| w2r[succ[w]]).collect();
    Ok(TransitionSystem::from_raw(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::hierholzer_tour;

    #[test]
    fn directed_triangle_reduces_to_loop() {
        let g = DirectedMultigraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let (r, trace) = suppress_degree_one(&g).unwrap();
        assert_eq!(r.arc_count(), 1);
        assert_eq!(r.tail(0), r.head(0));
        let t = hierholzer_tour(&r).unwrap().transition_system();
        let lifted = lift_suppressed(&trace, &t).unwrap();
        let lifted = TransitionSystem::new(&g, lifted.succ().to_vec()).unwrap();
        assert_eq!(lifted.cycle_count(), 1);
        assert_eq!(project_suppressed(&trace, &lifted).unwrap(), t);
    }

    #[test]
    fn single_loop_rejected() {
        let g = DirectedMultigraph::new(1, &[(0, 0)]).unwrap();
        assert_eq!(suppress_degree_one(&g).unwrap_err(), GraphError::SingleLoop);
    }

    #[test]
    fn mismatch_rejected() {
        let g = DirectedMultigraph::new(2, &[(0, 1), (1, 0), (0, 0)]).unwrap();
        let (_, trace) = suppress_degree_one(&g).unwrap();
        let bogus = TransitionSystem::from_raw(vec![0, 1, 2, 3]);
        assert!(lift_suppressed(&trace, &bogus).is_err());
    }

    #[test]
    fn pendant_path_suppressed() {
        // vertex 0 has degree 2, vertices 1 and 2 degree 1
        let g = DirectedMultigraph::new(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap();
        let (r, trace) = suppress_degree_one(&g).unwrap();
        assert_eq!(r.arc_count(), 2);
        assert!(r.arcs().iter().all(|a| a.tail == 0 && a.head == 0));
        assert_eq!(trace.records.len(), 2);
    }
}
