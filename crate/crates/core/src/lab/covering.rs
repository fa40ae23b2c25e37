//! Coupling of the two conditionals at a coordinate by bipartite max-flow.
//!
//! Sources are the even subsets `R` of the other coordinates with mass
//! `mu(R | i not in S)`, sinks the odd subsets with mass
//! `mu(R + i | i in S)`. Edges join sets at Hamming distance one.

use std::collections::VecDeque;

use super::{LabError, SkewMatrix, SubsetWeightTable};

const FLOW_EPS: f64 = 1e-13;

struct Edge {
    to: usize,
    cap: f64,
}

/// Dinic max-flow on f64 capacities.
struct FlowNet {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet { edges: Vec::new(), adj: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    fn add(&mut self, a: usize, b: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: b, cap });
        self.edges.push(Edge { to: a, cap: 0.0 });
        self.adj[a].push(id);
        self.adj[b].push(id + 1);
        id
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                let to = self.edges[e].to;
                if self.edges[e].cap > FLOW_EPS && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    q.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: f64) -> f64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.adj[v].len() {
            let e = self.adj[v][self.iter[v]];
            let to = self.edges[e].to;
            if self.edges[e].cap > FLOW_EPS && self.level[to] == self.level[v] + 1 {
                let d = self.dfs(to, t, f.min(self.edges[e].cap));
                if d > 0.0 {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

#[derive(Clone, Debug)]
pub struct Coupling {
    /// `(S0, S1, mass)` with `i` absent from `S0` and present in `S1`.
    pub pairs: Vec<(u32, u32, f64)>,
    pub flow: f64,
    pub source_marginal_error: f64,
    pub sink_marginal_error: f64,
}

impl Coupling {
    pub fn max_hamming(&self) -> u32 {
        self.pairs.iter().map(|&(a, b, _)| (a ^ b).count_ones()).max().unwrap_or(0)
    }
}

pub fn covering_coupling(a: &SkewMatrix, i: usize) -> Result<Coupling, LabError> {
    let t = SubsetWeightTable::new(a)?;
    let n = t.n;
    let bit = 1u32 << i;
    let without: Vec<u32> = t.support.iter().cloned().filter(|s| s & bit == 0).collect();
    let with: Vec<u32> = t.support.iter().cloned().filter(|s| s & bit != 0).collect();
    if without.is_empty() || with.is_empty() {
        return Err(LabError::InvariantViolation(format!("coordinate {i} has a one-sided conditional")));
    }
    let z0: f64 = without.iter().map(|&s| t.w[s as usize]).sum();
    let z1: f64 = with.iter().map(|&s| t.w[s as usize]).sum();
    let (src, snk) = (0, 1);
    let left0 = 2;
    let right0 = 2 + without.len();
    let mut net = FlowNet::new(right0 + with.len());
    let mut right_pos = vec![usize::MAX; 1 << n];
    for (k, &s) in with.iter().enumerate() {
        right_pos[(s & !bit) as usize] = k;
    }
    let mut mid = Vec::new();
    for (k, &s) in without.iter().enumerate() {
        net.add(src, left0 + k, t.w[s as usize] / z0);
        for j in (0..n).filter(|&j| j != i) {
            let r = s ^ (1 << j);
            let pos = right_pos[r as usize];
            if pos != usize::MAX {
                let e = net.add(left0 + k, right0 + pos, 2.0);
                mid.push((e, s, r | bit));
            }
        }
    }
    for (k, &s) in with.iter().enumerate() {
        net.add(right0 + k, snk, t.w[s as usize] / z1);
    }
    let flow = net.max_flow(src, snk);
    if (flow - 1.0).abs() > 1e-9 {
        return Err(LabError::InvariantViolation(format!("max-flow value {flow} short of 1")));
    }
    let pairs: Vec<(u32, u32, f64)> = mid
        .iter()
        .map(|&(e, s0, s1)| (s0, s1, net.edges[e ^ 1].cap))
        .filter(|p| p.2 > 0.0)
        .collect();
    let mut src_err: f64 = 0.0;
    for &s in &without {
        let out: f64 = pairs.iter().filter(|p| p.0 == s).map(|p| p.2).sum();
        src_err = src_err.max((out - t.w[s as usize] / z0).abs());
    }
    let mut snk_err: f64 = 0.0;
    for &s in &with {
        let inn: f64 = pairs.iter().filter(|p| p.1 == s).map(|p| p.2).sum();
        snk_err = snk_err.max((inn - t.w[s as usize] / z1).abs());
    }
    Ok(Coupling { pairs, flow, source_marginal_error: src_err, sink_marginal_error: snk_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::WalkRng;

    #[test]
    fn random_couplings_cover() {
        let mut rng = WalkRng::from_seed(17);
        for n in 2..8 {
            let a = SkewMatrix::random(n, &mut rng);
            for i in 0..n {
                let c = covering_coupling(&a, i).unwrap();
                assert!((c.flow - 1.0).abs() < 1e-9);
                assert!(c.source_marginal_error < 1e-9 && c.sink_marginal_error < 1e-9);
                assert_eq!(c.max_hamming(), 2);
            }
        }
    }

    #[test]
    fn one_sided_rejected() {
        let a = SkewMatrix::block_diagonal(3, &[1.0]);
        assert!(covering_coupling(&a, 2).is_err());
    }
}
