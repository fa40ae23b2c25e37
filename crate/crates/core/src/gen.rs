//! Random Eulerian graph generators. Each retries until the arc set is
//! strongly connected, giving up after [`MAX_RETRIES`] attempts.

use thiserror::Error;

use crate::graph::DirectedMultigraph;
use crate::rng::WalkRng;

pub const MAX_RETRIES: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("no strongly connected sample after {0} attempts")]
    RetriesExhausted(usize),
    #[error("invalid parameters: {0}")]
    Params(String),
}

fn retry(
    rng: &mut WalkRng,
    mut f: impl FnMut(&mut WalkRng) -> DirectedMultigraph,
) -> Result<DirectedMultigraph, GenError> {
    for _ in 0..MAX_RETRIES {
        let g = f(rng);
        if g.check_eulerian().is_ok() {
            return Ok(g);
        }
    }
    Err(GenError::RetriesExhausted(MAX_RETRIES))
}

/// Superposition of `k` uniform permutations: every vertex has in- and out-degree `k`.
pub fn random_eulerian(n: usize, k: usize, rng: &mut WalkRng) -> Result<DirectedMultigraph, GenError> {
    if n == 0 || k == 0 {
        return Err(GenError::Params("need n >= 1 and k >= 1".into()));
    }
    retry(rng, |rng| {
        let mut pairs = Vec::with_capacity(n * k);
        for _ in 0..k {
            let p = rng.permutation(n);
            pairs.extend((0..n).map(|v| (v, p[v])));
        }
        DirectedMultigraph::new(n, &pairs).unwrap()
    })
}

/// Random 2-in/2-out graph on `n` vertices.
pub fn regular2(n: usize, rng: &mut WalkRng) -> Result<DirectedMultigraph, GenError> {
    random_eulerian(n, 2, rng)
}

/// Random connected simple undirected graph (random tree plus `extra`
/// edges), each edge replaced by two opposite arcs.
pub fn bidirected(n: usize, extra: usize, rng: &mut WalkRng) -> Result<DirectedMultigraph, GenError> {
    if n < 2 {
        return Err(GenError::Params("need n >= 2".into()));
    }
    let order = rng.permutation(n);
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.below(i);
        let (a, b) = (order[i], order[j]);
        edges.push((a.min(b), a.max(b)));
    }
    let mut non_edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) {
                non_edges.push((a, b));
            }
        }
    }
    rng.shuffle(&mut non_edges);
    edges.extend(non_edges.into_iter().take(extra));
    edges.sort_unstable();
    let pairs: Vec<(usize, usize)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    Ok(DirectedMultigraph::new(n, &pairs).unwrap())
}

/// Union of `cycles` random simple directed cycles (length 1 gives a loop).
pub fn cycle_union(
    n: usize,
    cycles: usize,
    max_len: usize,
    rng: &mut WalkRng,
) -> Result<DirectedMultigraph, GenError> {
    if n == 0 || cycles == 0 || max_len == 0 {
        return Err(GenError::Params("need n, cycles, max_len >= 1".into()));
    }
    retry(rng, |rng| {
        let mut pairs = Vec::new();
        for _ in 0..cycles {
            let len = 1 + rng.below(max_len.min(n));
            let p = rng.permutation(n);
            for i in 0..len {
                pairs.push((p[i], p[(i + 1) % len]));
            }
        }
        DirectedMultigraph::new(n, &pairs).unwrap()
    })
}

/// Both orientations of every triangle edge; it has 3 Eulerian tours.
pub fn bidirected_triangle() -> DirectedMultigraph {
    DirectedMultigraph::new(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)]).unwrap()
}

/// Vertex 0 has degree 3 and vertex 3 degree 1; the rest have degree 2.
pub fn one_gadget_graph() -> DirectedMultigraph {
    DirectedMultigraph::new(4, &[(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 1), (1, 2), (2, 0)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_eulerian() {
        let mut rng = WalkRng::from_seed(3);
        for n in 1..8 {
            let g = regular2(n, &mut rng).unwrap();
            assert!(g.is_degree_two());
            assert!(g.check_eulerian().is_ok());
        }
        let t = bidirected(3, 1, &mut rng).unwrap();
        assert_eq!(t.arc_count(), 6);
        assert!(t.check_eulerian().is_ok());
        let c = cycle_union(5, 4, 4, &mut rng).unwrap();
        assert!(c.check_eulerian().is_ok());
    }
}
