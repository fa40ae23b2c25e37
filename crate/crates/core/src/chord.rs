//! Chord diagrams of tours of 2-in/2-out graphs and their interlacement matrices.
//!
//! Vertex `v` owns the two tour positions at which an arc entering `v`
//! sits. Positions are read on a circle of length `M` (the arc count).

use thiserror::Error;

use crate::graph::{DirectedMultigraph, Tour};
use crate::rng::WalkRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordError {
    #[error("vertex {vertex} has in-degree {indeg}, expected 2")]
    NotDegreeTwo { vertex: usize, indeg: usize },
    #[error("tour length {got} does not match arc count {expected}")]
    Length { got: usize, expected: usize },
    #[error("subset index {0} out of range")]
    Index(usize),
}

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordDiagram {
    m: usize,
    ends: Vec<(usize, usize)>,
}

/// Chord diagram of `tour` on a degree-two graph.
pub fn chords_from_tour(g: &DirectedMultigraph, tour: &Tour) -> Result<ChordDiagram, ChordError> {
    for v in 0..g.vertex_count() {
        let d = g.in_arcs(v).len();
        if d != 2 || g.out_arcs(v).len() != 2 {
            return Err(ChordError::NotDegreeTwo { vertex: v, indeg: d });
        }
    }
    if tour.len() != g.arc_count() {
        return Err(ChordError::Length { got: tour.len(), expected: g.arc_count() });
    }
    let mut ends = vec![(usize::MAX, usize::MAX); g.vertex_count()];
    for (pos, &e) in tour.arcs().iter().enumerate() {
        let v = g.head(e);
        if ends[v].0 == usize::MAX {
            ends[v].0 = pos;
        } else {
            ends[v].1 = pos;
        }
    }
    Ok(ChordDiagram { m: tour.len(), ends })
}

impl ChordDiagram {
    /// Build directly from position pairs; used by tests and generators.
    pub fn from_ends(m: usize, ends: Vec<(usize, usize)>) -> Self {
        let ends = ends.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        ChordDiagram { m, ends }
    }

    /// Uniform random perfect matching of `2n` points.
    pub fn random(n: usize, rng: &mut WalkRng) -> Self {
        let mut slots: Vec<usize> = (0..2 * n).map(|p| p / 2).collect();
        rng.shuffle(&mut slots);
        let mut ends = vec![(usize::MAX, 0); n];
        for (p, &v) in slots.iter().enumerate() {
            if ends[v].0 == usize::MAX {
                ends[v].0 = p;
            } else {
                ends[v].1 = p;
            }
        }
        ChordDiagram::from_ends(2 * n, ends)
    }

    pub fn chord_count(&self) -> usize {
        self.ends.len()
    }

    pub fn circle_len(&self) -> usize {
        self.m
    }

    pub fn ends(&self, v: usize) -> (usize, usize) {
        self.ends[v]
    }

    /// Exactly one endpoint of `v` lies strictly between the endpoints of `u`.
    pub fn crosses(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = self.ends[u];
        let inside = |p: usize| a < p && p < b;
        inside(self.ends[v].0) != inside(self.ends[v].1)
    }

    pub fn interlacement_f2(&self) -> Vec<Vec<bool>> {
        let n = self.ends.len();
        (0..n).map(|u| (0..n).map(|v| self.crosses(u, v)).collect()).collect()
    }

    /// Signed interlacement for a choice of tail endpoint per chord
    /// (`tails[v] == false` picks the smaller position). `None` picks the smaller one everywhere.
    pub fn signed_interlacement(&self, tails: Option<&[bool]>) -> IntMatrix {
        let n = self.ends.len();
        let pick = |v: usize| -> (usize, usize) {
            let (a, b) = self.ends[v];
            match tails {
                Some(t) if t[v] => (b, a),
                _ => (a, b),
            }
        };
        let on_arc = |from: usize, to: usize, p: usize| -> bool {
            if from < to {
                from < p && p < to
            } else {
                p > from || p < to
            }
        };
        let mut out = vec![vec![0i64; n]; n];
        for u in 0..n {
            let (um, up) = pick(u);
            for v in 0..n {
                if u == v || !self.crosses(u, v) {
                    continue;
                }
                let (vm, _) = pick(v);
                out[u][v] = if on_arc(um, up, vm) { 1 } else { -1 };
            }
        }
        out
    }

    /// Number of circuits after flipping the vertex set `s`.
    pub fn circuit_count_from_flip(&self, s: &[usize]) -> usize {
        let k = s.len();
        let words = k.div_ceil(64).max(1);
        let mut rows: Vec<Vec<u64>> = vec![vec![0; words]; k];
        for (i, &u) in s.iter().enumerate() {
            for (j, &v) in s.iter().enumerate() {
                if self.crosses(u, v) {
                    rows[i][j / 64] |= 1 << (j % 64);
                }
            }
        }
        1 + k - f2_rank(rows, k)
    }
}

/// Rank over GF(2) of bitset rows with `ncols` columns.
pub fn f2_rank(mut rows: Vec<Vec<u64>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn principal(a: &[Vec<i64>], s: &[usize]) -> IntMatrix {
    s.iter().map(|&i| s.iter().map(|&j| a[i][j]).collect()).collect()
}

/// Flipping `s` keeps a single circuit.
pub fn feasible(a: &[Vec<i64>], s: &[usize]) -> bool {
    det_bareiss(&principal(a, s)) == 1
}
