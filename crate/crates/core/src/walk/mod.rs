//! The flip-repair walk on tours of a 2-in/2-out graph.
//!
//! One step: pick a vertex `x` uniformly, let `W` be the number of chords
//! crossing `x`; with probability `1/(W+1)` stay, otherwise flip `x`
//! together with a uniform crossing chord `y`. The two flips amount to a
//! four-cut of the cyclic sequence with no reversal.
//!
//! Every engine consumes randomness the same way: one word for `x`, then
//! one uniform real `u` mapped to the index `floor(u (W+1))` of a
//! candidate list. [`PositionWalk`] orders candidates (crossing chords
//! plus `x` itself) by vertex id.

mod flat;

pub use flat::{FlatWalk, FLAT_MAX_ARCS};

use thiserror::Error;

use crate::graph::{DirectedMultigraph, Tour};
use crate::rng::{pick_index, WalkRng};

pub const DEFAULT_C_MIX: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("graph is not 2-in/2-out")]
    NotDegreeTwo,
    #[error("single-vertex graph has no moves")]
    SingleVertex,
    #[error("tour does not belong to the graph")]
    TourMismatch,
    #[error("{0} arcs exceed the engine's capacity")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub x: usize,
    pub y: usize,
    /// Number of chords crossing `x` before the step.
    pub crossings: usize,
}

impl StepOutcome {
    pub fn is_self_loop(&self) -> bool {
        self.x == self.y
    }
}

/// `ceil(c n (ln n + 2)(2 + 2 ln n + ln(1/eps)))`, and 0 for `n <= 1`.
pub fn mixing_steps(n: usize, eps: f64, c_mix: f64) -> u64 {
    if n <= 1 {
        return 0;
    }
    let ln = (n as f64).ln();
    (c_mix * n as f64 * (ln + 2.0) * (2.0 + 2.0 * ln + (1.0 / eps).ln())).ceil() as u64
}

/// A tour representation that supports the flip-repair step.
pub trait RepairWalk {
    fn vertex_count(&self) -> usize;

    /// Prepare a step at `x` and return the number of crossing chords.
    fn crossing_count(&mut self, x: usize) -> usize;

    /// Candidate number `k` in `0..=W` for the `x` passed to the last [`Self::crossing_count`].
    fn candidate(&mut self, x: usize, k: usize) -> usize;

    /// Flip `x` and a chord `y` crossing it.
    fn apply_flip_pair(&mut self, x: usize, y: usize);

    fn tour(&self) -> Tour;

    fn step_with_index(&mut self, x: usize, k: usize) -> StepOutcome {
        let w = self.crossing_count(x);
        assert!(k <= w, "candidate index {k} beyond {w}");
        let y = self.candidate(x, k);
        if y != x {
            self.apply_flip_pair(x, y);
        }
        StepOutcome { x, y, crossings: w }
    }

    fn step(&mut self, rng: &mut WalkRng) -> StepOutcome {
        let x = rng.below(self.vertex_count());
        let u = rng.unit();
        let w = self.crossing_count(x);
        let y = self.candidate(x, pick_index(u, w));
        if y != x {
            self.apply_flip_pair(x, y);
        }
        StepOutcome { x, y, crossings: w }
    }
}

pub fn run_walk<W: RepairWalk + ?Sized>(w: &mut W, steps: u64, rng: &mut WalkRng) {
    for _ in 0..steps {
        w.step(rng);
    }
}

/// Linear-time reference engine: positions of the two occurrences of every
/// vertex in flat arrays, rewritten in full on each move.
#[derive(Clone, Debug)]
pub struct PositionWalk {
    n: usize,
    m: u32,
    /// Arc at slot `2v + j` (the `j`-th arc entering `v`).
    slot_arc: Vec<u32>,
    /// Position of the first and second in-arc of each vertex.
    pa: Vec<u32>,
    pb: Vec<u32>,
    first: u32,
    span: u32,
}

impl PositionWalk {
    pub fn new(g: &DirectedMultigraph, tour: &Tour) -> Result<Self, WalkError> {
        if !g.is_degree_two() {
            return Err(WalkError::NotDegreeTwo);
        }
        if g.vertex_count() < 2 {
            return Err(WalkError::SingleVertex);
        }
        if tour.len() != g.arc_count() {
            return Err(WalkError::TourMismatch);
        }
        let n = g.vertex_count();
        let mut slot_arc = Vec::with_capacity(2 * n);
        let mut slot_of_arc = vec![0u32; g.arc_count()];
        for v in 0..n {
            for &e in g.in_arcs(v) {
                slot_of_arc[e] = slot_arc.len() as u32;
                slot_arc.push(e as u32);
            }
        }
        let mut pos = vec![0u32; 2 * n];
        for (p, &e) in tour.arcs().iter().enumerate() {
            pos[slot_of_arc[e] as usize] = p as u32;
        }
        let pa = pos.iter().step_by(2).copied().collect();
        let pb = pos.iter().skip(1).step_by(2).copied().collect();
        Ok(PositionWalk { n, m: 2 * n as u32, slot_arc, pa, pb, first: 0, span: 0 })
    }

    pub(crate) fn into_parts(self) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
        (self.slot_arc, self.pa, self.pb)
    }

    #[inline]
    fn crosses(&self, v: usize) -> bool {
        let a = self.pa[v].wrapping_sub(self.first) < self.span;
        let b = self.pb[v].wrapping_sub(self.first) < self.span;
        a != b
    }
}

/// New position of `p` under the four-cut with offsets taken from `a`.
#[inline(always)]
fn remap(p: u32, a: u32, m: u32, rc: u32, rb: u32, rd: u32) -> u32 {
    let r = p.wrapping_sub(a).wrapping_add(m * (p < a) as u32);
    let in_x = (r >= 1) & (r <= rc);
    let in_y = (r > rc) & (r <= rb);
    let in_z = (r > rb) & (r <= rd);
    let shift = (in_x as u32).wrapping_mul(rd.wrapping_sub(rc))
        .wrapping_add((in_y as u32).wrapping_mul(rd.wrapping_sub(rb).wrapping_sub(rc)))
        .wrapping_add((in_z as u32).wrapping_mul(rb.wrapping_neg()));
    let np = r.wrapping_add(shift) + a;
    np - m * (np >= m) as u32
}

impl RepairWalk for PositionWalk {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn crossing_count(&mut self, x: usize) -> usize {
        let (p, q) = (self.pa[x], self.pb[x]);
        let lo = p.min(q);
        let hi = p.max(q);
        self.first = lo + 1;
        self.span = hi - lo - 1;
        let (first, span) = (self.first, self.span);
        self.pa
            .iter()
            .zip(&self.pb)
            .map(|(&a, &b)| ((a.wrapping_sub(first) < span) != (b.wrapping_sub(first) < span)) as u32)
            .sum::<u32>() as usize
    }

    fn candidate(&mut self, x: usize, mut k: usize) -> usize {
        // 64 vertices at a time: mask, popcount, then select inside the block
        for base in (0..self.n).step_by(64) {
            let end = (base + 64).min(self.n);
            let mut mask = 0u64;
            for v in base..end {
                mask |= ((v == x || self.crosses(v)) as u64) << (v - base);
            }
            let c = mask.count_ones() as usize;
            if k < c {
                for _ in 0..k {
                    mask &= mask - 1;
                }
                return base + mask.trailing_zeros() as usize;
            }
            k -= c;
        }
        unreachable!("candidate index out of range")
    }

    fn apply_flip_pair(&mut self, x: usize, y: usize) {
        let m = self.m;
        let (p, q) = (self.pa[x], self.pb[x]);
        let a = p.min(q);
        let b = p.max(q);
        let (y0, y1) = (self.pa[y], self.pb[y]);
        let (c, d) = if a < y0 && y0 < b { (y0, y1) } else { (y1, y0) };
        debug_assert!(a < c && c < b && !(a < d && d < b));
        // offsets from a: blocks X=(a,c], Y=(c,b], Z=(b,d] become Z Y X
        let rc = c - a;
        let rb = b - a;
        let rd = if d > b { d - a } else { d + m - a };
        for p in self.pa.iter_mut() {
            *p = remap(*p, a, m, rc, rb, rd);
        }
        for p in self.pb.iter_mut() {
            *p = remap(*p, a, m, rc, rb, rd);
        }
    }

    fn tour(&self) -> Tour {
        let mut seq = vec![0usize; self.m as usize];
        for v in 0..self.n {
            seq[self.pa[v] as usize] = self.slot_arc[2 * v] as usize;
            seq[self.pb[v] as usize] = self.slot_arc[2 * v + 1] as usize;
        }
        Tour::from_cyclic_unchecked(seq)
    }
}

/// `step_naive` on the reference engine.
pub fn step_naive(w: &mut PositionWalk, rng: &mut WalkRng) -> StepOutcome {
    w.step(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::chords_from_tour;
    use crate::graph::hierholzer_tour;

    #[test]
    fn mixing_steps_examples() {
        assert_eq!(mixing_steps(2, 0.5, 4.0), 88);
        assert_eq!(mixing_steps(1, 0.1, 4.0), 0);
        assert_eq!(mixing_steps(0, 0.1, 4.0), 0);
    }

    #[test]
    fn two_loops_rejected() {
        let g = DirectedMultigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        let t = hierholzer_tour(&g).unwrap();
        assert_eq!(PositionWalk::new(&g, &t).unwrap_err(), WalkError::SingleVertex);
    }

    /// Apply the move by swapping successors on the transition system.
    fn reference_move(g: &DirectedMultigraph, t: &Tour, x: usize, y: usize) -> Tour {
        t.transition_system().flipped(g, &[x, y]).to_tour().unwrap()
    }

    #[test]
    fn moves_match_transition_flips() {
        let mut rng = WalkRng::from_seed(12);
        for n in 2..9 {
            let g = crate::gen::regular2(n, &mut rng).unwrap();
            let mut w = PositionWalk::new(&g, &hierholzer_tour(&g).unwrap()).unwrap();
            for _ in 0..200 {
                let before = w.tour();
                let cd = chords_from_tour(&g, &before).unwrap();
                let x = rng.below(n);
                let wc = w.crossing_count(x);
                assert_eq!(wc, (0..n).filter(|&v| cd.crosses(x, v)).count());
                let k = rng.below(wc + 1);
                let out = w.step_with_index(x, k);
                let after = w.tour();
                if out.is_self_loop() {
                    assert_eq!(after, before);
                } else {
                    assert!(cd.crosses(x, out.y));
                    assert_eq!(after, reference_move(&g, &before, x, out.y));
                }
                assert!(Tour::new(&g, after.arcs().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn candidates_sorted_by_id() {
        let mut rng = WalkRng::from_seed(4);
        let g = crate::gen::regular2(7, &mut rng).unwrap();
        let mut w = PositionWalk::new(&g, &hierholzer_tour(&g).unwrap()).unwrap();
        for x in 0..7 {
            let wc = w.crossing_count(x);
            let c: Vec<usize> = (0..=wc).map(|k| w.candidate(x, k)).collect();
            assert!(c.windows(2).all(|p| p[0] < p[1]));
            assert!(c.contains(&x));
        }
    }
}
