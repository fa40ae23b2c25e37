//! Chunked chord store with sublinear crossing queries and four-cut updates.
//!
//! The cyclic sequence is cut into chunks of `ceil(B/2)..2B` occurrences
//! (`B = ceil(sqrt(M))` by default), kept in a treap in linear order.
//! Chunk identifiers come from a pool of size `Q = 2 ceil(M/B) + 4`.
//! For each pair of chunks `{C, D}` the list `L[C, D]` holds the vertices
//! with one occurrence in `C` and the other in `D`; `own[C][D] = |L[C, D]|`
//! (doubled on the diagonal) and every tree node `U` stores `V_U`, the sum
//! of `own` rows over its subtree.
//!
//! For a query at `x` with occurrences at `pa < pb`, chords crossing `x`
//! split into class A (inside endpoint in a chunk strictly between the two
//! boundary chunks, outside endpoint in a chunk disjoint from both) and
//! class B (an endpoint in a boundary chunk).

mod tree;
mod update;

use thiserror::Error;

use crate::graph::{DirectedMultigraph, Tour};
use crate::rng::WalkRng;
use crate::walk::RepairWalk;

pub(crate) const NIL: u32 = u32::MAX;

/// Largest accepted chunk size. Every `own` and aggregate entry is bounded
/// by the arc count of one chunk, below `2B`, so 16-bit counters suffice.
pub const MAX_CHUNK: usize = 8192;

type Count = i16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("graph is not 2-in/2-out")]
    NotDegreeTwo,
    #[error("single-vertex graph has no moves")]
    SingleVertex,
    #[error("tour does not belong to the graph")]
    TourMismatch,
    #[error("chunk size must lie in 1..={MAX_CHUNK}")]
    BadChunkSize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("store inconsistency: {0}")]
pub struct StoreInconsistency(pub String);

/// How the candidate index is mapped to a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateOrder {
    /// Class A by (outside chunk id, inside chunk rank, list slot), then class B, then `x`.
    Classed,
    /// All candidates sorted by vertex id (matches [`crate::walk::PositionWalk`]).
    ById,
}

/// Chunk sizes for a run of `len` occurrences: blocks of `b`, with a final
/// remainder below `b/2` folded into the previous block.
pub fn partition_sizes(len: usize, b: usize) -> Vec<usize> {
    let mut sizes = Vec::with_capacity(len / b + 1);
    let mut rem = len;
    while rem >= b {
        sizes.push(b);
        rem -= b;
    }
    if rem > 0 {
        match sizes.last_mut() {
            Some(last) if 2 * rem < b => *last += rem,
            _ => sizes.push(rem),
        }
    }
    sizes
}

pub fn default_chunk_size(m: usize) -> usize {
    ((m as f64).sqrt().ceil() as usize).clamp(1, MAX_CHUNK)
}

#[derive(Clone, Debug)]
pub struct ChordStore {
    n: usize,
    m: usize,
    b: usize,
    q: usize,
    owner: Vec<u32>,
    occ: Vec<[u32; 2]>,
    chunk_of: Vec<u32>,
    offset: Vec<u32>,
    items: Vec<Vec<u32>>,
    live: Vec<bool>,
    free: Vec<u32>,
    generation: Vec<u32>,
    /// Pair lists as intrusive doubly linked lists over vertices.
    head: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    // treap over chunk ids
    left: Vec<u32>,
    right: Vec<u32>,
    parent: Vec<u32>,
    prio: Vec<u64>,
    cnt: Vec<u32>,
    len: Vec<u32>,
    root: u32,
    own: Vec<Count>,
    agg: Vec<Count>,
    prio_rng: WalkRng,
    // query scratch
    order: CandidateOrder,
    vstamp: Vec<u32>,
    cstamp: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
    qx: usize,
    qa: u32,
    qb: u32,
    qsa: usize,
    qsb: usize,
    f_list: Vec<u32>,
    vf: Vec<Count>,
    tmp: Vec<Count>,
    wa: usize,
    class_b: Vec<u32>,
    sorted: Vec<u32>,
}

struct PairIter<'a> {
    next: &'a [u32],
    at: u32,
}

impl Iterator for PairIter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let v = self.at;
        if v == NIL {
            return None;
        }
        self.at = self.next[v as usize];
        Some(v)
    }
}

impl ChordStore {
    /// Build from a tour of a degree-two graph; `b = None` uses `ceil(sqrt(M))`.
    pub fn build(g: &DirectedMultigraph, tour: &Tour, b: Option<usize>) -> Result<Self, StoreError> {
        if !g.is_degree_two() {
            return Err(StoreError::NotDegreeTwo);
        }
        if g.vertex_count() < 2 {
            return Err(StoreError::SingleVertex);
        }
        let m = g.arc_count();
        if tour.len() != m {
            return Err(StoreError::TourMismatch);
        }
        let b = b.unwrap_or_else(|| default_chunk_size(m));
        if b == 0 || b > MAX_CHUNK {
            return Err(StoreError::BadChunkSize);
        }
        let n = g.vertex_count();
        // every chunk holds at least ceil(b/2) arcs, so at most 2M/b are live
        let q = 2 * m.div_ceil(b) + 4;
        let owner: Vec<u32> = (0..m).map(|e| g.head(e) as u32).collect();
        let occ: Vec<[u32; 2]> = (0..n).map(|v| [g.in_arcs(v)[0] as u32, g.in_arcs(v)[1] as u32]).collect();
        let mut s = ChordStore {
            n,
            m,
            b,
            q,
            owner,
            occ,
            chunk_of: vec![NIL; m],
            offset: vec![0; m],
            items: vec![Vec::new(); q],
            live: vec![false; q],
            free: (0..q as u32).rev().collect(),
            generation: vec![0; q],
            head: vec![NIL; q * (q + 1) / 2],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            left: vec![NIL; q],
            right: vec![NIL; q],
            parent: vec![NIL; q],
            prio: vec![0; q],
            cnt: vec![0; q],
            len: vec![0; q],
            root: NIL,
            own: vec![0; q * q],
            agg: vec![0; q * q],
            prio_rng: WalkRng::new(m as u64, crate::rng::STREAM_AUX),
            order: CandidateOrder::ById,
            vstamp: vec![0; n],
            cstamp: vec![0; q],
            mark: vec![0; q],
            stamp: 0,
            qx: usize::MAX,
            qa: NIL,
            qb: NIL,
            qsa: 0,
            qsb: 0,
            f_list: Vec::new(),
            vf: vec![0; q],
            tmp: vec![0; q],
            wa: 0,
            class_b: Vec::new(),
            sorted: Vec::new(),
        };
        let mut start = 0;
        let mut root = NIL;
        for size in partition_sizes(m, b) {
            let c = s.alloc_chunk();
            let arcs: Vec<u32> = tour.arcs()[start..start + size].iter().map(|&e| e as u32).collect();
            s.install_items(c, arcs);
            start += size;
            s.pull(c);
            root = s.merge(root, c);
        }
        s.root = root;
        s.parent[root as usize] = NIL;
        for v in 0..n {
            let [e0, e1] = s.occ[v];
            let (c, d) = (s.chunk_of[e0 as usize], s.chunk_of[e1 as usize]);
            s.add_vertex(v as u32, c, d);
        }
        Ok(s)
    }

    pub fn set_candidate_order(&mut self, order: CandidateOrder) {
        self.order = order;
    }

    pub fn chunk_size(&self) -> usize {
        self.b
    }

    pub fn pool_size(&self) -> usize {
        self.q
    }

    pub fn arc_count(&self) -> usize {
        self.m
    }

    pub fn live_chunks(&self) -> usize {
        self.live.iter().filter(|&&l| l).count()
    }

    pub fn generation(&self, c: usize) -> u32 {
        self.generation[c]
    }

    fn alloc_chunk(&mut self) -> u32 {
        let c = self.free.pop().expect("chunk identifier pool exhausted");
        let cu = c as usize;
        self.live[cu] = true;
        self.generation[cu] = self.generation[cu].wrapping_add(1);
        self.left[cu] = NIL;
        self.right[cu] = NIL;
        self.parent[cu] = NIL;
        self.prio[cu] = self.prio_rng.next_u64();
        c
    }

    fn install_items(&mut self, c: u32, arcs: Vec<u32>) {
        for (i, &e) in arcs.iter().enumerate() {
            self.chunk_of[e as usize] = c;
            self.offset[e as usize] = i as u32;
        }
        self.items[c as usize] = arcs;
    }

    #[inline]
    fn pair_key(&self, c: u32, d: u32) -> usize {
        let (lo, hi) = (c.min(d) as usize, c.max(d) as usize);
        hi * (hi + 1) / 2 + lo
    }

    fn bump_path(&mut self, c: u32, coord: u32, delta: Count) {
        let q = self.q;
        let mut u = c;
        while u != NIL {
            self.agg[u as usize * q + coord as usize] += delta;
            u = self.parent[u as usize];
        }
    }

    fn add_vertex(&mut self, v: u32, c: u32, d: u32) {
        let key = self.pair_key(c, d);
        self.link(v, key);
        self.contribute(c, d, 1);
    }

    fn link(&mut self, v: u32, key: usize) {
        let h = self.head[key];
        self.next[v as usize] = h;
        self.prev[v as usize] = NIL;
        if h != NIL {
            self.prev[h as usize] = v;
        }
        self.head[key] = v;
    }

    fn unlink(&mut self, v: u32, key: usize) {
        let (p, nx) = (self.prev[v as usize], self.next[v as usize]);
        if p == NIL {
            debug_assert_eq!(self.head[key], v);
            self.head[key] = nx;
        } else {
            self.next[p as usize] = nx;
        }
        if nx != NIL {
            self.prev[nx as usize] = p;
        }
    }

    fn pair_list(&self, c: u32, d: u32) -> PairIter<'_> {
        PairIter { next: &self.next, at: self.head[self.pair_key(c, d)] }
    }

    fn contribute(&mut self, c: u32, d: u32, delta: Count) {
        let q = self.q;
        if c == d {
            self.own[c as usize * q + c as usize] += 2 * delta;
            self.bump_path(c, c, 2 * delta);
        } else {
            self.own[c as usize * q + d as usize] += delta;
            self.own[d as usize * q + c as usize] += delta;
            self.bump_path(c, d, delta);
            self.bump_path(d, c, delta);
        }
    }

    /// Global position of an arc in the current linearization.
    pub fn position(&self, e: usize) -> usize {
        self.chunk_start(self.chunk_of[e]) + self.offset[e] as usize
    }

    /// Chunk ids in sequence order.
    pub fn chunk_order(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut u = self.root;
        while u != NIL || !stack.is_empty() {
            while u != NIL {
                stack.push(u);
                u = self.left[u as usize];
            }
            let t = stack.pop().unwrap();
            out.push(t);
            u = self.right[t as usize];
        }
        out
    }

    pub fn sequence(&self) -> Vec<usize> {
        self.chunk_order()
            .into_iter()
            .flat_map(|c| self.items[c as usize].iter().map(|&e| e as usize))
            .collect()
    }

    #[inline]
    fn is_inside(&self, e: u32, ca: u32, cb: u32, pa: usize, pb: usize) -> bool {
        let c = self.chunk_of[e as usize];
        if self.cstamp[c as usize] == self.stamp {
            return true;
        }
        if c == ca || c == cb {
            let start = if c == ca { self.qsa } else { self.qsb };
            let p = start + self.offset[e as usize] as usize;
            return pa < p && p < pb;
        }
        false
    }

    /// Crossing count at `x`; fills the class A/B scratch for [`Self::pick`].
    pub fn query(&mut self, x: usize) -> usize {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.vstamp.iter_mut().for_each(|s| *s = 0);
            self.cstamp.iter_mut().for_each(|s| *s = 0);
            self.mark.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        self.qx = x;
        let [e0, e1] = self.occ[x];
        let (p0, p1) = (self.position(e0 as usize), self.position(e1 as usize));
        let (ea, eb, pa, pb) = if p0 < p1 { (e0, e1, p0, p1) } else { (e1, e0, p1, p0) };
        self.qa = ea;
        self.qb = eb;
        self.qsa = pa - self.offset[ea as usize] as usize;
        self.qsb = pb - self.offset[eb as usize] as usize;
        let (ca, cb) = (self.chunk_of[ea as usize], self.chunk_of[eb as usize]);
        self.f_list.clear();
        self.wa = 0;
        if ca != cb {
            let mut u = self.successor(ca);
            while u != cb {
                self.cstamp[u as usize] = self.stamp;
                self.f_list.push(u);
                u = self.successor(u);
            }
        }
        if !self.f_list.is_empty() {
            let ra = self.chunk_rank(ca);
            let rb = self.chunk_rank(cb);
            let mut vf = std::mem::take(&mut self.vf);
            let mut tmp = std::mem::take(&mut self.tmp);
            self.prefix_into(rb, &mut vf);
            self.prefix_into(ra + 1, &mut tmp);
            let mut wa = 0i64;
            for d in 0..self.q {
                vf[d] -= tmp[d];
                if self.cstamp[d] != self.stamp && d as u32 != ca && d as u32 != cb {
                    wa += vf[d] as i64;
                }
            }
            self.wa = wa as usize;
            self.vf = vf;
            self.tmp = tmp;
        }
        self.class_b.clear();
        let boundary: [u32; 2] = [ca, cb];
        let nb = if ca == cb { 1 } else { 2 };
        for &c in &boundary[..nb] {
            for i in 0..self.items[c as usize].len() {
                let e = self.items[c as usize][i];
                let v = self.owner[e as usize];
                if v as usize == x || self.vstamp[v as usize] == self.stamp {
                    continue;
                }
                self.vstamp[v as usize] = self.stamp;
                let [f0, f1] = self.occ[v as usize];
                if self.is_inside(f0, ca, cb, pa, pb) != self.is_inside(f1, ca, cb, pa, pb) {
                    self.class_b.push(v);
                }
            }
        }
        self.wa + self.class_b.len()
    }

    /// Candidate `k` in `0..=W` for the last query.
    pub fn pick(&mut self, k: usize) -> usize {
        let x = self.qx;
        let w = self.wa + self.class_b.len();
        match self.order {
            CandidateOrder::Classed => {
                if k == w {
                    return x;
                }
                if k >= self.wa {
                    return self.class_b[k - self.wa] as usize;
                }
                let ca = self.chunk_of[self.qa as usize];
                let cb = self.chunk_of[self.qb as usize];
                let mut k = k;
                for d in 0..self.q {
                    if self.cstamp[d] == self.stamp || d as u32 == ca || d as u32 == cb {
                        continue;
                    }
                    let vd = self.vf[d] as usize;
                    if k >= vd {
                        k -= vd;
                        continue;
                    }
                    for &c in &self.f_list {
                        let len = self.own[c as usize * self.q + d] as usize;
                        if k < len {
                            return self.pair_list(c, d as u32).nth(k).unwrap() as usize;
                        }
                        k -= len;
                    }
                    unreachable!("class A counts out of sync");
                }
                unreachable!("class A index out of range")
            }
            CandidateOrder::ById => {
                let mut all = std::mem::take(&mut self.sorted);
                all.clear();
                self.collect_class_a(&mut all);
                all.extend_from_slice(&self.class_b);
                all.push(x as u32);
                all.sort_unstable();
                let y = all[k] as usize;
                self.sorted = all;
                y
            }
        }
    }

    fn collect_class_a(&self, out: &mut Vec<u32>) {
        let ca = self.chunk_of[self.qa as usize];
        let cb = self.chunk_of[self.qb as usize];
        for d in 0..self.q {
            if self.vf[d] == 0 || self.cstamp[d] == self.stamp || d as u32 == ca || d as u32 == cb {
                continue;
            }
            for &c in &self.f_list {
                out.extend(self.pair_list(c, d as u32));
            }
        }
    }

    /// Crossing chords of the last query (unordered).
    pub fn crossing_set(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.f_list.is_empty() {
            self.collect_class_a(&mut out);
        }
        out.extend_from_slice(&self.class_b);
        out.into_iter().map(|v| v as usize).collect()
    }

    pub fn tour(&self) -> Tour {
        Tour::from_cyclic_unchecked(self.sequence())
    }

    /// Recompute every derived structure from the chunk contents and compare.
    pub fn validate(&self) -> Result<(), StoreInconsistency> {
        let err = |s: String| Err(StoreInconsistency(s));
        let q = self.q;
        // tree shape and aggregates
        let order = self.chunk_order();
        if self.root != NIL && self.parent[self.root as usize] != NIL {
            return err("root has a parent".into());
        }
        for &c in &order {
            let cu = c as usize;
            if !self.live[cu] {
                return err(format!("retired chunk {c} still in the tree"));
            }
            for child in [self.left[cu], self.right[cu]] {
                if child != NIL && self.parent[child as usize] != c {
                    return err(format!("parent link of {child} does not point to {c}"));
                }
                if child != NIL && self.prio[child as usize] > self.prio[cu] {
                    return err(format!("heap order broken at {c}"));
                }
            }
            let (l, r) = (self.left[cu], self.right[cu]);
            let cnt = 1 + self.cnt_of(l) + self.cnt_of(r);
            let len = self.items[cu].len() as u32 + self.len_of(l) + self.len_of(r);
            if cnt != self.cnt[cu] || len != self.len[cu] {
                return err(format!("size fields wrong at chunk {c}"));
            }
            for d in 0..q {
                let mut want = self.own[cu * q + d];
                if l != NIL {
                    want += self.agg[l as usize * q + d];
                }
                if r != NIL {
                    want += self.agg[r as usize * q + d];
                }
                if want != self.agg[cu * q + d] {
                    return err(format!("aggregate at node {c}, coordinate {d}: {} != {want}", self.agg[cu * q + d]));
                }
            }
        }
        if order.len() != self.live_chunks() {
            return err(format!("{} chunks in tree, {} live", order.len(), self.live_chunks()));
        }
        // chunk contents
        let mut seen = vec![false; self.m];
        for &c in &order {
            let size = self.items[c as usize].len();
            if order.len() > 1 && (2 * size < self.b || size > 2 * self.b) {
                return err(format!("chunk {c} has size {size} outside [B/2, 2B] for B={}", self.b));
            }
            for (i, &e) in self.items[c as usize].iter().enumerate() {
                if seen[e as usize] {
                    return err(format!("arc {e} appears twice"));
                }
                seen[e as usize] = true;
                if self.chunk_of[e as usize] != c || self.offset[e as usize] != i as u32 {
                    return err(format!("arc {e} has stale location"));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return err("some arc is missing from the chunks".into());
        }
        // pair lists and counts
        let mut own = vec![0 as Count; q * q];
        let mut total = 0;
        for v in 0..self.n {
            let [e0, e1] = self.occ[v];
            let (c, d) = (self.chunk_of[e0 as usize], self.chunk_of[e1 as usize]);
            if !self.pair_list(c, d).any(|u| u == v as u32) {
                return err(format!("vertex {v} missing from pair list ({c}, {d})"));
            }
            if c == d {
                own[c as usize * q + c as usize] += 2;
            } else {
                own[c as usize * q + d as usize] += 1;
                own[d as usize * q + c as usize] += 1;
            }
        }
        for &h in &self.head {
            let mut at = h;
            let mut before = NIL;
            while at != NIL {
                if self.prev[at as usize] != before {
                    return err(format!("broken back link at vertex {at}"));
                }
                total += 1;
                if total > self.n {
                    break;
                }
                before = at;
                at = self.next[at as usize];
            }
        }
        if total != self.n {
            return err(format!("pair lists hold {total} entries for {} vertices", self.n));
        }
        if let Some(i) = (0..q * q).find(|&i| own[i] != self.own[i]) {
            return err(format!("own count at ({}, {}) is {}, expected {}", i / q, i % q, self.own[i], own[i]));
        }
        for c in 0..q {
            if !self.live[c] && !self.items[c].is_empty() {
                return err(format!("retired chunk {c} still has items"));
            }
        }
        Ok(())
    }
}

impl RepairWalk for ChordStore {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn crossing_count(&mut self, x: usize) -> usize {
        self.query(x)
    }

    fn candidate(&mut self, x: usize, k: usize) -> usize {
        debug_assert_eq!(self.qx, x);
        self.pick(k)
    }

    fn apply_flip_pair(&mut self, x: usize, y: usize) {
        self.four_cut(x, y);
    }

    fn tour(&self) -> Tour {
        ChordStore::tour(self)
    }
}

/// `step_fast` on the chunked store.
pub fn step_fast(s: &mut ChordStore, rng: &mut WalkRng) -> crate::walk::StepOutcome {
    s.step(rng)
}
