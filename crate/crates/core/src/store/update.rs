//! Four-cut update with local chunk rebuild.
//!
//! With `x` at positions `a < b` and `y` at `c` inside and `d` outside,
//! cutting after each of `a, c, b, d` gives blocks `X = (a, c]`,
//! `Y = (c, b]`, `Z = (b, d]` and `W = (d, a]`; the new cyclic order is
//! `Z Y X W`. Chunks holding a cut become pieces. Each maximal run of
//! pieces is re-cut into fresh chunks, borrowing the next whole chunk when
//! it is shorter than half a chunk.

use super::{partition_sizes, ChordStore, Count, NIL};

const NO_CUT: u8 = 4;

#[derive(Clone, Copy, Debug)]
enum Tok {
    Run(u32),
    Slice { c: u32, lo: u32, hi: u32, cut: u8 },
    Whole(u32),
}

impl Tok {
    fn is_run(&self) -> bool {
        matches!(self, Tok::Run(_))
    }
}

enum Group {
    Run(u32),
    Window(usize),
}

impl ChordStore {
    pub(super) fn four_cut(&mut self, x: usize, y: usize) {
        let [e0, e1] = self.occ[x];
        let (p0, p1) = (self.position(e0 as usize), self.position(e1 as usize));
        let (a, b, pa, pb) = if p0 < p1 { (e0, e1, p0, p1) } else { (e1, e0, p1, p0) };
        let [f0, f1] = self.occ[y];
        let pf0 = self.position(f0 as usize);
        let (c, d) = if pa < pf0 && pf0 < pb { (f0, f1) } else { (f1, f0) };
        debug_assert!({
            let pd = self.position(d as usize);
            !(pa < pd && pd < pb)
        });
        let cuts = [a, c, b, d];

        let mut ks: Vec<(u32, u32)> = cuts
            .iter()
            .map(|&e| {
                let ch = self.chunk_of[e as usize];
                (self.chunk_rank(ch), ch)
            })
            .collect();
        ks.sort_unstable();
        ks.dedup();

        let mut runs = Vec::with_capacity(ks.len() + 1);
        let mut rest = self.root;
        let mut consumed = 0;
        for &(r, ch) in &ks {
            let (run, tail) = self.split(rest, r - consumed);
            let (node, tail) = self.split(tail, 1);
            debug_assert_eq!(node, ch);
            runs.push(run);
            rest = tail;
            consumed = r + 1;
        }
        let wrap = self.merge(rest, runs[0]);
        if wrap != NIL {
            self.parent[wrap as usize] = NIL;
        }

        let mut toks = Vec::with_capacity(16);
        for (j, &(_, ch)) in ks.iter().enumerate() {
            let mut offs: Vec<(u32, u8)> = cuts
                .iter()
                .enumerate()
                .filter(|&(_, &e)| self.chunk_of[e as usize] == ch)
                .map(|(l, &e)| (self.offset[e as usize], l as u8))
                .collect();
            offs.sort_unstable();
            let mut lo = 0;
            for (o, l) in offs {
                toks.push(Tok::Slice { c: ch, lo, hi: o + 1, cut: l });
                lo = o + 1;
            }
            let len = self.items[ch as usize].len() as u32;
            if lo < len {
                toks.push(Tok::Slice { c: ch, lo, hi: len, cut: NO_CUT });
            }
            let run = if j + 1 < ks.len() { runs[j + 1] } else { wrap };
            if run != NIL {
                toks.push(Tok::Run(run));
            }
        }

        // reorder X Y Z W -> Z Y X W, starting right after the cut at a
        let ia = toks.iter().position(|t| matches!(t, Tok::Slice { cut: 0, .. })).unwrap();
        toks.rotate_left(ia + 1);
        let mut groups: [Vec<Tok>; 4] = Default::default();
        let mut g = 0;
        for t in toks {
            groups[g].push(t);
            if let Tok::Slice { cut, .. } = t {
                if cut != NO_CUT && cut != 0 {
                    g = cut as usize;
                }
            }
        }
        let [gx, gy, gz, gw] = groups;
        let toks: Vec<Tok> = gz.into_iter().chain(gy).chain(gx).chain(gw).collect();

        // a window shorter than half a chunk takes the first chunk of the next run
        let len = toks.len();
        let half = self.b.div_ceil(2) as u32;
        let mut borrow = vec![false; len];
        if let Some(start) = toks.iter().position(|t| t.is_run()) {
            let mut acc = 0;
            for j in 1..=len {
                let i = (start + j) % len;
                match toks[i] {
                    Tok::Slice { lo, hi, .. } => acc += hi - lo,
                    Tok::Run(_) => {
                        borrow[i] = acc > 0 && acc < half;
                        acc = 0;
                    }
                    Tok::Whole(_) => unreachable!(),
                }
            }
        }
        let mut peeled = Vec::with_capacity(len + 4);
        for (i, &t) in toks.iter().enumerate() {
            match t {
                Tok::Run(r) if borrow[i] => {
                    let (first, rest) = self.split(r, 1);
                    peeled.push(Tok::Whole(first));
                    if rest != NIL {
                        peeled.push(Tok::Run(rest));
                    }
                }
                t => peeled.push(t),
            }
        }
        if let Some(ir) = peeled.iter().position(|t| t.is_run()) {
            peeled.rotate_left(ir);
        }

        let mut out_groups: Vec<Group> = Vec::new();
        let mut retired: Vec<u32> = ks.iter().map(|&(_, ch)| ch).collect();
        let mut windows: Vec<Vec<u32>> = Vec::new();
        let mut i = 0;
        while i < peeled.len() {
            if let Tok::Run(r) = peeled[i] {
                out_groups.push(Group::Run(r));
                i += 1;
                continue;
            }
            let mut arcs: Vec<u32> = Vec::new();
            while i < peeled.len() && !peeled[i].is_run() {
                match peeled[i] {
                    Tok::Slice { c, lo, hi, .. } => {
                        arcs.extend_from_slice(&self.items[c as usize][lo as usize..hi as usize])
                    }
                    Tok::Whole(c) => {
                        arcs.extend_from_slice(&self.items[c as usize]);
                        retired.push(c);
                    }
                    Tok::Run(_) => unreachable!(),
                }
                i += 1;
            }
            out_groups.push(Group::Window(windows.len()));
            windows.push(arcs);
        }

        // chunks being rebuilt carry the current stamp; run nodes above a
        // touched chunk get marked and their changed columns redone at the end
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.vstamp.iter_mut().for_each(|s| *s = 0);
            self.cstamp.iter_mut().for_each(|s| *s = 0);
            self.mark.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        for &c in &retired {
            self.cstamp[c as usize] = self.stamp;
        }
        let mut affected = Vec::new();
        for &e in windows.iter().flatten() {
            let v = self.owner[e as usize];
            if self.vstamp[v as usize] != self.stamp {
                self.vstamp[v as usize] = self.stamp;
                affected.push(v);
            }
        }
        for &v in &affected {
            self.relink(v, -1);
        }
        for &c in &retired {
            self.retire(c);
        }
        let mut cols = retired;
        let mut fresh: Vec<Vec<u32>> = Vec::with_capacity(windows.len());
        for arcs in windows {
            let mut ids = Vec::new();
            let mut start = 0;
            for size in partition_sizes(arcs.len(), self.b) {
                let nc = self.alloc_chunk();
                self.cstamp[nc as usize] = self.stamp;
                self.install_items(nc, arcs[start..start + size].to_vec());
                ids.push(nc);
                cols.push(nc);
                start += size;
            }
            fresh.push(ids);
        }
        for &v in &affected {
            self.relink(v, 1);
        }
        cols.sort_unstable();
        cols.dedup();
        for g in &out_groups {
            if let Group::Run(r) = *g {
                self.refresh_columns(r, &cols);
            }
        }

        let mut root = NIL;
        for g in out_groups {
            let t = match g {
                Group::Run(r) => r,
                Group::Window(w) => {
                    let mut sub = NIL;
                    for &nc in &fresh[w] {
                        self.pull(nc);
                        sub = self.merge(sub, nc);
                    }
                    sub
                }
            };
            root = self.merge(root, t);
        }
        self.parent[root as usize] = NIL;
        self.root = root;
    }

    /// Add (`delta = 1`) or drop vertex `v` from its pair list and `own`
    /// counts without touching aggregates.
    fn relink(&mut self, v: u32, delta: Count) {
        let [o0, o1] = self.occ[v as usize];
        let (c, d) = (self.chunk_of[o0 as usize], self.chunk_of[o1 as usize]);
        let key = self.pair_key(c, d);
        if delta > 0 {
            self.link(v, key);
        } else {
            self.unlink(v, key);
        }
        let q = self.q;
        if c == d {
            self.own[c as usize * q + c as usize] += 2 * delta;
        } else {
            self.own[c as usize * q + d as usize] += delta;
            self.own[d as usize * q + c as usize] += delta;
        }
        for e in [c, d] {
            if self.cstamp[e as usize] != self.stamp {
                let mut u = e;
                while u != NIL && self.mark[u as usize] != self.stamp {
                    self.mark[u as usize] = self.stamp;
                    u = self.parent[u as usize];
                }
            }
        }
    }

    fn refresh_columns(&mut self, u: u32, cols: &[u32]) {
        if u == NIL || self.mark[u as usize] != self.stamp {
            return;
        }
        let (l, r) = (self.left[u as usize], self.right[u as usize]);
        self.refresh_columns(l, cols);
        self.refresh_columns(r, cols);
        let q = self.q;
        let (uq, lq, rq) = (u as usize * q, l as usize * q, r as usize * q);
        for &c in cols {
            let c = c as usize;
            let mut v = self.own[uq + c];
            if l != NIL {
                v += self.agg[lq + c];
            }
            if r != NIL {
                v += self.agg[rq + c];
            }
            self.agg[uq + c] = v;
        }
    }

    fn retire(&mut self, c: u32) {
        let cu = c as usize;
        let q = self.q;
        debug_assert!(self.own[cu * q..(cu + 1) * q].iter().all(|&x| x == 0), "retired chunk {c} still counted");
        self.agg[cu * q..(cu + 1) * q].fill(0);
        self.items[cu].clear();
        self.live[cu] = false;
        self.left[cu] = NIL;
        self.right[cu] = NIL;
        self.parent[cu] = NIL;
        self.generation[cu] = self.generation[cu].wrapping_add(1);
        self.free.push(c);
    }
}
