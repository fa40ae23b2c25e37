//! Treap over chunk ids: split/merge by rank, parent links, subtree sums.

use super::{ChordStore, Count, NIL};

impl ChordStore {
    #[inline]
    pub(super) fn cnt_of(&self, u: u32) -> u32 {
        if u == NIL {
            0
        } else {
            self.cnt[u as usize]
        }
    }

    #[inline]
    pub(super) fn len_of(&self, u: u32) -> u32 {
        if u == NIL {
            0
        } else {
            self.len[u as usize]
        }
    }

    /// Recompute the fields of `u` from its children and fix their parent links.
    pub(super) fn pull(&mut self, u: u32) {
        let q = self.q;
        let uu = u as usize;
        let (l, r) = (self.left[uu], self.right[uu]);
        self.cnt[uu] = 1 + self.cnt_of(l) + self.cnt_of(r);
        self.len[uu] = self.items[uu].len() as u32 + self.len_of(l) + self.len_of(r);
        let (own, agg) = (&self.own, &mut self.agg);
        let dst = uu * q;
        agg[dst..dst + q].copy_from_slice(&own[dst..dst + q]);
        for child in [l, r] {
            if child != NIL {
                self.parent[child as usize] = u;
                let src = child as usize * q;
                let (lo, hi) = if src < dst { agg.split_at_mut(dst) } else { agg.split_at_mut(src) };
                let (d, s) = if src < dst { (&mut hi[..q], &lo[src..src + q]) } else { (&mut lo[dst..dst + q], &hi[..q]) };
                for (x, y) in d.iter_mut().zip(s) {
                    *x += *y;
                }
            }
        }
    }

    pub(super) fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.prio[a as usize] > self.prio[b as usize] {
            let r = self.merge(self.right[a as usize], b);
            self.right[a as usize] = r;
            self.pull(a);
            a
        } else {
            let l = self.merge(a, self.left[b as usize]);
            self.left[b as usize] = l;
            self.pull(b);
            b
        }
    }

    /// Split off the first `k` chunks. Returned roots have no parent.
    pub(super) fn split(&mut self, t: u32, k: u32) -> (u32, u32) {
        let (l, r) = self.split_rec(t, k);
        if l != NIL {
            self.parent[l as usize] = NIL;
        }
        if r != NIL {
            self.parent[r as usize] = NIL;
        }
        (l, r)
    }

    fn split_rec(&mut self, t: u32, k: u32) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        let tu = t as usize;
        let lc = self.cnt_of(self.left[tu]);
        if k <= lc {
            let (a, b) = self.split_rec(self.left[tu], k);
            self.left[tu] = b;
            self.pull(t);
            (a, t)
        } else {
            let (a, b) = self.split_rec(self.right[tu], k - lc - 1);
            self.right[tu] = a;
            if b != NIL {
                self.parent[b as usize] = NIL;
            }
            self.pull(t);
            (t, b)
        }
    }

    /// In-order successor, wrapping to the first chunk.
    pub(super) fn successor(&self, u: u32) -> u32 {
        let mut u = u;
        if self.right[u as usize] != NIL {
            u = self.right[u as usize];
            while self.left[u as usize] != NIL {
                u = self.left[u as usize];
            }
            return u;
        }
        loop {
            let p = self.parent[u as usize];
            if p == NIL {
                let mut f = self.root;
                while self.left[f as usize] != NIL {
                    f = self.left[f as usize];
                }
                return f;
            }
            if self.left[p as usize] == u {
                return p;
            }
            u = p;
        }
    }

    pub(super) fn chunk_rank(&self, c: u32) -> u32 {
        let mut r = self.cnt_of(self.left[c as usize]);
        let mut u = c;
        while self.parent[u as usize] != NIL {
            let p = self.parent[u as usize];
            if self.right[p as usize] == u {
                r += self.cnt_of(self.left[p as usize]) + 1;
            }
            u = p;
        }
        r
    }

    pub(super) fn chunk_start(&self, c: u32) -> usize {
        let mut s = self.len_of(self.left[c as usize]) as usize;
        let mut u = c;
        while self.parent[u as usize] != NIL {
            let p = self.parent[u as usize];
            if self.right[p as usize] == u {
                s += (self.len_of(self.left[p as usize]) + self.items[p as usize].len() as u32) as usize;
            }
            u = p;
        }
        s
    }

    /// Sum of `own` rows over the first `k` chunks.
    pub(super) fn prefix_into(&self, mut k: u32, out: &mut [Count]) {
        let q = self.q;
        out.iter_mut().for_each(|x| *x = 0);
        let add = |out: &mut [Count], row: &[Count]| {
            for (x, y) in out.iter_mut().zip(row) {
                *x += *y;
            }
        };
        let mut t = self.root;
        while t != NIL && k > 0 {
            let tu = t as usize;
            let l = self.left[tu];
            let lc = self.cnt_of(l);
            if k <= lc {
                t = l;
            } else {
                if l != NIL {
                    add(out, &self.agg[l as usize * q..(l as usize + 1) * q]);
                }
                add(out, &self.own[tu * q..(tu + 1) * q]);
                k -= lc + 1;
                t = self.right[tu];
            }
        }
    }
}
