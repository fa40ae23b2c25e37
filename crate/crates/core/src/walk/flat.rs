//! Compact linear-time engine for small graphs.
//!
//! Same layout and candidate order as [`super::PositionWalk`] with 16-bit
//! positions. The counting pass leaves a crossing flag per vertex, so the
//! candidate lookup is a block-sum scan. Hot loops are compiled a second
//! time with AVX2 and picked at run time.

use super::{PositionWalk, RepairWalk, WalkError};
use crate::graph::{DirectedMultigraph, Tour};

/// Largest arc count the 16-bit layout supports (sums stay below `i16::MAX`).
pub const FLAT_MAX_ARCS: usize = 16_000;

#[derive(Clone, Debug)]
pub struct FlatWalk {
    n: usize,
    m: i16,
    /// Vertex slots padded to a multiple of 32 with inert entries.
    np: usize,
    slot_arc: Vec<u32>,
    /// First occurrences in `pos[..np]`, second ones in `pos[np..]`.
    pos: Vec<i16>,
    /// Crossing flags of the last count, 0 or 1 per vertex slot.
    flags: Vec<u16>,
    avx2: bool,
}

#[inline(always)]
fn count_kernel(pa: &[i16], pb: &[i16], flags: &mut [u16], lo: i16, hi: i16) -> u16 {
    let mut sum = 0u16;
    for ((&a, &b), f) in pa.iter().zip(pb).zip(flags.iter_mut()) {
        let c = (((a > lo) & (a < hi)) ^ ((b > lo) & (b < hi))) as u16;
        *f = c;
        sum = sum.wrapping_add(c);
    }
    sum
}

/// With `s = (p - a - 1) mod m`: blocks `s < rc`, `s < rb`, `s < rd` move
/// by their shifts, everything else stays.
#[inline(always)]
fn remap_kernel(ps: &mut [i16], a: i16, m: i16, rc: i16, rb: i16, rd: i16) {
    let (sx, sy, sz) = (rd - rc, rd - rb - rc, -rb);
    let off = m - a - 1;
    // all values stay in (-2m, 2m), so wrapping ops never wrap
    for p in ps.iter_mut() {
        let mut s = p.wrapping_add(off);
        if s >= m {
            s = s.wrapping_sub(m);
        }
        let shift = if s < rc {
            sx
        } else if s < rb {
            sy
        } else if s < rd {
            sz
        } else {
            0
        };
        let mut np = s.wrapping_add(shift).wrapping_add(a + 1);
        if np >= m {
            np = np.wrapping_sub(m);
        }
        *p = np;
    }
}

/// Slot of the `k`-th set flag.
#[inline(always)]
fn select_kernel(flags: &[u16], mut k: usize) -> usize {
    // flags are 0/1, so the popcount of four packed flags is their sum
    for (wi, word) in flags.chunks_exact(4).enumerate() {
        let mut w = word.iter().rev().fold(0u64, |acc, &f| acc << 16 | f as u64);
        let c = w.count_ones() as usize;
        if k < c {
            for _ in 0..k {
                w &= w - 1;
            }
            return wi * 4 + w.trailing_zeros() as usize / 16;
        }
        k -= c;
    }
    unreachable!("candidate index out of range")
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,popcnt,bmi1")]
unsafe fn select_avx2(flags: &[u16], k: usize) -> usize {
    select_kernel(flags, k)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn count_avx2(pa: &[i16], pb: &[i16], flags: &mut [u16], lo: i16, hi: i16) -> u16 {
    count_kernel(pa, pb, flags, lo, hi)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn remap_avx2(ps: &mut [i16], a: i16, m: i16, rc: i16, rb: i16, rd: i16) {
    remap_kernel(ps, a, m, rc, rb, rd)
}

fn detect_avx2() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("avx2")
            && std::arch::is_x86_feature_detected!("popcnt")
            && std::arch::is_x86_feature_detected!("bmi1")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

impl FlatWalk {
    pub fn new(g: &DirectedMultigraph, tour: &Tour) -> Result<Self, WalkError> {
        if g.arc_count() > FLAT_MAX_ARCS {
            return Err(WalkError::TooLarge(g.arc_count()));
        }
        let base = PositionWalk::new(g, tour)?;
        let n = g.vertex_count();
        let (slot_arc, pa, pb) = base.into_parts();
        // padding has both occurrences at 0, so it never crosses
        let np = n.div_ceil(32) * 32;
        let mut pos = vec![0i16; 2 * np];
        for v in 0..n {
            pos[v] = pa[v] as i16;
            pos[np + v] = pb[v] as i16;
        }
        Ok(FlatWalk { n, m: (2 * n) as i16, np, slot_arc, pos, flags: vec![0; np], avx2: detect_avx2() })
    }

    /// Force the portable kernels.
    pub fn disable_simd(&mut self) {
        self.avx2 = false;
    }
}

impl RepairWalk for FlatWalk {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn crossing_count(&mut self, x: usize) -> usize {
        let (p, q) = (self.pos[x], self.pos[self.np + x]);
        let (lo, hi) = (p.min(q), p.max(q));
        let (pa, pb) = self.pos.split_at(self.np);
        #[cfg(target_arch = "x86_64")]
        if self.avx2 {
            // SAFETY: AVX2 support was detected at construction.
            return unsafe { count_avx2(pa, pb, &mut self.flags, lo, hi) } as usize;
        }
        count_kernel(pa, pb, &mut self.flags, lo, hi) as usize
    }

    fn candidate(&mut self, x: usize, k: usize) -> usize {
        self.flags[x] = 1;
        #[cfg(target_arch = "x86_64")]
        if self.avx2 {
            // SAFETY: AVX2 and POPCNT support were detected at construction.
            return unsafe { select_avx2(&self.flags, k) };
        }
        select_kernel(&self.flags, k)
    }

    fn apply_flip_pair(&mut self, x: usize, y: usize) {
        let m = self.m;
        let (p, q) = (self.pos[x], self.pos[self.np + x]);
        let a = p.min(q);
        let b = p.max(q);
        let (y0, y1) = (self.pos[y], self.pos[self.np + y]);
        let (c, d) = if a < y0 && y0 < b { (y0, y1) } else { (y1, y0) };
        let rc = c - a;
        let rb = b - a;
        let rd = if d > b { d - a } else { d + m - a };
        #[cfg(target_arch = "x86_64")]
        if self.avx2 {
            // SAFETY: AVX2 support was detected at construction.
            unsafe { remap_avx2(&mut self.pos, a, m, rc, rb, rd) };
            return;
        }
        remap_kernel(&mut self.pos, a, m, rc, rb, rd);
    }

    fn tour(&self) -> Tour {
        let mut seq = vec![0usize; self.m as usize];
        for v in 0..self.n {
            seq[self.pos[v] as usize] = self.slot_arc[2 * v] as usize;
            seq[self.pos[self.np + v] as usize] = self.slot_arc[2 * v + 1] as usize;
        }
        Tour::from_cyclic_unchecked(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::hierholzer_tour;
    use crate::rng::WalkRng;

    #[test]
    fn same_trajectory_as_position_walk() {
        let mut rng = WalkRng::from_seed(40);
        for n in [2usize, 3, 7, 33, 64, 65, 190] {
            let g = crate::gen::regular2(n, &mut rng).unwrap();
            let t = hierholzer_tour(&g).unwrap();
            for simd in [false, true] {
                let mut a = PositionWalk::new(&g, &t).unwrap();
                let mut b = FlatWalk::new(&g, &t).unwrap();
                if !simd {
                    b.disable_simd();
                }
                let (mut r1, mut r2) = (WalkRng::from_seed(n as u64), WalkRng::from_seed(n as u64));
                for _ in 0..3000 {
                    assert_eq!(a.step(&mut r1), b.step(&mut r2));
                }
                assert_eq!(a.tour(), b.tour());
            }
        }
    }
}
