//! Guarded random lazy-transposition switching networks.
//!
//! A network on `D` wires is a list of switches, each acting on an
//! unordered wire pair. A switch is either straight or crossed, so a
//! setting of all `r` switches yields a permutation of the wires. The
//! first `D - 1` switches form the guard `(0,1), (1,2), ..., (D-2, D-1)`;
//! the remaining `R` are independent uniform pairs.
//!
//! Permutation convention: `pi[w]` is the output wire reached by the
//! token entering on wire `w`. A crossed switch on `(i, j)` swaps the
//! values `i` and `j` of the running permutation.

mod expand;

pub use expand::{expand_graph, ExpandParams, ExpansionMap, Gadget, SwitchArcs};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::WalkRng;

/// Largest width for which exact distributions are computed.
pub const MAX_EXACT_WIDTH: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwitchError {
    #[error("network needs at least 2 wires, got {0}")]
    TooFewWires(usize),
    #[error("parameter {name} = {value} out of range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("width {0} exceeds the exact-distribution cap")]
    TooWide(usize),
    #[error("graph is not suitable for expansion: {0}")]
    BadInput(String),
    #[error("permutation is not realizable by the network")]
    Unreachable,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchingNetwork {
    pub wires: usize,
    pub eta: f64,
    pub delta: f64,
    pub c: f64,
    /// Number of random switches after the guard.
    pub random_len: usize,
    pub switches: Vec<(u8, u8)>,
}

impl SwitchingNetwork {
    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn guard_len(&self) -> usize {
        self.wires - 1
    }

    /// Permutation induced by a setting (`true` = crossed).
    pub fn apply(&self, setting: &[bool]) -> Vec<u8> {
        let mut p: Vec<u8> = (0..self.wires as u8).collect();
        for (&(i, j), &x) in self.switches.iter().zip(setting) {
            if x {
                swap_values(&mut p, i, j);
            }
        }
        p
    }
}

fn swap_values(p: &mut [u8], i: u8, j: u8) {
    for v in p.iter_mut() {
        if *v == i {
            *v = j;
        } else if *v == j {
            *v = i;
        }
    }
}

/// `2 ceil(C D (ln D + ln(1/(eta delta))))`.
pub fn random_switch_count(d: usize, eta: f64, delta: f64, c: f64) -> usize {
    let d_f = d as f64;
    2 * (c * d_f * (d_f.ln() + (1.0 / (eta * delta)).ln())).ceil() as usize
}

pub fn build_network(
    d: usize,
    eta: f64,
    delta: f64,
    c: f64,
    rng: &mut WalkRng,
) -> Result<SwitchingNetwork, SwitchError> {
    if d < 2 || d > u8::MAX as usize {
        return Err(SwitchError::TooFewWires(d));
    }
    for (name, value) in [("eta", eta), ("delta", delta)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(SwitchError::BadParameter { name, value });
        }
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(SwitchError::BadParameter { name: "C", value: c });
    }
    let r = random_switch_count(d, eta, delta, c);
    let mut switches: Vec<(u8, u8)> = (0..d - 1).map(|i| (i as u8, i as u8 + 1)).collect();
    for _ in 0..r {
        let i = rng.below(d);
        let mut j = rng.below(d - 1);
        if j >= i {
            j += 1;
        }
        switches.push((i.min(j) as u8, i.max(j) as u8));
    }
    Ok(SwitchingNetwork { wires: d, eta, delta, c, random_len: r, switches })
}

/// All permutations of `0..d` in lexicographic order.
pub fn all_permutations(d: usize) -> Vec<Vec<u8>> {
    let mut p: Vec<u8> = (0..d as u8).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (0..d.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..d).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
        out.push(p.clone());
    }
}

/// Lexicographic rank via the Lehmer code.
pub fn perm_rank(p: &[u8]) -> usize {
    let d = p.len();
    let mut rank = 0;
    for i in 0..d {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (d - i) + smaller;
    }
    rank
}

pub fn factorial(d: usize) -> u64 {
    (1..=d as u64).product()
}

/// Number of settings inducing each permutation, indexed by [`perm_rank`].
/// The probability of `pi` is `counts[rank(pi)] / 2^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCounts {
    pub width: usize,
    pub r: usize,
    pub counts: Vec<BigUint>,
}

impl LiftCounts {
    pub fn count(&self, pi: &[u8]) -> &BigUint {
        &self.counts[perm_rank(pi)]
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn distribution(&self) -> PermDistribution {
        PermDistribution {
            width: self.width,
            probs: self.counts.iter().map(|c| dyadic_to_f64(c, self.r)).collect(),
        }
    }

    /// `count(pi) d! / 2^r`.
    pub fn ratio(&self, pi: &[u8]) -> f64 {
        dyadic_to_f64(&(self.count(pi) * factorial(self.width)), self.r)
    }
}

/// `x / 2^e` rounded to f64, without overflowing intermediate values.
pub fn dyadic_to_f64(x: &BigUint, e: usize) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as usize;
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().unwrap() as f64;
    top * 2f64.powi(shift as i32 - e as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermDistribution {
    pub width: usize,
    /// Probability of each permutation, indexed by [`perm_rank`].
    pub probs: Vec<f64>,
}

impl PermDistribution {
    pub fn uniform(width: usize) -> Self {
        let k = factorial(width) as usize;
        PermDistribution { width, probs: vec![1.0 / k as f64; k] }
    }
}

fn check_width(d: usize) -> Result<Vec<Vec<u8>>, SwitchError> {
    if d > MAX_EXACT_WIDTH {
        return Err(SwitchError::TooWide(d));
    }
    Ok(all_permutations(d))
}

/// Exact lift counts by forward convolution: a switch `t` maps
/// `l(pi) -> l(pi) + l(t o pi)`.
pub fn exact_lift_counts(net: &SwitchingNetwork) -> Result<LiftCounts, SwitchError> {
    let perms = check_width(net.wires)?;
    let k = perms.len();
    let mut counts = vec![BigUint::zero(); k];
    counts[0] = BigUint::one();
    let mut next = vec![BigUint::zero(); k];
    for &(i, j) in &net.switches {
        for (idx, p) in perms.iter().enumerate() {
            let mut q = p.clone();
            swap_values(&mut q, i, j);
            next[idx] = &counts[idx] + &counts[perm_rank(&q)];
        }
        std::mem::swap(&mut counts, &mut next);
    }
    Ok(LiftCounts { width: net.wires, r: net.switch_count(), counts })
}

/// Same counts by adding switches from the last one backwards (right
/// composition). Independent of [`exact_lift_counts`].
pub fn exact_lift_counts_reverse(net: &SwitchingNetwork) -> Result<LiftCounts, SwitchError> {
    let perms = check_width(net.wires)?;
    let k = perms.len();
    let mut counts = vec![BigUint::zero(); k];
    counts[0] = BigUint::one();
    for &(i, j) in net.switches.iter().rev() {
        let next: Vec<BigUint> = perms
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let mut q = p.clone();
                q.swap(i as usize, j as usize);
                &counts[idx] + &counts[perm_rank(&q)]
            })
            .collect();
        counts = next;
    }
    Ok(LiftCounts { width: net.wires, r: net.switch_count(), counts })
}

pub fn exact_distribution(net: &SwitchingNetwork) -> Result<PermDistribution, SwitchError> {
    Ok(exact_lift_counts(net)?.distribution())
}

/// Pointwise check `e^-eta / D! <= p <= e^eta / D!`.
pub fn audit_pointwise(dist: &PermDistribution, eta: f64) -> bool {
    let k = factorial(dist.width) as f64;
    let (lo, hi) = ((-eta).exp() / k, eta.exp() / k);
    dist.probs.iter().all(|&p| p >= lo && p <= hi)
}

/// Same bound evaluated on exact counts.
pub fn audit_counts(lc: &LiftCounts, eta: f64) -> bool {
    let perms = all_permutations(lc.width);
    perms.iter().all(|p| {
        let r = lc.ratio(p);
        r >= (-eta).exp() && r <= eta.exp()
    })
}

/// A setting inducing `pi`, found by forward reachability and backtracking.
pub fn find_setting(net: &SwitchingNetwork, pi: &[u8]) -> Result<Vec<bool>, SwitchError> {
    use std::collections::HashSet;
    let d = net.wires;
    if pi.len() != d {
        return Err(SwitchError::Unreachable);
    }
    let id: Vec<u8> = (0..d as u8).collect();
    let mut layers: Vec<HashSet<Vec<u8>>> = Vec::with_capacity(net.switch_count() + 1);
    layers.push(HashSet::from([id]));
    for &(i, j) in &net.switches {
        let prev = layers.last().unwrap();
        let mut next = HashSet::with_capacity(prev.len() * 2);
        for p in prev {
            next.insert(p.clone());
            let mut q = p.clone();
            swap_values(&mut q, i, j);
            next.insert(q);
        }
        layers.push(next);
    }
    if !layers.last().unwrap().contains(pi) {
        return Err(SwitchError::Unreachable);
    }
    let mut cur = pi.to_vec();
    let mut setting = vec![false; net.switch_count()];
    for k in (0..net.switch_count()).rev() {
        if !layers[k].contains(&cur) {
            let (i, j) = net.switches[k];
            swap_values(&mut cur, i, j);
            setting[k] = true;
            debug_assert!(layers[k].contains(&cur));
        }
    }
    Ok(setting)
}
