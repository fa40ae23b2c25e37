//! Ground truth at small scale: exhaustive tour enumeration, the
//! arborescence-times-factorials count, and total variation of samples.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{DirectedMultigraph, GraphError, Tour, TransitionSystem};
use crate::rng::WalkRng;

/// Cap on the number of transition systems visited by [`enumerate_tours`].
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration would visit more than {budget} transition systems")]
    BudgetExceeded { budget: u64 },
    #[error("sample {index} is not a tour of the graph")]
    OutOfCensus { index: usize },
    #[error("no samples")]
    NoSamples,
    #[error("arborescence counts differ between roots {0} and {1}")]
    RootDependent(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug)]
pub struct TourCensus {
    pub tours: Vec<Tour>,
    index: HashMap<Tour, usize>,
}

impl TourCensus {
    pub fn count(&self) -> usize {
        self.tours.len()
    }

    pub fn index_of(&self, t: &Tour) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Exact uniform draw.
    pub fn sample_uniform(&self, rng: &mut WalkRng) -> &Tour {
        &self.tours[rng.below(self.tours.len())]
    }
}

/// Number of transition systems, `prod_v deg(v)!`, saturating.
pub fn system_count(g: &DirectedMultigraph) -> u64 {
    (0..g.vertex_count())
        .map(|v| (1..=g.degree(v) as u64).fold(1u64, |a, k| a.saturating_mul(k)))
        .fold(1u64, |a, f| a.saturating_mul(f))
}

pub fn enumerate_tours(g: &DirectedMultigraph) -> Result<TourCensus, OracleError> {
    g.check_eulerian()?;
    if system_count(g) > ENUMERATION_BUDGET {
        return Err(OracleError::BudgetExceeded { budget: ENUMERATION_BUDGET });
    }
    let verts: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).collect();
    let perms: Vec<Vec<Vec<usize>>> = verts.iter().map(|&v| permutations(g.degree(v))).collect();
    let mut choice = vec![0usize; verts.len()];
    let mut succ = vec![0usize; g.arc_count()];
    let mut tours = Vec::new();
    loop {
        for (k, &v) in verts.iter().enumerate() {
            let (ins, outs) = (g.in_arcs(v), g.out_arcs(v));
            for (i, &o) in perms[k][choice[k]].iter().enumerate() {
                succ[ins[i]] = outs[o];
            }
        }
        let ts = TransitionSystem::new(g, succ.clone())?;
        if let Ok(t) = ts.to_tour() {
            tours.push(t);
        }
        let mut k = 0;
        loop {
            if k == verts.len() {
                tours.sort();
                tours.dedup();
                let index = tours.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
                return Ok(TourCensus { tours, index });
            }
            choice[k] += 1;
            if choice[k] < perms[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    crate::switchnet::all_permutations(d)
        .into_iter()
        .map(|p| p.into_iter().map(usize::from).collect())
        .collect()
}

/// Determinant by fraction-free elimination in exact integers.
pub fn det_bigint(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Spanning arborescences oriented towards `root`.
pub fn arborescences(g: &DirectedMultigraph, root: usize) -> BigUint {
    let verts: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0 && v != root).collect();
    let mut pos = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in verts.iter().enumerate() {
        pos[v] = i;
    }
    let k = verts.len();
    let mut l = vec![vec![BigInt::zero(); k]; k];
    for a in g.arcs() {
        if a.tail == a.head || pos[a.tail] == usize::MAX {
            continue;
        }
        let i = pos[a.tail];
        l[i][i] += 1;
        if pos[a.head] != usize::MAX {
            l[i][pos[a.head]] -= 1;
        }
    }
    let d = det_bigint(l);
    debug_assert!(!d.is_negative());
    d.magnitude().clone()
}

/// Arborescence count times `prod_v (deg(v) - 1)!`, checked at two roots.
pub fn best_count(g: &DirectedMultigraph) -> Result<BigUint, OracleError> {
    g.check_eulerian()?;
    let verts: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).collect();
    let r0 = verts[0];
    let r1 = *verts.last().unwrap();
    let t0 = arborescences(g, r0);
    if r1 != r0 && arborescences(g, r1) != t0 {
        return Err(OracleError::RootDependent(r0, r1));
    }
    let mut count = t0;
    for &v in &verts {
        for k in 1..g.degree(v) {
            count *= k as u64;
        }
    }
    Ok(count)
}

/// `(1/2) sum_T |freq(T) - 1/count|` over the census.
pub fn empirical_tv(samples: &[Tour], census: &TourCensus) -> Result<f64, OracleError> {
    if samples.is_empty() {
        return Err(OracleError::NoSamples);
    }
    let mut hits = vec![0u64; census.count()];
    for (i, t) in samples.iter().enumerate() {
        let k = census.index_of(t).ok_or(OracleError::OutOfCensus { index: i })?;
        hits[k] += 1;
    }
    Ok(tv_from_counts(&hits, samples.len() as u64))
}

/// TV distance from uniform given per-tour hit counts.
pub fn tv_from_counts(hits: &[u64], total: u64) -> f64 {
    let u = 1.0 / hits.len() as f64;
    0.5 * hits.iter().map(|&h| (h as f64 / total as f64 - u).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::triangle;

    #[test]
    fn small_counts() {
        let c3 = DirectedMultigraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(enumerate_tours(&c3).unwrap().count(), 1);
        assert_eq!(best_count(&c3).unwrap(), BigUint::from(1u32));
        let loops = DirectedMultigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        assert_eq!(system_count(&loops), 2);
        assert_eq!(enumerate_tours(&loops).unwrap().count(), 1);
        assert_eq!(best_count(&loops).unwrap(), BigUint::from(1u32));
        let tri = triangle();
        assert_eq!(system_count(&tri), 8);
        assert_eq!(enumerate_tours(&tri).unwrap().count(), 3);
        assert_eq!(best_count(&tri).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn two_by_two_minor() {
        let m = vec![vec![BigInt::from(2), BigInt::from(-1)], vec![BigInt::from(-1), BigInt::from(2)]];
        assert_eq!(det_bigint(m), BigInt::from(3));
    }

    #[test]
    fn counts_agree_on_random_graphs() {
        let mut rng = WalkRng::from_seed(31);
        let mut checked = 0;
        while checked < 30 {
            let n = 2 + rng.below(3);
            let g = crate::gen::random_eulerian(n, 1 + rng.below(3), &mut rng).unwrap();
            if g.arc_count() > 10 {
                continue;
            }
            let e = enumerate_tours(&g).unwrap().count();
            assert_eq!(BigUint::from(e), best_count(&g).unwrap());
            checked += 1;
        }
    }

    #[test]
    fn tv_examples() {
        let census = enumerate_tours(&triangle()).unwrap();
        let same = vec![census.tours[0].clone(); 10];
        assert!((empirical_tv(&same, &census).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let balanced: Vec<Tour> = census.tours.iter().cycle().take(30).cloned().collect();
        assert_eq!(empirical_tv(&balanced, &census).unwrap(), 0.0);
        assert_eq!(tv_from_counts(&[10, 0], 10), 0.5);
        let bogus = Tour::from_cyclic_unchecked(vec![0, 1, 2]);
        assert!(matches!(empirical_tv(&[bogus], &census), Err(OracleError::OutOfCensus { .. })));
    }

    #[test]
    fn budget_guard() {
        let g = crate::gen::random_eulerian(2, 12, &mut WalkRng::from_seed(1)).unwrap();
        assert!(matches!(enumerate_tours(&g), Err(OracleError::BudgetExceeded { .. })));
    }
}
