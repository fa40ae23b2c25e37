//! Dirichlet form, entropy and the flat log-Sobolev check.

use super::ExactKernel;
use crate::rng::WalkRng;

/// `E_P(f, f) = 1/2 sum mu(x) P(x, y) (f(x) - f(y))^2`.
pub fn dirichlet_form(k: &ExactKernel, f: &[f64]) -> f64 {
    let m = k.states.len();
    let mut total = 0.0;
    for s in 0..m {
        for t in 0..m {
            let d = f[s] - f[t];
            total += k.mu[s] * k.p[(s, t)] * d * d;
        }
    }
    0.5 * total
}

/// `Ent_mu(f^2)` with `0 ln 0 = 0`.
pub fn entropy_of_square(mu: &[f64], f: &[f64]) -> f64 {
    let mut e = 0.0;
    let mut mean = 0.0;
    for (m, x) in mu.iter().zip(f) {
        let g = x * x;
        mean += m * g;
        if g > 0.0 {
            e += m * g * g.ln();
        }
    }
    if mean > 0.0 {
        e - mean * mean.ln()
    } else {
        0.0
    }
}

/// Constant `n (ln n + 2)` of the flat log-Sobolev inequality.
pub fn flat_lsi_constant(n: usize) -> f64 {
    let n = n as f64;
    n * (n.ln() + 2.0)
}

#[derive(Clone, Copy, Debug)]
pub struct LsiSample {
    pub entropy: f64,
    pub bound: f64,
}

impl LsiSample {
    pub fn holds(&self) -> bool {
        self.entropy <= self.bound + 1e-9
    }
}

pub fn flat_lsi_sample(k: &ExactKernel, f: &[f64]) -> LsiSample {
    LsiSample {
        entropy: entropy_of_square(&k.mu, f),
        bound: flat_lsi_constant(k.n) * dirichlet_form(k, f),
    }
}

/// Test functions of mixed shapes: Gaussian, indicator, log-normal and point mass.
pub fn random_test_function(size: usize, trial: usize, rng: &mut WalkRng) -> Vec<f64> {
    match trial % 4 {
        0 => (0..size).map(|_| rng.normal()).collect(),
        1 => (0..size).map(|_| rng.below(2) as f64).collect(),
        2 => (0..size).map(|_| (3.0 * rng.normal()).exp()).collect(),
        _ => {
            let mut f = vec![0.0; size];
            f[rng.below(size)] = 1.0;
            f
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{exact_kernel, SkewMatrix, SubsetWeightTable};

    #[test]
    fn constants_have_no_entropy() {
        let a = SkewMatrix::block_diagonal(4, &[1.0, 1.0]);
        let k = exact_kernel(&SubsetWeightTable::new(&a).unwrap()).unwrap();
        let f = vec![2.0; k.states.len()];
        assert!(entropy_of_square(&k.mu, &f).abs() < 1e-12);
        assert_eq!(dirichlet_form(&k, &f), 0.0);
    }

    #[test]
    fn flat_blocks_satisfy_bound() {
        let a = SkewMatrix::block_diagonal(6, &[1.0, 1.0, 1.0]);
        let t = SubsetWeightTable::new(&a).unwrap();
        assert!(t.is_flat(1e-12));
        let k = exact_kernel(&t).unwrap();
        let mut rng = WalkRng::from_seed(1);
        for trial in 0..200 {
            let f = random_test_function(k.states.len(), trial, &mut rng);
            assert!(flat_lsi_sample(&k, &f).holds());
        }
    }
}
