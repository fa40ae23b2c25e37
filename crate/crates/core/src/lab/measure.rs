//! Subset weights `w(S) = pf(A_S)^2`, the exact flip-repair kernel on
//! subsets, its intermediate measure and spectral gap.
//!
//! Subsets are bitmasks; bit `i` is coordinate `i`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{LabError, SkewMatrix};

pub const MAX_TABLE_DIM: usize = 20;
/// Weights below this fraction of the largest weight are treated as zero.
pub const SUPPORT_REL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SubsetWeightTable {
    pub n: usize,
    /// Signed Pfaffian of each principal submatrix (zero off the support).
    pub pf: Vec<f64>,
    pub w: Vec<f64>,
    pub z: f64,
    /// Masks with positive weight, ascending.
    pub support: Vec<u32>,
}

impl SubsetWeightTable {
    pub fn new(a: &SkewMatrix) -> Result<Self, LabError> {
        let n = a.dim();
        if n > MAX_TABLE_DIM {
            return Err(LabError::TooLarge { n, max: MAX_TABLE_DIM });
        }
        let size = 1usize << n;
        let mut pf = vec![0.0; size];
        pf[0] = 1.0;
        for mask in 1..size {
            if (mask as u32).count_ones() % 2 == 1 {
                continue;
            }
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let mut total = 0.0;
            let mut bits = rest;
            let mut k = 0;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let aij = a.get(i, j);
                if aij != 0.0 {
                    let t = aij * pf[rest & !(1 << j)];
                    total += if k % 2 == 0 { t } else { -t };
                }
                k += 1;
            }
            pf[mask] = total;
        }
        let mut w: Vec<f64> = pf.iter().map(|x| x * x).collect();
        let wmax = w.iter().cloned().fold(0.0, f64::max);
        let mut support = Vec::new();
        for mask in 0..size {
            if w[mask] > SUPPORT_REL_TOL * wmax {
                support.push(mask as u32);
            } else {
                w[mask] = 0.0;
                pf[mask] = 0.0;
            }
        }
        let z = w.iter().sum();
        Ok(SubsetWeightTable { n, pf, w, z, support })
    }

    pub fn mu(&self, mask: u32) -> f64 {
        self.w[mask as usize] / self.z
    }

    /// Total weight of the star `{Y ^ {i}}` of an odd set.
    pub fn star_weight(&self, y: u32) -> f64 {
        (0..self.n).map(|i| self.w[(y ^ (1 << i)) as usize]).sum()
    }

    /// True if every weight is 0 or 1 within `tol`.
    pub fn is_flat(&self, tol: f64) -> bool {
        self.w.iter().all(|&x| x.abs() <= tol || (x - 1.0).abs() <= tol)
    }
}

/// `w(S) = det(A_S)` for every subset.
pub fn subset_weights(a: &SkewMatrix) -> Result<SubsetWeightTable, LabError> {
    SubsetWeightTable::new(a)
}

#[derive(Clone, Debug)]
pub struct ExactKernel {
    pub n: usize,
    pub states: Vec<u32>,
    /// Dense row-stochastic matrix indexed like `states`.
    pub p: DMatrix<f64>,
    pub mu: Vec<f64>,
    index: Vec<usize>,
}

impl ExactKernel {
    pub fn index_of(&self, mask: u32) -> Option<usize> {
        match self.index[mask as usize] {
            usize::MAX => None,
            i => Some(i),
        }
    }

    /// Largest `|(mu P)(t) - mu(t)|`.
    pub fn stationarity_error(&self) -> f64 {
        let k = self.states.len();
        (0..k)
            .map(|t| {
                let s: f64 = (0..k).map(|s| self.mu[s] * self.p[(s, t)]).sum();
                (s - self.mu[t]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|mu(s)P(s,t) - mu(t)P(t,s)|`.
    pub fn reversibility_error(&self) -> f64 {
        let k = self.states.len();
        let mut worst: f64 = 0.0;
        for s in 0..k {
            for t in 0..k {
                worst = worst.max((self.mu[s] * self.p[(s, t)] - self.mu[t] * self.p[(t, s)]).abs());
            }
        }
        worst
    }

    /// `D^{1/2} P D^{-1/2}`, symmetrized.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let k = self.states.len();
        let sq: Vec<f64> = self.mu.iter().map(|m| m.sqrt()).collect();
        let mut s = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                s[(i, j)] = sq[i] * self.p[(i, j)] / sq[j];
            }
        }
        (&s + s.transpose()) * 0.5
    }

    /// Eigenvalues of the symmetrized kernel, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.symmetrized()).eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }
}

/// Kernel of "flip a uniform coordinate, then repair by reweighting the star".
pub fn exact_kernel(t: &SubsetWeightTable) -> Result<ExactKernel, LabError> {
    if t.support.is_empty() {
        return Err(LabError::EmptySupport);
    }
    let n = t.n;
    let k = t.support.len();
    let mut index = vec![usize::MAX; 1 << n];
    for (i, &s) in t.support.iter().enumerate() {
        index[s as usize] = i;
    }
    let mut p = DMatrix::zeros(k, k);
    let inv_n = 1.0 / n as f64;
    for (si, &s) in t.support.iter().enumerate() {
        for i in 0..n {
            let y = s ^ (1 << i);
            let c = t.star_weight(y);
            for j in 0..n {
                let tgt = y ^ (1 << j);
                let wt = t.w[tgt as usize];
                if wt > 0.0 {
                    p[(si, index[tgt as usize])] += inv_n * wt / c;
                }
            }
        }
    }
    let mu = t.support.iter().map(|&s| t.mu(s)).collect();
    Ok(ExactKernel { n, states: t.support.clone(), p, mu, index })
}

/// `nu(Y) = C(Y) / (n Z)` on odd sets with positive star weight.
pub fn intermediate_measure(t: &SubsetWeightTable) -> Vec<(u32, f64)> {
    let denom = t.n as f64 * t.z;
    (0..1u32 << t.n)
        .filter(|y| y.count_ones() % 2 == 1)
        .filter_map(|y| {
            let c = t.star_weight(y);
            (c > 0.0).then_some((y, c / denom))
        })
        .collect()
}

/// `1 - lambda_2` of the reversible kernel; 1 on a single state.
pub fn spectral_gap(k: &ExactKernel) -> f64 {
    if k.states.len() == 1 {
        return 1.0;
    }
    1.0 - k.eigenvalues()[1]
}
