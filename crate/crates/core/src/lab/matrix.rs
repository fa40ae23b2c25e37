//! Real skew-symmetric matrices and Pfaffians.

use crate::chord::IntMatrix;
use crate::rng::WalkRng;

use super::LabError;

const SKEW_TOL: f64 = 1e-12;
/// Up to this size the Pfaffian is computed by row expansion.
pub const EXPANSION_MAX: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SkewMatrix {
    /// Row-major entries; rejects matrices that are not skew within 1e-12.
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self, LabError> {
        assert_eq!(a.len(), n * n, "entry count");
        for i in 0..n {
            for j in 0..n {
                if (a[i * n + j] + a[j * n + i]).abs() > SKEW_TOL {
                    return Err(LabError::NotSkew { i, j });
                }
            }
        }
        Ok(SkewMatrix { n, a })
    }

    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let x = f(i, j);
                a[i * n + j] = x;
                a[j * n + i] = -x;
            }
        }
        SkewMatrix { n, a }
    }

    /// Upper entries uniform in `[-1, 1)`.
    pub fn random(n: usize, rng: &mut WalkRng) -> Self {
        Self::from_upper(n, |_, _| rng.uniform(-1.0, 1.0))
    }

    /// Direct sum of 2x2 blocks with the given upper entries; a trailing odd
    /// coordinate (when `n` is odd) gets a zero row.
    pub fn block_diagonal(n: usize, params: &[f64]) -> Self {
        assert_eq!(params.len(), n / 2);
        Self::from_upper(n, |i, j| if i % 2 == 0 && j == i + 1 { params[i / 2] } else { 0.0 })
    }

    pub fn from_int(m: &IntMatrix) -> Result<Self, LabError> {
        let n = m.len();
        Self::new(n, m.iter().flat_map(|r| r.iter().map(|&x| x as f64)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Principal submatrix on the listed coordinates.
    pub fn principal(&self, idx: &[usize]) -> SkewMatrix {
        let k = idx.len();
        let mut a = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                a.push(self.get(i, j));
            }
        }
        SkewMatrix { n: k, a }
    }

    pub fn to_dmatrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.a)
    }

    pub fn pfaffian(&self) -> f64 {
        if self.n % 2 == 1 {
            return 0.0;
        }
        if self.n <= EXPANSION_MAX {
            let idx: Vec<usize> = (0..self.n).collect();
            pf_expand(self, &idx)
        } else {
            pf_tridiagonal(self)
        }
    }
}

fn pf_expand(a: &SkewMatrix, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let i = idx[0];
    let mut total = 0.0;
    let mut rest = Vec::with_capacity(idx.len().saturating_sub(2));
    for k in 1..idx.len() {
        let aij = a.get(i, idx[k]);
        if aij == 0.0 {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().enumerate().filter(|&(p, _)| p + 1 != k).map(|(_, &x)| x));
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * aij * pf_expand(a, &rest);
    }
    total
}

/// Skew tridiagonalization by Gauss transformations with pivoting.
fn pf_tridiagonal(m: &SkewMatrix) -> f64 {
    let n = m.n;
    let mut a = m.a.clone();
    let at = |a: &Vec<f64>, i: usize, j: usize| a[i * n + j];
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        for r in k + 2..n {
            if at(&a, r, k).abs() > at(&a, kp, k).abs() {
                kp = r;
            }
        }
        if kp != k + 1 {
            for c in 0..n {
                a.swap((k + 1) * n + c, kp * n + c);
            }
            for r in 0..n {
                a.swap(r * n + k + 1, r * n + kp);
            }
            pf = -pf;
        }
        let piv = at(&a, k, k + 1);
        if piv == 0.0 {
            return 0.0;
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|c| at(&a, k, c) / piv).collect();
            let col: Vec<f64> = (k + 2..n).map(|r| at(&a, r, k + 1)).collect();
            for (ri, r) in (k + 2..n).enumerate() {
                for (ci, c) in (k + 2..n).enumerate() {
                    a[r * n + c] += tau[ri] * col[ci] - col[ri] * tau[ci];
                }
            }
        }
        k += 2;
    }
    pf
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_by_four_example() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut it = v.iter();
        let a = SkewMatrix::from_upper(4, |_, _| *it.next().unwrap());
        assert_eq!(a.pfaffian(), 8.0);
        assert!((a.to_dmatrix().determinant() - 64.0).abs() < 1e-9);
        assert!((pf_tridiagonal(&a) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(SkewMatrix::from_upper(0, |_, _| 0.0).pfaffian(), 1.0);
        assert_eq!(SkewMatrix::from_upper(3, |_, _| 1.0).pfaffian(), 0.0);
        assert_eq!(SkewMatrix::from_upper(2, |_, _| -2.5).pfaffian(), -2.5);
    }

    #[test]
    fn rejects_non_skew() {
        assert!(matches!(SkewMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]), Err(LabError::NotSkew { .. })));
        assert!(SkewMatrix::new(1, vec![0.5]).is_err());
    }

    proptest! {
        #[test]
        fn pfaffian_squared_is_determinant(n in 0usize..14, seed in 0u64..500) {
            let mut rng = WalkRng::from_seed(seed);
            let a = SkewMatrix::random(n, &mut rng);
            let pf = a.pfaffian();
            let det = a.to_dmatrix().determinant();
            prop_assert!((pf * pf - det).abs() <= 1e-9 * det.abs().max(1.0));
            if n % 2 == 0 && n <= EXPANSION_MAX {
                prop_assert!((pf - pf_tridiagonal(&a)).abs() <= 1e-10 * pf.abs().max(1.0));
            }
        }
    }
}
