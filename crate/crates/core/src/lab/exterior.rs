//! Exterior algebra on `R^{2^n}` with basis `e_S` indexed by bitmasks.
//!
//! `eps_i e_U = ins(i, U) e_{U+i}` and `iota_i` is its adjoint; both use
//! the sign `ins(i, U) = (-1)^{#{k in U : k < i}}`.

use nalgebra::DMatrix;

use super::SubsetWeightTable;

pub const MAX_BASIS_DIM: usize = 12;

#[inline]
pub fn ins(i: usize, u: u32) -> f64 {
    if (u & ((1u32 << i) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_i = eps_i + iota_i`, a signed permutation of the basis.
pub fn apply_c(i: usize, x: &[f64]) -> Vec<f64> {
    let bit = 1u32 << i;
    let mut y = vec![0.0; x.len()];
    for (u, &xu) in x.iter().enumerate() {
        if xu != 0.0 {
            let u = u as u32;
            y[(u ^ bit) as usize] = ins(i, u & !bit) * xu;
        }
    }
    y
}

/// `eps_b x` for a coefficient vector `b`.
pub fn wedge(b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for (i, &bi) in b.iter().enumerate() {
        if bi == 0.0 {
            continue;
        }
        let bit = 1u32 << i;
        for (u, &xu) in x.iter().enumerate() {
            let u = u as u32;
            if u & bit == 0 && xu != 0.0 {
                y[(u | bit) as usize] += bi * ins(i, u) * xu;
            }
        }
    }
    y
}

/// `iota_b x`.
pub fn contract(b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for (i, &bi) in b.iter().enumerate() {
        if bi == 0.0 {
            continue;
        }
        let bit = 1u32 << i;
        for u in 0..x.len() as u32 {
            if u & bit == 0 {
                y[u as usize] += bi * ins(i, u) * x[(u | bit) as usize];
            }
        }
    }
    y
}

/// `<e_Y, c_T e_{Y ^ T}>`, the sign picked up by `c_T` on a basis vector.
pub fn clifford_sign(y: u32, t: u32) -> f64 {
    let mut u = y ^ t;
    let mut sign = 1.0;
    let mut bits = t;
    // c_T = c_{i1} ... c_{ik} acts with the largest index first
    while bits != 0 {
        let j = 31 - bits.leading_zeros() as usize;
        bits &= !(1 << j);
        sign *= ins(j, u & !(1 << j));
        u ^= 1 << j;
    }
    debug_assert_eq!(u, y);
    sign
}

pub fn normalized_psi(t: &SubsetWeightTable) -> Vec<f64> {
    let s = t.z.sqrt();
    t.pf.iter().map(|x| x / s).collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Columns `xi_T = c_T Psi_hat` for every mask `T`.
#[derive(Clone, Debug)]
pub struct ExcitationBasis {
    pub n: usize,
    pub xi: DMatrix<f64>,
}

impl ExcitationBasis {
    pub fn new(t: &SubsetWeightTable) -> Self {
        let n = t.n;
        assert!(n <= MAX_BASIS_DIM, "basis dimension {n} too large");
        let size = 1usize << n;
        let mut xi = DMatrix::zeros(size, size);
        xi.set_column(0, &nalgebra::DVector::from_vec(normalized_psi(t)));
        for tm in 1..size {
            let i = tm.trailing_zeros() as usize;
            let prev: Vec<f64> = xi.column(tm & (tm - 1)).iter().cloned().collect();
            let col = apply_c(i, &prev);
            xi.set_column(tm, &nalgebra::DVector::from_vec(col));
        }
        ExcitationBasis { n, xi }
    }

    /// Largest entry of `Xi^T Xi - I`.
    pub fn gram_error(&self) -> f64 {
        let g = self.xi.transpose() * &self.xi;
        let size = g.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..size {
            for j in 0..size {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::SkewMatrix;

    #[test]
    fn block_excitations() {
        let a = 0.7;
        let t = SubsetWeightTable::new(&SkewMatrix::block_diagonal(2, &[a])).unwrap();
        let b = ExcitationBasis::new(&t);
        let r = (1.0 + a * a).sqrt();
        let col = |m: usize| -> Vec<f64> { b.xi.column(m).iter().cloned().collect() };
        let close = |x: Vec<f64>, y: [f64; 4]| x.iter().zip(y).all(|(p, q)| (p - q).abs() < 1e-14);
        assert!(close(col(0), [1.0 / r, 0.0, 0.0, a / r]));
        assert!(close(col(1), [0.0, 1.0 / r, a / r, 0.0]));
        assert!(close(col(2), [0.0, -a / r, 1.0 / r, 0.0]));
        assert!(close(col(3), [-a / r, 0.0, 0.0, 1.0 / r]));
        assert!(b.gram_error() < 1e-14);
    }

    #[test]
    fn anticommutation() {
        let x: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        for i in 0..4 {
            for j in 0..4 {
                let ij = apply_c(i, &apply_c(j, &x));
                let ji = apply_c(j, &apply_c(i, &x));
                for u in 0..16 {
                    let expect = if i == j { 2.0 * x[u] } else { 0.0 };
                    assert!((ij[u] + ji[u] - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn wedge_and_contract_are_adjoint() {
        let x: Vec<f64> = (0..32).map(|i| (i as f64 * 0.3).cos()).collect();
        let y: Vec<f64> = (0..32).map(|i| (i as f64 * 0.7).sin()).collect();
        let b = [0.3, -1.0, 0.2, 0.5, 2.0];
        assert!((dot(&wedge(&b, &x), &y) - dot(&x, &contract(&b, &y))).abs() < 1e-12);
        let mut e = vec![0.0; 32];
        e[0b00101] = 1.0;
        let c = apply_c(3, &apply_c(2, &e));
        // c_2 then c_3 on e_{0,2}: remove 2, then insert 3 past 0
        assert_eq!(c[0b01001], ins(2, 0b00001) * ins(3, 0b00001));
    }

    #[test]
    fn clifford_sign_matches_operators() {
        for y in 0u32..32 {
            for t in 0u32..32 {
                let mut e = vec![0.0; 32];
                e[(y ^ t) as usize] = 1.0;
                let mut v = e;
                for i in 0..5 {
                    // apply c_T with the largest index first
                    let j = 4 - i;
                    if t >> j & 1 == 1 {
                        v = apply_c(j, &v);
                    }
                }
                assert_eq!(v[y as usize], clifford_sign(y, t));
            }
        }
    }
}
