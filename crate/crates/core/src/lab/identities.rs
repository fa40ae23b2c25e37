//! Numerical checks of the operator identities behind the spectral gap bound.

use nalgebra::{DMatrix, SymmetricEigen};

use super::exterior::{apply_c, clifford_sign, contract, dot, norm, wedge, ExcitationBasis};
use super::{ExactKernel, LabError, SkewMatrix, SubsetWeightTable};

fn even_masks(n: usize) -> Vec<u32> {
    (0..1u32 << n).filter(|m| m.count_ones() % 2 == 0).collect()
}

fn odd_masks(n: usize) -> Vec<u32> {
    (0..1u32 << n).filter(|m| m.count_ones() % 2 == 1).collect()
}

/// `P_A = (1/n) sum_Y Proj(Phi_Y)` on the even subspace, in the standard basis.
fn pa_standard(t: &SubsetWeightTable, even: &[u32], pos: &[usize]) -> DMatrix<f64> {
    let n = t.n;
    let k = even.len();
    let mut p = DMatrix::zeros(k, k);
    for y in odd_masks(n) {
        let phi: Vec<(usize, f64)> =
            (0..n).map(|i| y ^ (1 << i)).map(|s| (pos[s as usize], t.pf[s as usize])).collect();
        let nrm2: f64 = phi.iter().map(|x| x.1 * x.1).sum();
        if nrm2 <= 0.0 {
            continue;
        }
        for &(a, pa) in &phi {
            for &(b, pb) in &phi {
                p[(a, b)] += pa * pb / (nrm2 * n as f64);
            }
        }
    }
    p
}

/// Minimum eigenvalue of `I - N_A/n - P_A` on the even subspace.
pub fn number_domination_min_eig(t: &SubsetWeightTable, basis: &ExcitationBasis) -> f64 {
    let n = t.n;
    let even = even_masks(n);
    let mut pos = vec![usize::MAX; 1 << n];
    for (i, &m) in even.iter().enumerate() {
        pos[m as usize] = i;
    }
    let k = even.len();
    let xi = DMatrix::from_fn(k, k, |r, c| basis.xi[(even[r] as usize, even[c] as usize)]);
    let p = pa_standard(t, &even, &pos);
    let pt = xi.transpose() * p * &xi;
    let mut m = -pt;
    for (c, &tm) in even.iter().enumerate() {
        m[(c, c)] += 1.0 - tm.count_ones() as f64 / n as f64;
    }
    let m = (&m + m.transpose()) * 0.5;
    SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `|<f, P f>_mu - <h_f, P_A h_f> / Z|` for `f` given on the kernel states.
pub fn sqrt_representation_error(t: &SubsetWeightTable, k: &ExactKernel, f: &[f64]) -> f64 {
    let n = t.n;
    let pf_vec = &k.p * nalgebra::DVector::from_column_slice(f);
    let lhs: f64 = (0..f.len()).map(|s| k.mu[s] * f[s] * pf_vec[s]).sum();
    let mut h = vec![0.0; 1 << n];
    for (s, &m) in k.states.iter().enumerate() {
        h[m as usize] = f[s] * t.pf[m as usize];
    }
    let mut rhs = 0.0;
    for y in odd_masks(n) {
        let mut ip = 0.0;
        let mut nrm2 = 0.0;
        for i in 0..n {
            let s = (y ^ (1 << i)) as usize;
            ip += t.pf[s] * h[s];
            nrm2 += t.pf[s] * t.pf[s];
        }
        if nrm2 > 0.0 {
            rhs += ip * ip / nrm2;
        }
    }
    rhs /= n as f64 * t.z;
    (lhs - rhs).abs()
}

#[derive(Clone, Debug, Default)]
pub struct RowIsotropyReport {
    /// Largest `||eps_{beta_Y} R_Y||`.
    pub wedge: f64,
    /// Largest `|C(Y) - Z ||beta_Y||^2|`.
    pub star_weight: f64,
}

pub fn row_isotropy(t: &SubsetWeightTable, basis: &ExcitationBasis) -> RowIsotropyReport {
    let n = t.n;
    let mut rep = RowIsotropyReport::default();
    for y in odd_masks(n) {
        let mut r = vec![0.0; 1 << n];
        for tm in odd_masks(n) {
            r[tm as usize] = basis.xi[(y as usize, tm as usize)];
        }
        let beta: Vec<f64> = (0..n).map(|i| r[1 << i]).collect();
        rep.wedge = rep.wedge.max(norm(&wedge(&beta, &r)));
        let b2: f64 = beta.iter().map(|b| b * b).sum();
        rep.star_weight = rep.star_weight.max((t.star_weight(y) - t.z * b2).abs());
    }
    rep
}

/// Largest overlapping-Pfaffian sum over odd `Y` and nonempty even `R`.
pub fn overlapping_pfaffian_max(t: &SubsetWeightTable) -> f64 {
    let n = t.n;
    let mut worst: f64 = 0.0;
    for y in odd_masks(n) {
        for r in even_masks(n).into_iter().skip(1) {
            let mut total = 0.0;
            let mut bits = r;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let rest = r & !(1 << i);
                let sigma = super::exterior::ins(i, rest) * clifford_sign(y, 1 << i) * clifford_sign(y, rest);
                total += sigma * t.pf[(y ^ (1 << i)) as usize] * t.pf[(y ^ rest) as usize];
            }
            worst = worst.max(total.abs());
        }
    }
    worst
}

/// `|| iota_h Psi_B - eps_{-Bh} Psi_B ||_inf`.
pub fn deletion_identity_error(b: &SkewMatrix, h: &[f64]) -> Result<f64, LabError> {
    let t = SubsetWeightTable::new(b)?;
    let n = b.dim();
    let bh: Vec<f64> = (0..n).map(|j| -(0..n).map(|k| b.get(j, k) * h[k]).sum::<f64>()).collect();
    let lhs = contract(h, &t.pf);
    let rhs = wedge(&bh, &t.pf);
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Drop bit `i` from a mask, shifting higher bits down.
pub fn remove_coordinate(mask: u32, i: usize) -> u32 {
    let low = mask & ((1 << i) - 1);
    let high = (mask >> (i + 1)) << i;
    low | high
}

#[derive(Clone, Debug)]
pub struct ConditionedVectors {
    pub psi0: Vec<f64>,
    pub psi1: Vec<f64>,
    /// Least-squares `b` with `psi1 ~ c_b psi0`, indexed by the remaining coordinates.
    pub b: Vec<f64>,
    pub residual: f64,
}

/// Conditioned vectors at coordinate `i` and the unit `b` relating them.
pub fn conditioned_vectors(a: &SkewMatrix, i: usize) -> Result<ConditionedVectors, LabError> {
    let n = a.dim();
    let t = SubsetWeightTable::new(a)?;
    let w: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let tb = SubsetWeightTable::new(&a.principal(&w))?;
    let size = 1usize << (n - 1);
    let nb = norm(&tb.pf);
    let psi0: Vec<f64> = tb.pf.iter().map(|x| x / nb).collect();
    let mut unit = vec![0.0; n];
    unit[i] = 1.0;
    let deleted = contract(&unit, &t.pf);
    let mut psi1 = vec![0.0; size];
    for u in 0..1u32 << n {
        if u >> i & 1 == 0 {
            psi1[remove_coordinate(u, i) as usize] = deleted[u as usize];
        }
    }
    let n1 = norm(&psi1);
    if n1 == 0.0 {
        return Err(LabError::InvariantViolation(format!("coordinate {i} is never occupied")));
    }
    psi1.iter_mut().for_each(|x| *x /= n1);
    let cols: Vec<Vec<f64>> = (0..n - 1).map(|j| apply_c(j, &psi0)).collect();
    let g = DMatrix::from_fn(size, n - 1, |r, c| cols[c][r]);
    let rhs = nalgebra::DVector::from_column_slice(&psi1);
    let b = g
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| LabError::InvariantViolation(e.to_string()))?;
    let residual = (g * &b - rhs).norm();
    Ok(ConditionedVectors { psi0, psi1, b: b.iter().cloned().collect(), residual })
}

/// Orthonormality defect of `{c_j psi0}`.
pub fn clifford_frame_error(psi0: &[f64], k: usize) -> f64 {
    let cols: Vec<Vec<f64>> = (0..k).map(|j| apply_c(j, psi0)).collect();
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in 0..k {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot(&cols[a], &cols[b]) - target).abs());
        }
    }
    worst
}
