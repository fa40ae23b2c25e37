//! `det(I + A diag(z))`, nonvanishing on the right half-plane.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SkewMatrix;

pub fn hurwitz_det(a: &SkewMatrix, z: &[Complex64]) -> Complex64 {
    let n = a.dim();
    assert_eq!(z.len(), n);
    let m = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        id + z[j] * a.get(i, j)
    });
    m.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::SubsetWeightTable;
    use crate::rng::WalkRng;

    #[test]
    fn value_at_one_is_partition_function() {
        let mut rng = WalkRng::from_seed(30);
        for n in 1..8 {
            let a = SkewMatrix::random(n, &mut rng);
            let z = vec![Complex64::new(1.0, 0.0); n];
            let d = hurwitz_det(&a, &z);
            let t = SubsetWeightTable::new(&a).unwrap();
            assert!((d.re - t.z).abs() < 1e-9 * t.z && d.im.abs() < 1e-9);
        }
    }

    #[test]
    fn nonzero_in_right_half_plane() {
        let mut rng = WalkRng::from_seed(31);
        for n in 1..7 {
            let a = SkewMatrix::random(n, &mut rng);
            for _ in 0..50 {
                let z: Vec<Complex64> =
                    (0..n).map(|_| Complex64::new(rng.uniform(1e-3, 3.0), rng.uniform(-3.0, 3.0))).collect();
                assert!(hurwitz_det(&a, &z).norm() > 0.0);
            }
        }
    }
}
