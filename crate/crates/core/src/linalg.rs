//! Small dense helpers on fixed-size arrays, generic over [`Scalar`].

use crate::autodiff::Scalar;
use crate::error::{GeomError, Result};

pub type Mat<S, const D: usize> = [[S; D]; D];

/// Gauss–Jordan inverse with partial pivoting on the real parts.
pub fn inverse<S: Scalar, const D: usize>(a: &Mat<S, D>) -> Result<Mat<S, D>> {
    let mut m = *a;
    let mut inv: Mat<S, D> =
        std::array::from_fn(|i| std::array::from_fn(|j| S::cst(if i == j { 1.0 } else { 0.0 })));
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|x| x.re().abs()))
        .fold(0.0, f64::max);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(GeomError::Singular("zero or non-finite matrix".into()));
    }
    for col in 0..D {
        let piv = (col..D)
            .max_by(|&i, &j| m[i][col].re().abs().total_cmp(&m[j][col].re().abs()))
            .unwrap();
        if m[piv][col].re().abs() <= 1e-14 * scale {
            return Err(GeomError::Singular(format!("pivot {col} vanishes")));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].recip();
        for j in 0..D {
            m[col][j] = m[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for i in 0..D {
            if i != col {
                let f = m[i][col];
                for j in 0..D {
                    m[i][j] = m[i][j] - f * m[col][j];
                    inv[i][j] = inv[i][j] - f * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

pub fn det<const D: usize>(a: &Mat<f64, D>) -> f64 {
    let mut m = *a;
    let mut d = 1.0;
    for col in 0..D {
        let piv = (col..D)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            d = -d;
        }
        d *= m[col][col];
        for i in col + 1..D {
            let f = m[i][col] / m[col][col];
            for j in col..D {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    d
}

/// Real parts of a matrix of scalars.
pub fn re<S: Scalar, const D: usize>(a: &Mat<S, D>) -> Mat<f64, D> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].re()))
}

pub fn quad_form<const D: usize>(g: &Mat<f64, D>, u: &[f64; D], v: &[f64; D]) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        for j in 0..D {
            s += g[i][j] * u[i] * v[j];
        }
    }
    s
}

pub fn mat_vec<const D: usize>(g: &Mat<f64, D>, v: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| (0..D).map(|j| g[i][j] * v[j]).sum())
}

/// Signs of the eigenvalues of a symmetric matrix: (negative, zero, positive).
pub fn signature(a: &[Vec<f64>]) -> (usize, usize, usize) {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (a[i][j] + a[j][i]));
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut out = (0, 0, 0);
    for &l in eig.eigenvalues.iter() {
        if l.abs() <= 1e-12 * scale {
            out.1 += 1;
        } else if l < 0.0 {
            out.0 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let p: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((p - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_rejected() {
        let a = [[1.0, 2.0], [2.0, 4.0]];
        assert!(inverse(&a).is_err());
        assert_eq!(det(&a), 0.0);
    }

    #[test]
    fn lorentzian_signature() {
        let g = vec![
            vec![-0.3, 0.0, 0.0],
            vec![0.0, 9.0, 0.0],
            vec![0.0, 0.0, 4.0],
        ];
        assert_eq!(signature(&g), (1, 0, 2));
    }
}
