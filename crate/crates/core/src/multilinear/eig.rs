//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{Error, Result};
use crate::multilinear::FlatMatrix;

const MAX_SWEEPS: usize = 100;
const OFF_TOL: f64 = 1e-10;
const SYM_TOL: f64 = 1e-12;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, eigenvectors) with `vectors[i]` the unit eigenvector
/// of `values[i]`, in no particular order. Convergence requires the
/// off-diagonal Frobenius norm to fall below 1e-10 relative to the matrix
/// scale within 100 sweeps.
pub fn jacobi_eigen(m: &FlatMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let scale = m.max_abs().max(1.0);
    let defect = m.symmetry_defect();
    if defect > SYM_TOL * scale {
        return Err(Error::NotSymmetric(defect));
    }
    let n = m.dim();
    // work on the symmetrized copy
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m.get(i, j) + m.get(j, i));
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frobenius: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    s += a[p * n + q] * a[p * n + q];
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= OFF_TOL * frobenius {
            let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            let vectors: Vec<Vec<f64>> = (0..n)
                .map(|col| (0..n).map(|row| v[row * n + col]).collect())
                .collect();
            return Ok((values, vectors));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e12 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = aip - s * (aiq + tau * aip);
                        a[i * n + q] = aiq + s * (aip - tau * aiq);
                        a[p * n + i] = a[i * n + p];
                        a[q * n + i] = a[i * n + q];
                    }
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip - s * (viq + tau * vip);
                    v[i * n + q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

/// Eigenvalues sorted by descending absolute value, with multiplicity.
pub fn symmetric_eigs(m: &FlatMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi_eigen(m)?;
    values.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
    Ok(values)
}
