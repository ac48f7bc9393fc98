//! Cyclic Jacobi eigensolver for small symmetric matrices.
//!
//! Exact to working precision and slow (O(n³) per sweep); used as a reference
//! for the iterative norm and condition-number estimates.

use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`symmetric_eigenvalues`].
pub const JACOBI_MAX_DIM: usize = 64;

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::dims("symmetric_eigenvalues", a.shape(), (n, n)));
    }
    if n > JACOBI_MAX_DIM {
        return Err(Error::Domain(format!(
            "Jacobi eigensolver limited to dimension {JACOBI_MAX_DIM}, got {n}"
        )));
    }
    let mut m = a.clone();
    // Symmetrize so rotations see a consistent matrix.
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= f64::EPSILON * f64::EPSILON * 1e-4 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig = m.diag();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Singular values of `x` (descending) by one-sided Jacobi: plane rotations
/// of `xᵀx` applied implicitly to the columns of `x` until all column pairs
/// are orthogonal. Small singular values keep high relative accuracy.
pub fn singular_values(x: &DenseMatrix) -> Result<Vec<f64>> {
    let (l, k) = x.shape();
    if k > JACOBI_MAX_DIM {
        return Err(Error::Domain(format!(
            "Jacobi singular values limited to {JACOBI_MAX_DIM} columns, got {k}"
        )));
    }
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| x.column(j)).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (head, tail) = cols.split_at_mut(q);
                let (u, v) = (&mut head[p], &mut tail[0]);
                let alpha = dot(u, u);
                let beta = dot(v, v);
                let gamma = dot(u, v);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..l {
                    let (a, b) = (u[i], v[i]);
                    u[i] = c * a - s * b;
                    v[i] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
