use super::matrix::DenseMatrix;
use super::norm::norm2_est;
use crate::error::{Error, Result};

/// Outcome of a Cholesky factorization attempt.
#[derive(Debug, Clone, PartialEq)]
pub enum Cholesky {
    /// `A = L Lᵀ` with `L` lower triangular, positive diagonal.
    Factor {
        l: DenseMatrix,
        /// Smallest pivot `a_jj - Σ l_jk²` seen before taking square roots.
        min_pivot: f64,
    },
    /// Pivot `index` (zero-based) was not positive.
    NotPositiveDefinite { index: usize, pivot: f64 },
}

impl Cholesky {
    pub fn is_factor(&self) -> bool {
        matches!(self, Cholesky::Factor { .. })
    }

    pub fn factor(&self) -> Option<&DenseMatrix> {
        match self {
            Cholesky::Factor { l, .. } => Some(l),
            Cholesky::NotPositiveDefinite { .. } => None,
        }
    }

    /// Minimum pivot on success, the failing pivot otherwise.
    pub fn pivot_diagnostic(&self) -> f64 {
        match *self {
            Cholesky::Factor { min_pivot, .. } => min_pivot,
            Cholesky::NotPositiveDefinite { pivot, .. } => pivot,
        }
    }
}

/// Cholesky factorization used as an SPD certificate.
///
/// A non-positive pivot is a regular outcome, not an error; errors are
/// reserved for a non-square or non-symmetric input.
pub fn cholesky(a: &DenseMatrix) -> Result<Cholesky> {
    let n = a.rows();
    let asym = a
        .asymmetry()
        .ok_or_else(|| Error::dims("cholesky", a.shape(), (a.cols(), a.cols())))?;
    if asym > 10.0 * f64::EPSILON * norm2_est(a) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let mut l = DenseMatrix::zeros(n, n);
    let mut min_pivot = f64::INFINITY;
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= 0.0 {
            return Ok(Cholesky::NotPositiveDefinite { index: j, pivot: d });
        }
        min_pivot = min_pivot.min(d);
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(Cholesky::Factor { l, min_pivot })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let c = cholesky(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(c.factor().unwrap(), &DenseMatrix::identity(3));
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_rows(&[[4.0, 2.0], [2.0, 2.0]]);
        let c = cholesky(&a).unwrap();
        assert_eq!(
            c.factor().unwrap(),
            &DenseMatrix::from_rows(&[[2.0, 0.0], [1.0, 1.0]])
        );
    }

    #[test]
    fn indefinite_fails_at_second_pivot() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]);
        match cholesky(&a).unwrap() {
            Cholesky::NotPositiveDefinite { index, pivot } => {
                assert_eq!(index, 1);
                assert_eq!(pivot, -3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(cholesky(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn reconstruction_residual() {
        let a = DenseMatrix::from_fn(6, 6, |i, j| {
            1.0 / (i + j + 1) as f64 + if i == j { 1.0 } else { 0.0 }
        });
        let l = cholesky(&a).unwrap().factor().unwrap().clone();
        let llt = l.matmul(&l.transpose()).unwrap();
        let resid = norm2_est(&a.sub(&llt).unwrap());
        assert!(resid <= 100.0 * f64::EPSILON * norm2_est(&a));
    }
}
