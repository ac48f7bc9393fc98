use super::matrix::DenseMatrix;
use super::norm::{
    default_max_iter, spectral_norm, spectral_norm_op, LinearOperator, NormEstimate,
};
use super::triangular::{solve_upper_in_place, solve_upper_transpose_in_place};
use crate::error::{Error, Result};
use crate::qr::HouseholderFactor;

/// A triangular pivot at or below `SINGULAR_PIVOT_RTOL · ‖M‖` marks `M` as
/// singular to working precision (κ beyond roughly `1/ε²`).
pub const SINGULAR_PIVOT_RTOL: f64 = f64::EPSILON * f64::EPSILON;

/// `M⁻¹` (square) or the pseudo-inverse `R⁻¹Qᵀ` (tall) applied through a
/// Householder factorization.
pub struct QrInverse<'a> {
    factor: &'a HouseholderFactor,
    r: DenseMatrix,
}

impl<'a> QrInverse<'a> {
    pub fn new(factor: &'a HouseholderFactor) -> Self {
        QrInverse {
            r: factor.r(),
            factor,
        }
    }
}

impl LinearOperator for QrInverse<'_> {
    fn nrows(&self) -> usize {
        self.factor.cols()
    }
    fn ncols(&self) -> usize {
        self.factor.rows()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        self.factor.apply_qt(&mut y);
        y.truncate(self.factor.cols());
        if solve_upper_in_place(&self.r, &mut y).is_err() {
            y.fill(f64::INFINITY);
        }
        y
    }
    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        if solve_upper_transpose_in_place(&self.r, &mut y).is_err() {
            y.fill(f64::INFINITY);
            return vec![f64::INFINITY; self.factor.rows()];
        }
        y.resize(self.factor.rows(), 0.0);
        self.factor.apply_q(&mut y);
        y
    }
}

/// Estimates `κ₂(M) = σ_max/σ_min`.
///
/// `σ_max` comes from power iteration on `MᵀM`; `σ_min` from power iteration
/// on `M⁻ᵀM⁻¹` applied through a Householder factorization of `M`. Tall
/// full-column-rank matrices are accepted and use the pseudo-inverse.
pub fn condition_number(m: &DenseMatrix, tol: f64) -> Result<NormEstimate> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::dims("condition_number", m.shape(), (cols, cols)));
    }
    let max_iter = default_max_iter(cols);
    let top = spectral_norm(m, tol, max_iter);
    if top.value == 0.0 {
        return Err(Error::Singular);
    }
    let factor = HouseholderFactor::new(m, None)?;
    if factor.min_abs_diag() <= SINGULAR_PIVOT_RTOL * top.value {
        return Err(Error::Singular);
    }
    let inv = QrInverse::new(&factor);
    let bottom = spectral_norm_op(&inv, tol, max_iter);
    let kappa = top.value * bottom.value;
    if !kappa.is_finite() {
        return Err(Error::Singular);
    }
    Ok(NormEstimate {
        value: kappa,
        iterations: top.iterations + bottom.iterations,
        converged: top.converged && bottom.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::symmetric_eigenvalues;

    #[test]
    fn identity_is_perfectly_conditioned() {
        let k = condition_number(&DenseMatrix::identity(5), 1e-8).unwrap();
        assert!((k.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_ratio() {
        let k = condition_number(&DenseMatrix::diagonal(&[1.0, 1e-3]), 1e-10).unwrap();
        assert!((k.value / 1e3 - 1.0).abs() < 1e-6);
        let d = [3.0, -0.5, 7.0, 0.02, 1.0];
        let k = condition_number(&DenseMatrix::diagonal(&d), 1e-10).unwrap();
        assert!((k.value / 350.0 - 1.0).abs() < 1e-6, "{k:?}");
    }

    #[test]
    fn hilbert4_against_exact_eigenvalues() {
        let h = DenseMatrix::from_fn(4, 4, |i, j| 1.0 / (i + j + 1) as f64);
        let eig = symmetric_eigenvalues(&h).unwrap();
        let exact = eig[3] / eig[0];
        assert!((exact / 1.5514e4 - 1.0).abs() < 1e-3, "{exact}");
        let est = condition_number(&h, 1e-10).unwrap();
        assert!((est.value / exact - 1.0).abs() < 1e-3, "{est:?} vs {exact}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = DenseMatrix::diagonal(&[1.0, 1.0, 0.0]);
        assert!(matches!(condition_number(&m, 1e-8), Err(Error::Singular)));
        assert!(matches!(
            condition_number(&DenseMatrix::zeros(2, 2), 1e-8),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn tall_matrix_uses_pseudo_inverse() {
        let x = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 0.5], [0.0, 0.0]]);
        let k = condition_number(&x, 1e-10).unwrap();
        assert!((k.value - 4.0).abs() < 1e-8);
    }
}
