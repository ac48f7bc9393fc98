//! Two-panel block classical Gram–Schmidt, with and without one
//! reorthogonalization pass.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::qr::thin_householder_qr;

/// Column partition `M = (M₁, M₂)` of a square `l × l` matrix, `l = m + n`.
#[derive(Debug, Clone)]
pub struct BlockPartition {
    m1: DenseMatrix,
    m2: DenseMatrix,
}

impl BlockPartition {
    pub fn new(m1: DenseMatrix, m2: DenseMatrix) -> Result<Self> {
        let l = m1.cols() + m2.cols();
        if m1.rows() != m2.rows() || m1.rows() != l {
            return Err(Error::dims(
                "BlockPartition (rows must equal m + n)",
                m1.shape(),
                m2.shape(),
            ));
        }
        Ok(BlockPartition { m1, m2 })
    }

    /// Splits `mat` after its first `m` columns.
    pub fn split(mat: &DenseMatrix, m: usize) -> Result<Self> {
        if !mat.is_square() || m > mat.cols() {
            return Err(Error::dims(
                "BlockPartition::split",
                mat.shape(),
                (mat.rows(), m),
            ));
        }
        let l = mat.rows();
        Self::new(mat.block(0, 0, l, m), mat.block(0, m, l, l - m))
    }

    pub fn m1(&self) -> &DenseMatrix {
        &self.m1
    }

    pub fn m2(&self) -> &DenseMatrix {
        &self.m2
    }

    pub fn m(&self) -> usize {
        self.m1.cols()
    }

    pub fn n(&self) -> usize {
        self.m2.cols()
    }

    pub fn l(&self) -> usize {
        self.m1.rows()
    }

    pub fn assembled(&self) -> DenseMatrix {
        self.m1
            .hstack(&self.m2)
            .expect("rows checked at construction")
    }
}

/// Intermediates of the reorthogonalization pass.
#[derive(Debug, Clone)]
pub struct ReorthDiagnostics {
    /// `Q₁ᵀM₂` from the first pass.
    pub s1: DenseMatrix,
    /// `Q₁ᵀQ₂` from the second pass.
    pub s2: DenseMatrix,
    /// Triangular factor of the first-pass panel `Y₁ = Q₂R₂`.
    pub r2_first: DenseMatrix,
    /// Triangular factor of the second-pass panel `Y₂ = Q₂⁽ⁿᵉʷ⁾R̄₂`.
    pub r2_bar: DenseMatrix,
    /// First-pass `Q₂`, before reorthogonalization.
    pub q2_first: DenseMatrix,
}

/// Block QR factors `Q = (Q₁, Q₂)`, `R = [[R₁, S], [0, R₂]]`.
#[derive(Debug, Clone)]
pub struct BlockQR {
    pub q1: DenseMatrix,
    pub q2: DenseMatrix,
    pub r1: DenseMatrix,
    pub s: DenseMatrix,
    pub r2: DenseMatrix,
    /// Present for [`bcgs2`] only.
    pub diagnostics: Option<ReorthDiagnostics>,
}

impl BlockQR {
    pub fn q(&self) -> DenseMatrix {
        self.q1.hstack(&self.q2).expect("panels share row count")
    }

    /// Assembled `l × l` triangular factor; the lower-left block is never
    /// written and stays exactly zero.
    pub fn r(&self) -> DenseMatrix {
        let (m, n) = (self.r1.rows(), self.r2.rows());
        let mut r = DenseMatrix::zeros(m + n, m + n);
        r.set_block(0, 0, &self.r1);
        r.set_block(0, m, &self.s);
        r.set_block(m, m, &self.r2);
        r
    }
}

/// `Y = X − Q·S` where `S = Qᵀ X`; returns `(S, Y)`.
fn project_out(q: &DenseMatrix, x: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let s = q.t_matmul(x)?;
    let y = x.sub(&q.matmul(&s)?)?;
    Ok((s, y))
}

/// Block classical Gram–Schmidt:
///
/// 1. `M₁ = Q₁R₁` (thin Householder)
/// 2. `S = Q₁ᵀM₂`, `Y = M₂ − Q₁S`
/// 3. `Y = Q₂R₂` (thin Householder)
pub fn bcgs(p: &BlockPartition) -> Result<BlockQR> {
    let first = thin_householder_qr(&p.m1).map_err(|e| e.at_step("first panel"))?;
    let (s, y) = project_out(&first.q, &p.m2)?;
    let second = thin_householder_qr(&y).map_err(|e| e.at_step("second panel"))?;
    Ok(BlockQR {
        q1: first.q,
        q2: second.q,
        r1: first.r,
        s,
        r2: second.r,
        diagnostics: None,
    })
}

/// Block classical Gram–Schmidt with one reorthogonalization pass:
///
/// 1. `M₁ = Q₁R₁`; `S₁ = Q₁ᵀM₂`; `Y₁ = M₂ − Q₁S₁`; `Y₁ = Q₂R₂`
/// 2. `S₂ = Q₁ᵀQ₂`; `Y₂ = Q₂ − Q₁S₂`; `Y₂ = Q₂⁽ⁿᵉʷ⁾R̄₂`
/// 3. `S⁽ⁿᵉʷ⁾ = S₁ + S₂R₂`, `R₂⁽ⁿᵉʷ⁾ = R̄₂R₂`
///
/// A non-positive diagonal in `R₂⁽ⁿᵉʷ⁾` (possible only through underflow) is
/// reported as [`Error::NonPositiveDiagonal`] rather than sign-corrected.
pub fn bcgs2(p: &BlockPartition) -> Result<BlockQR> {
    let first = thin_householder_qr(&p.m1).map_err(|e| e.at_step("first panel"))?;
    let q1 = first.q;
    let (s1, y1) = project_out(&q1, &p.m2)?;
    let second = thin_householder_qr(&y1).map_err(|e| e.at_step("second panel"))?;
    let (q2, r2) = (second.q, second.r);

    let (s2, y2) = project_out(&q1, &q2)?;
    let third = thin_householder_qr(&y2).map_err(|e| e.at_step("reorthogonalization panel"))?;
    let (q2_new, r2_bar) = (third.q, third.r);

    let s_new = s1.add(&s2.matmul(&r2)?)?;
    let r2_new = upper_product(&r2_bar, &r2);
    if let Some((index, &value)) = r2_new
        .diag()
        .iter()
        .enumerate()
        .find(|(_, &d)| d.is_nan() || d <= 0.0)
    {
        return Err(
            Error::NonPositiveDiagonal { index, value }.at_step("reorthogonalization panel")
        );
    }
    Ok(BlockQR {
        q1,
        q2: q2_new,
        r1: first.r,
        s: s_new,
        r2: r2_new,
        diagnostics: Some(ReorthDiagnostics {
            s1,
            s2,
            r2_first: r2,
            r2_bar,
            q2_first: q2,
        }),
    })
}

/// Product of two upper-triangular matrices, skipping structural zeros.
/// Accumulation runs over the inner index in ascending order.
fn upper_product(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    DenseMatrix::from_fn(n, n, |i, j| {
        if i > j {
            0.0
        } else {
            (i..=j).fold(0.0, |acc, k| acc + a[(i, k)] * b[(k, j)])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2_est;
    use crate::qr::{factor_residual_norm, orthogonality_defect};
    use crate::testgen::{matrix1, matrix2, random_orthogonal};

    const EPS: f64 = f64::EPSILON;

    fn saddle(m: usize, n: usize, s: f64, seed: u64) -> DenseMatrix {
        let a = matrix2(m, s, seed);
        let b = matrix1(m, n, s, seed).unwrap();
        let c = matrix2(n, s, seed);
        let top = a.hstack(&b).unwrap();
        let bottom = b.transpose().hstack(&c.scale(-1.0)).unwrap();
        top.vstack(&bottom).unwrap()
    }

    #[test]
    fn identity_input() {
        let p = BlockPartition::split(&DenseMatrix::identity(2), 1).unwrap();
        for f in [bcgs(&p).unwrap(), bcgs2(&p).unwrap()] {
            assert_eq!(f.q(), DenseMatrix::identity(2));
            assert_eq!(f.r(), DenseMatrix::identity(2));
        }
    }

    #[test]
    fn three_by_three_matches_full_householder() {
        let mat = DenseMatrix::from_rows(&[[2.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, -1.0]]);
        let p = BlockPartition::split(&mat, 2).unwrap();
        let full = thin_householder_qr(&mat).unwrap();
        let tol = 100.0 * EPS * norm2_est(&mat);
        for f in [bcgs(&p).unwrap(), bcgs2(&p).unwrap()] {
            let (q, r) = (f.q(), f.r());
            assert!(factor_residual_norm(&mat, &q, &r) <= tol);
            assert!(r.is_upper_triangular());
            assert!(r.diag().iter().all(|&d| d > 0.0));
            assert!(r.sub(&full.r).unwrap().max_abs() <= tol);
        }
    }

    #[test]
    fn orthogonal_second_panel_is_untouched() {
        let q = random_orthogonal(6, 4);
        let p = BlockPartition::split(&q, 3).unwrap();
        let f = bcgs(&p).unwrap();
        assert!(f.s.max_abs() <= 100.0 * EPS);
        assert!(f.r2.sub(&DenseMatrix::identity(3)).unwrap().max_abs() <= 100.0 * EPS);
    }

    #[test]
    fn algebraic_equivalence_when_well_conditioned() {
        for seed in 0..5 {
            let mat = saddle(6, 4, 1.0, seed);
            let p = BlockPartition::split(&mat, 6).unwrap();
            let a = bcgs(&p).unwrap();
            let b = bcgs2(&p).unwrap();
            let tol = 1e3 * EPS * norm2_est(&mat);
            assert!(a.r().sub(&b.r()).unwrap().max_abs() <= tol);
        }
    }

    #[test]
    fn reorthogonalization_identities() {
        let mat = saddle(8, 5, 3.0, 2);
        let p = BlockPartition::split(&mat, 8).unwrap();
        let f = bcgs2(&p).unwrap();
        let d = f.diagnostics.as_ref().unwrap();
        let s_new = d.s1.add(&d.s2.matmul(&d.r2_first).unwrap()).unwrap();
        assert_eq!(s_new, f.s);
        let r2_new = d.r2_bar.matmul(&d.r2_first).unwrap();
        assert!(r2_new.sub(&f.r2).unwrap().max_abs() <= 10.0 * EPS * norm2_est(&f.r2));
        assert!(f.r().is_upper_triangular());
        // M₂ = Q₁S₁ + Q₂R₂ for the first pass.
        let recon =
            f.q1.matmul(&d.s1)
                .unwrap()
                .add(&d.q2_first.matmul(&d.r2_first).unwrap())
                .unwrap();
        assert!(recon.sub(p.m2()).unwrap().max_abs() <= 1e3 * EPS * norm2_est(&mat));
    }

    #[test]
    fn lower_left_block_is_structurally_zero() {
        let mat = saddle(7, 3, 6.0, 1);
        let p = BlockPartition::split(&mat, 7).unwrap();
        for f in [bcgs(&p).unwrap(), bcgs2(&p).unwrap()] {
            let r = f.r();
            assert!(r.block(7, 0, 3, 7).as_slice().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn residual_bounded_for_both_algorithms() {
        let mat = saddle(30, 15, 8.0, 3);
        let p = BlockPartition::split(&mat, 30).unwrap();
        let l = 45.0;
        let mn = norm2_est(&mat);
        for f in [bcgs(&p).unwrap(), bcgs2(&p).unwrap()] {
            assert!(factor_residual_norm(&mat, &f.q(), &f.r()) <= 1e3 * EPS * l * mn);
        }
        let b2 = bcgs2(&p).unwrap();
        assert!(orthogonality_defect(&b2.q()) <= 1e3 * EPS * l);
    }

    #[test]
    fn rank_errors_name_the_step() {
        // Second panel equal to a column of the first leaves Y = 0.
        let mat = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 0.0]]);
        let p = BlockPartition::split(&mat, 1).unwrap();
        let err = bcgs(&p).unwrap_err();
        assert!(err.to_string().starts_with("second panel"), "{err}");
        assert!(err.is_singular());
        let err = bcgs2(&p).unwrap_err();
        assert!(err.to_string().starts_with("second panel"), "{err}");
    }

    #[test]
    fn partition_shape_checked() {
        assert!(BlockPartition::new(DenseMatrix::zeros(3, 1), DenseMatrix::zeros(3, 1)).is_err());
        assert!(BlockPartition::split(&DenseMatrix::zeros(3, 2), 1).is_err());
    }
}
