//! Thin Householder QR with a positive-diagonal `R`.

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2, DenseMatrix};
use crate::linalg::norm::{default_max_iter, norm2_est, spectral_norm, DEFAULT_TOL};

const EPS: f64 = f64::EPSILON;

/// Householder reflectors in compact form plus the raw triangular factor.
///
/// Reflector `j` is `H_j = I - β_j v_j v_jᵀ` acting on rows `j..l`. The
/// diagonal of [`HouseholderFactor::r`] carries the reflector signs, so it may
/// be negative; [`ThinQR`] applies the sign fix-up.
#[derive(Debug, Clone)]
pub struct HouseholderFactor {
    l: usize,
    k: usize,
    /// Column-major `l × k` work array: strictly-upper part of `R` above the
    /// diagonal, reflector vectors on and below it.
    packed: Vec<f64>,
    betas: Vec<f64>,
    diag: Vec<f64>,
}

impl HouseholderFactor {
    /// Factors `x` (`l × k`, `l ≥ k`). When `rank_tol` is set, a pivot column
    /// norm at or below it raises [`Error::RankDeficient`].
    pub fn new(x: &DenseMatrix, rank_tol: Option<f64>) -> Result<Self> {
        let (l, k) = x.shape();
        if l < k {
            return Err(Error::dims(
                "thin_householder_qr (needs rows >= cols)",
                x.shape(),
                (k, k),
            ));
        }
        let mut packed = x.transpose().into_vec();
        let mut betas = Vec::with_capacity(k);
        let mut diag = Vec::with_capacity(k);
        for j in 0..k {
            let (done, rest) = packed.split_at_mut((j + 1) * l);
            let v = &mut done[j * l + j..];
            let norm = norm2(v);
            if let Some(tol) = rank_tol {
                if norm.is_nan() || norm <= tol {
                    return Err(Error::RankDeficient { column: j });
                }
            }
            let x0 = v[0];
            let sign = if x0 >= 0.0 { 1.0 } else { -1.0 };
            v[0] = x0 + sign * norm;
            let vtv = dot(v, v);
            let beta = if vtv == 0.0 { 0.0 } else { 2.0 / vtv };
            let v: &[f64] = v;
            for c in 0..k - j - 1 {
                let col = &mut rest[c * l + j..(c + 1) * l];
                let s = beta * dot(v, col);
                for (ci, &vi) in col.iter_mut().zip(v) {
                    *ci -= s * vi;
                }
            }
            betas.push(beta);
            diag.push(-sign * norm);
        }
        Ok(HouseholderFactor {
            l,
            k,
            packed,
            betas,
            diag,
        })
    }

    pub fn rows(&self) -> usize {
        self.l
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    fn reflector(&self, j: usize) -> &[f64] {
        &self.packed[j * self.l + j..(j + 1) * self.l]
    }

    fn reflect(&self, j: usize, y: &mut [f64]) {
        let v = self.reflector(j);
        let seg = &mut y[j..];
        let s = self.betas[j] * dot(v, seg);
        for (yi, &vi) in seg.iter_mut().zip(v) {
            *yi -= s * vi;
        }
    }

    /// `y ← Qᵀ y` with the full `l × l` orthogonal factor.
    pub fn apply_qt(&self, y: &mut [f64]) {
        assert_eq!(y.len(), self.l);
        for j in 0..self.k {
            self.reflect(j, y);
        }
    }

    /// `y ← Q y` with the full `l × l` orthogonal factor.
    pub fn apply_q(&self, y: &mut [f64]) {
        assert_eq!(y.len(), self.l);
        for j in (0..self.k).rev() {
            self.reflect(j, y);
        }
    }

    /// Raw `k × k` triangular factor (reflector sign convention).
    pub fn r(&self) -> DenseMatrix {
        let (l, k) = (self.l, self.k);
        DenseMatrix::from_fn(k, k, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => self.packed[j * l + i],
            std::cmp::Ordering::Equal => self.diag[i],
            std::cmp::Ordering::Greater => 0.0,
        })
    }

    /// Explicit thin `l × k` orthogonal factor, accumulated backwards onto the
    /// first `k` columns of the identity.
    pub fn thin_q(&self) -> DenseMatrix {
        let (l, k) = (self.l, self.k);
        let mut cols = vec![0.0; l * k];
        for c in 0..k {
            cols[c * l + c] = 1.0;
        }
        for j in (0..k).rev() {
            // Columns c < j are still e_c, which H_j leaves alone.
            for c in j..k {
                let col = &mut cols[c * l..(c + 1) * l];
                self.reflect(j, col);
            }
        }
        let mut q = DenseMatrix::zeros(l, k);
        for c in 0..k {
            for i in 0..l {
                q[(i, c)] = cols[c * l + i];
            }
        }
        q
    }

    /// Smallest `|r_ii|`.
    pub fn min_abs_diag(&self) -> f64 {
        self.diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()))
    }
}

/// Thin QR factors: `Q` is `l × k` with orthonormal columns, `R` is `k × k`
/// upper triangular with a positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinQR {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Rank threshold `ε·√l·‖X‖`, with `‖X‖` taken as the largest column norm.
pub fn rank_tolerance(x: &DenseMatrix) -> f64 {
    EPS * (x.rows() as f64).sqrt() * x.max_column_norm()
}

/// Thin Householder QR of an `l × k` matrix with `l ≥ k`.
///
/// Errors with [`Error::RankDeficient`] when a pivot column norm falls to the
/// rank threshold (see [`rank_tolerance`]).
pub fn thin_householder_qr(x: &DenseMatrix) -> Result<ThinQR> {
    let factor = HouseholderFactor::new(x, Some(rank_tolerance(x)))?;
    let mut q = factor.thin_q();
    let mut r = factor.r();
    fix_signs(&mut q, &mut r);
    Ok(ThinQR { q, r })
}

/// Negates row `i` of `R` and column `i` of `Q` wherever `r_ii < 0`.
fn fix_signs(q: &mut DenseMatrix, r: &mut DenseMatrix) {
    let k = r.rows();
    let flip: Vec<bool> = (0..k).map(|i| r[(i, i)] < 0.0).collect();
    for (i, _) in flip.iter().enumerate().filter(|(_, &f)| f) {
        r.row_mut(i).iter_mut().for_each(|v| *v = -*v);
    }
    for row in 0..q.rows() {
        for (v, &f) in q.row_mut(row).iter_mut().zip(&flip) {
            if f {
                *v = -*v;
            }
        }
    }
}

/// Orthogonality and decomposition errors in units of machine epsilon:
/// `orth = ‖I − QᵀQ‖/ε`, `dec = ‖X − QR‖/(ε‖X‖)`.
pub fn qr_residuals(x: &DenseMatrix, f: &ThinQR) -> Result<(f64, f64)> {
    if f.q.rows() != x.rows() || f.q.cols() != f.r.rows() || f.r.cols() != x.cols() {
        return Err(Error::dims(
            "qr_residuals",
            x.shape(),
            (f.q.rows(), f.r.cols()),
        ));
    }
    let orth = orthogonality_defect(&f.q) / EPS;
    let xn = norm2_est(x);
    let resid = factor_residual_norm(x, &f.q, &f.r);
    let dec = if xn == 0.0 { 0.0 } else { resid / (EPS * xn) };
    Ok((orth, dec))
}

/// `I − QᵀQ`, formed explicitly.
pub fn gram_defect(q: &DenseMatrix) -> DenseMatrix {
    let mut g = q.t_matmul(q).expect("QᵀQ is always conformable");
    for v in g.as_mut_slice().iter_mut() {
        *v = -*v;
    }
    let k = g.cols();
    for i in 0..k {
        g.as_mut_slice()[i * k + i] += 1.0;
    }
    g
}

/// `‖I − QᵀQ‖₂`, estimated.
pub fn orthogonality_defect(q: &DenseMatrix) -> f64 {
    spectral_norm(&gram_defect(q), DEFAULT_TOL, default_max_iter(q.cols())).value
}

/// `‖X − QR‖₂`, estimated. Panics if the shapes do not conform.
pub fn factor_residual_norm(x: &DenseMatrix, q: &DenseMatrix, r: &DenseMatrix) -> f64 {
    let e = q
        .matmul(r)
        .and_then(|qr| x.sub(&qr))
        .expect("X, Q and R must conform");
    spectral_norm(&e, DEFAULT_TOL, default_max_iter(x.cols())).value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let d = a.sub(b).unwrap().max_abs();
        assert!(d <= tol, "max diff {d:e} > {tol:e}\n{a:?}\n{b:?}");
    }

    fn test_matrix(l: usize, k: usize, seed: u64) -> DenseMatrix {
        let mut s = seed;
        DenseMatrix::from_fn(l, k, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
    }

    /// Q by applying H_0, H_1, ... from the right to the full identity.
    fn q_by_right_application(f: &HouseholderFactor) -> DenseMatrix {
        let (l, k) = (f.rows(), f.cols());
        let mut full = DenseMatrix::identity(l);
        for j in 0..k {
            let v = f.reflector(j);
            for i in 0..l {
                let row = &mut full.row_mut(i)[j..];
                let s = f.betas[j] * dot(row, v);
                for (x, &vi) in row.iter_mut().zip(v) {
                    *x -= s * vi;
                }
            }
        }
        full.leading_columns(k)
    }

    #[test]
    fn diagonal_input() {
        let x = DenseMatrix::diagonal(&[3.0, 4.0]);
        let f = thin_householder_qr(&x).unwrap();
        assert_close(&f.q, &DenseMatrix::identity(2), 0.0);
        assert_close(&f.r, &x, 0.0);
    }

    #[test]
    fn single_column() {
        let x = DenseMatrix::from_rows(&[[3.0], [4.0]]);
        let f = thin_householder_qr(&x).unwrap();
        assert_close(&f.q, &DenseMatrix::from_rows(&[[0.6], [0.8]]), 4.0 * EPS);
        assert_close(&f.r, &DenseMatrix::from_rows(&[[5.0]]), 8.0 * EPS);
    }

    #[test]
    fn permutation_forced_by_positive_diagonal() {
        let x = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let f = thin_householder_qr(&x).unwrap();
        assert_close(&f.q, &x, 2.0 * EPS);
        assert_close(&f.r, &DenseMatrix::identity(2), 2.0 * EPS);
    }

    #[test]
    fn r_structure() {
        let x = test_matrix(9, 5, 3);
        let f = thin_householder_qr(&x).unwrap();
        assert!(f.r.is_upper_triangular());
        assert!(f.r.diag().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn rejects_wide_and_rank_deficient() {
        assert!(matches!(
            thin_householder_qr(&DenseMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]);
        assert!(matches!(
            thin_householder_qr(&x),
            Err(Error::RankDeficient { column: 1 })
        ));
    }

    #[test]
    fn identity_residuals_vanish() {
        let f = ThinQR {
            q: DenseMatrix::identity(4),
            r: DenseMatrix::identity(4),
        };
        let (orth, dec) = qr_residuals(&DenseMatrix::identity(4), &f).unwrap();
        assert_eq!((orth, dec), (0.0, 0.0));
    }

    #[test]
    fn scaled_column_orth_defect() {
        // (1+η)² − 1 ≈ 2η on the first diagonal entry.
        let eta = 1e-8;
        let mut q = DenseMatrix::identity(3);
        q[(0, 0)] = 1.0 + eta;
        let f = ThinQR {
            q,
            r: DenseMatrix::identity(3),
        };
        let (orth, _) = qr_residuals(&DenseMatrix::identity(3), &f).unwrap();
        let expected = 2.0 * eta / EPS;
        assert!(orth > expected / 2.0 && orth < expected * 2.0, "{orth:e}");
    }

    #[test]
    fn random_factorization_contract() {
        let x = test_matrix(50, 20, 17);
        let f = thin_householder_qr(&x).unwrap();
        let (orth, dec) = qr_residuals(&x, &f).unwrap();
        assert!(orth <= 100.0 && dec <= 100.0, "orth {orth} dec {dec}");
    }

    #[test]
    fn two_accumulation_paths_agree() {
        for (l, k, seed) in [(7, 7, 1), (12, 5, 2), (30, 11, 3)] {
            let x = test_matrix(l, k, seed);
            let f = HouseholderFactor::new(&x, None).unwrap();
            let backward = f.thin_q();
            let forward = q_by_right_application(&f);
            assert_close(&backward, &forward, 100.0 * EPS * norm2_est(&x).max(1.0));
        }
    }

    #[test]
    fn orthonormal_input_gives_identity_r() {
        let x = test_matrix(20, 6, 99);
        let q = thin_householder_qr(&x).unwrap().q;
        let again = thin_householder_qr(&q).unwrap();
        assert_close(&again.r, &DenseMatrix::identity(6), 100.0 * EPS * 6.0);
    }

    #[test]
    fn apply_q_inverts_apply_qt() {
        let x = test_matrix(8, 8, 5);
        let f = HouseholderFactor::new(&x, None).unwrap();
        let y0: Vec<f64> = (0..8).map(|i| i as f64 - 3.0).collect();
        let mut y = y0.clone();
        f.apply_qt(&mut y);
        f.apply_q(&mut y);
        for (a, b) in y.iter().zip(&y0) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
