use super::matrix::{DenseMatrix, Vector};
use crate::error::{Error, Result};

/// Solves `R z = g` for upper-triangular `R`.
///
/// Row `i` accumulates `Σ r_ij z_j` over `j` descending from the last column,
/// then divides by `r_ii`. Entries below the diagonal are ignored.
pub fn back_substitute(r: &DenseMatrix, g: &Vector) -> Result<Vector> {
    check_square_rhs("back_substitute", r, g.len())?;
    let mut z = g.as_slice().to_vec();
    solve_upper_in_place(r, &mut z)?;
    Ok(Vector::from(z))
}

/// In-place `R z = b`; `b` is overwritten with `z`.
pub fn solve_upper_in_place(r: &DenseMatrix, b: &mut [f64]) -> Result<()> {
    let n = r.rows();
    for i in (0..n).rev() {
        let d = r[(i, i)];
        if !is_usable_pivot(d) {
            return Err(Error::ZeroDiagonal { row: i });
        }
        let row = r.row(i);
        let mut s = 0.0;
        for j in (i + 1..n).rev() {
            s += row[j] * b[j];
        }
        b[i] = (b[i] - s) / d;
    }
    Ok(())
}

/// In-place `Rᵀ y = b` for upper-triangular `R` (forward substitution).
pub fn solve_upper_transpose_in_place(r: &DenseMatrix, b: &mut [f64]) -> Result<()> {
    let n = r.rows();
    for i in 0..n {
        let d = r[(i, i)];
        if !is_usable_pivot(d) {
            return Err(Error::ZeroDiagonal { row: i });
        }
        let mut s = 0.0;
        for j in 0..i {
            s += r[(j, i)] * b[j];
        }
        b[i] = (b[i] - s) / d;
    }
    Ok(())
}

/// Upper-triangular product `R · z`, used to verify solves.
pub fn upper_matvec(r: &DenseMatrix, z: &[f64]) -> Vec<f64> {
    (0..r.rows())
        .map(|i| {
            let row = r.row(i);
            (i..r.cols()).fold(0.0, |acc, j| acc + row[j] * z[j])
        })
        .collect()
}

fn is_usable_pivot(d: f64) -> bool {
    d.is_finite() && d.abs() >= f64::MIN_POSITIVE
}

fn check_square_rhs(op: &'static str, r: &DenseMatrix, len: usize) -> Result<()> {
    if !r.is_square() || r.rows() != len {
        return Err(Error::dims(op, r.shape(), (len, 1)));
    }
    Ok(())
}
