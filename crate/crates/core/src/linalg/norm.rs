use super::matrix::{norm2, DenseMatrix};

/// Default relative tolerance for power-iteration norm estimates.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default iteration cap for an operator with `dim` columns.
pub fn default_max_iter(dim: usize) -> usize {
    5 * dim + 100
}

/// A linear map that can be applied together with its transpose.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `x ↦ A x`; `x.len() == ncols()`.
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    /// `y ↦ Aᵀ y`; `y.len() == nrows()`.
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64>;
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }
    fn ncols(&self) -> usize {
        self.cols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x).expect("operator dimension")
    }
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.matvec_t(y).expect("operator dimension")
    }
}

/// Result of an iterative 2-norm estimate.
///
/// `value` is a lower bound on the true norm even when `converged` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Estimates `‖X‖₂` by power iteration on `XᵀX`.
pub fn spectral_norm(x: &DenseMatrix, tol: f64, max_iter: usize) -> NormEstimate {
    if x.is_zero() {
        return NormEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    spectral_norm_op(x, tol, max_iter)
}

/// [`spectral_norm`] with the default tolerance and iteration cap.
pub fn norm2_est(x: &DenseMatrix) -> f64 {
    spectral_norm(x, DEFAULT_TOL, default_max_iter(x.cols())).value
}

/// Power iteration on `AᵀA` for any [`LinearOperator`], applied as
/// `x ↦ Aᵀ(Ax)`.
///
/// Starts from the normalized all-ones vector. If that start is annihilated
/// (it lies in the null space of `A`), restarts from `e₁`, then from a
/// deterministic non-symmetric vector; an operator that annihilates all three
/// is reported as zero.
pub fn spectral_norm_op<Op: LinearOperator + ?Sized>(
    op: &Op,
    tol: f64,
    max_iter: usize,
) -> NormEstimate {
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return NormEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let starts: [Box<dyn Fn(usize) -> f64>; 3] = [
        Box::new(|_| 1.0),
        Box::new(|i| if i == 0 { 1.0 } else { 0.0 }),
        Box::new(|i| 1.0 / (i as f64 + 1.0) + ((i % 3) as f64) * 0.5),
    ];
    let mut spent = 0;
    for start in &starts {
        let mut x: Vec<f64> = (0..n).map(start).collect();
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        match power_iterate(op, x, tol, max_iter) {
            Some(mut est) => {
                est.iterations += spent;
                return est;
            }
            None => spent += 1,
        }
    }
    NormEstimate {
        value: 0.0,
        iterations: spent,
        converged: true,
    }
}

/// Returns `None` when the start vector is annihilated on the first step.
fn power_iterate<Op: LinearOperator + ?Sized>(
    op: &Op,
    mut x: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Option<NormEstimate> {
    let mut rho_prev = f64::NAN;
    let mut best = 0.0_f64;
    for it in 1..=max_iter.max(1) {
        let y = op.apply(&x);
        let rho = y.iter().map(|v| v * v).sum::<f64>();
        let w = op.apply_transpose(&y);
        let nw = norm2(&w);
        if it == 1 && (rho == 0.0 || nw == 0.0) {
            return None;
        }
        if !rho.is_finite() || !nw.is_finite() {
            return Some(NormEstimate {
                value: f64::INFINITY,
                iterations: it,
                converged: false,
            });
        }
        // For a unit x, ‖Ax‖² never exceeds the largest eigenvalue of AᵀA.
        best = best.max(rho);
        if (rho - rho_prev).abs() <= tol * rho {
            return Some(NormEstimate {
                value: best.sqrt(),
                iterations: it,
                converged: true,
            });
        }
        if nw == 0.0 {
            // x landed in the null space after a rounding step; the best
            // quotient so far stands.
            return Some(NormEstimate {
                value: best.sqrt(),
                iterations: it,
                converged: true,
            });
        }
        rho_prev = rho;
        x = w;
        x.iter_mut().for_each(|v| *v /= nw);
    }
    Some(NormEstimate {
        value: best.sqrt(),
        iterations: max_iter,
        converged: false,
    })
}
