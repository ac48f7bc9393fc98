//! Stability metrics of a computed factorization and solution, and the
//! perturbation bounds that turn factorization errors into a backward error
//! for `Mz = f`.
//!
//! All metrics are reported in units of machine precision `ε`:
//!
//! | metric | definition |
//! |--------|------------|
//! | `orth` | `‖I − QᵀQ‖ / ε` |
//! | `dec`  | `‖M − QR‖ / (ε‖M‖)` |
//! | `res`  | `‖Mz̃ − f‖ / (ε‖M‖‖z̃‖)` |
//! | `stab` | `‖z̃ − z★‖ / (ε κ(M) ‖z̃‖)` |
//!
//! Both `res` and `stab` normalize by the computed solution `z̃`.

use crate::error::{Error, Result};
use crate::linalg::eigen::JACOBI_MAX_DIM;
use crate::linalg::matrix::dot_compensated;
use crate::linalg::{
    condition_number, default_max_iter, norm2_est, spectral_norm, spectral_norm_op,
    symmetric_eigenvalues, DenseMatrix, Vector, DEFAULT_TOL,
};
use crate::qr::{factor_residual_norm, gram_defect, orthogonality_defect, HouseholderFactor};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub kappa: f64,
    pub orth: f64,
    pub dec: f64,
    pub res: f64,
    pub stab: f64,
}

/// Computes all four metrics, estimating `κ(M)` along the way.
pub fn metrics(
    m: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
    f: &Vector,
    z_computed: &Vector,
    z_star: &Vector,
) -> Result<StabilityReport> {
    let kappa = condition_number(m, DEFAULT_TOL)?.value;
    metrics_with_kappa(m, q, r, f, z_computed, z_star, kappa)
}

/// [`metrics`] with a precomputed `κ(M)`, so several methods on the same
/// system share one estimate.
pub fn metrics_with_kappa(
    m: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
    f: &Vector,
    z_computed: &Vector,
    z_star: &Vector,
    kappa: f64,
) -> Result<StabilityReport> {
    let l = m.rows();
    if !m.is_square() || q.shape() != (l, l) || r.shape() != (l, l) {
        return Err(Error::dims("metrics (M, Q/R)", m.shape(), q.shape()));
    }
    for v in [f, z_computed, z_star] {
        if v.len() != l {
            return Err(Error::dims(
                "metrics (vector length)",
                m.shape(),
                (v.len(), 1),
            ));
        }
    }
    let z_norm = z_computed.norm();
    if z_norm == 0.0 {
        return Err(Error::DegenerateSolution);
    }
    let m_norm = norm2_est(m);
    let orth = orthogonality_defect(q) / EPS;
    let dec = if m_norm == 0.0 {
        0.0
    } else {
        factor_residual_norm(m, q, r) / (EPS * m_norm)
    };
    let resid = residual_norm(m, z_computed, f)?;
    let res = if m_norm == 0.0 {
        0.0
    } else {
        resid / (EPS * m_norm * z_norm)
    };
    let err = z_computed.sub(z_star)?.norm();
    let stab = err / (EPS * kappa * z_norm);
    Ok(StabilityReport {
        kappa,
        orth,
        dec,
        res,
        stab,
    })
}

/// `‖Mz − f‖₂`.
pub fn residual_norm(m: &DenseMatrix, z: &Vector, f: &Vector) -> Result<f64> {
    let mz = Vector::from(m.matvec(z.as_slice())?);
    Ok(mz.sub(f)?.norm())
}

/// Measured quantities for a nearly orthogonal square matrix `Q̃` with
/// `β = ‖I − Q̃ᵀQ̃‖ < 1`, which guarantee
/// `‖Q̃‖ ≤ √(1+β)`, `‖Q̃⁻¹‖ ≤ 1/√(1−β)` and `‖I − Q̃Q̃ᵀ‖ ≤ β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Bounds {
    pub beta: f64,
    pub norm_q: f64,
    pub norm_q_inv: f64,
    pub right_defect: f64,
}

impl Lemma1Bounds {
    /// Checks the three inequalities with an absolute slack on each.
    pub fn inequalities_hold(&self, slack: f64) -> [bool; 3] {
        [
            self.norm_q <= (1.0 + self.beta).sqrt() + slack,
            self.norm_q_inv <= 1.0 / (1.0 - self.beta).sqrt() + slack,
            self.right_defect <= self.beta + slack,
        ]
    }
}

/// Measures `β`, `‖Q̃‖`, `‖Q̃⁻¹‖` and `‖I − Q̃Q̃ᵀ‖`.
///
/// Up to dimension 64 all four come from the Jacobi solvers, with the defect
/// matrices formed in compensated arithmetic;
/// above that, from power iteration and the condition-number machinery.
pub fn lemma1_bounds(qt: &DenseMatrix) -> Result<Lemma1Bounds> {
    let n = qt.rows();
    if !qt.is_square() {
        return Err(Error::dims("lemma1_bounds", qt.shape(), (n, n)));
    }
    let bounds = if n <= JACOBI_MAX_DIM {
        let cols: Vec<Vec<f64>> = (0..n).map(|j| qt.column(j)).collect();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| qt.row(i).to_vec()).collect();
        let left = symmetric_eigenvalues(&compensated_defect(&cols))?;
        let beta = left[0].abs().max(left[n - 1].abs());
        if beta >= 1.0 {
            return Err(Error::OrthogonalityHypothesis { beta });
        }
        let right = symmetric_eigenvalues(&compensated_defect(&rows))?;
        // λ(QᵀQ) = 1 − λ(I − QᵀQ); the defect's eigenvalues carry an
        // absolute error of order ε·β rather than ε.
        Lemma1Bounds {
            beta,
            norm_q: (1.0 - left[0]).sqrt(),
            norm_q_inv: 1.0 / (1.0 - left[n - 1]).sqrt(),
            right_defect: right[0].abs().max(right[n - 1].abs()),
        }
    } else {
        let beta = orthogonality_defect(qt);
        if beta >= 1.0 {
            return Err(Error::OrthogonalityHypothesis { beta });
        }
        let max_iter = default_max_iter(n);
        let factor = HouseholderFactor::new(qt, None)?;
        let inv = crate::linalg::condition::QrInverse::new(&factor);
        Lemma1Bounds {
            beta,
            norm_q: norm2_est(qt),
            norm_q_inv: spectral_norm_op(&inv, DEFAULT_TOL, max_iter).value,
            right_defect: spectral_norm(&gram_defect(&qt.transpose()), DEFAULT_TOL, max_iter).value,
        }
    };
    Ok(bounds)
}

/// `I − VVᵀ` for the vectors `v_i` as rows of `V`, each entry from a
/// compensated dot product so the small defect is not swamped by rounding.
fn compensated_defect(vectors: &[Vec<f64>]) -> DenseMatrix {
    let n = vectors.len();
    let mut d = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = dot_compensated(&vectors[i], &vectors[j]);
            let v = if i == j { 1.0 - g } else { -g };
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Backward-error factors `(μ, ν)` from the factorization residual `α`, the
/// orthogonality defect `β`, and the triangular-solve (`γ`) and
/// `Q`-application (`δ`) backward errors:
///
/// `μ = α + γ(1+α)·√((1+β)/(1−β))`, `ν = β + δ(1+β)`.
pub fn theorem1_bound(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<(f64, f64)> {
    for (name, v) in [
        ("alpha", alpha),
        ("beta", beta),
        ("gamma", gamma),
        ("delta", delta),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Domain(format!(
                "{name} must be finite and >= 0, got {v}"
            )));
        }
    }
    if beta >= 1.0 {
        return Err(Error::Domain(format!("beta must be below 1, got {beta}")));
    }
    let mu = alpha + gamma * (1.0 + alpha) * ((1.0 + beta) / (1.0 - beta)).sqrt();
    let nu = beta + delta * (1.0 + beta);
    Ok((mu, nu))
}

/// Inputs and outputs of the backward-error bound: the computed `z̃` solves
/// `(M + ΔM)z̃ = f + Δf` with `‖ΔM‖ ≤ μ‖M‖`, `‖Δf‖ ≤ ν‖f‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationBound {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
}

impl PerturbationBound {
    /// Residual bound `μ‖M‖‖z̃‖ + ν‖f‖` implied by the perturbed system.
    pub fn residual_bound(&self, m_norm: f64, z_norm: f64, f_norm: f64) -> f64 {
        self.mu * m_norm * z_norm + self.nu * f_norm
    }
}

/// Measures `α = ‖M − QR‖/‖M‖` and `β = ‖I − QᵀQ‖`, takes `γ = δ = ε·l`,
/// and evaluates `(μ, ν)`.
///
/// Fails with [`Error::HypothesesViolated`] when `β ≥ 1` or `α·κ(M) ≥ 1`.
pub fn backward_certificate(
    m: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
) -> Result<PerturbationBound> {
    let kappa = condition_number(m, DEFAULT_TOL)?.value;
    backward_certificate_with_kappa(m, q, r, kappa)
}

pub fn backward_certificate_with_kappa(
    m: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
    kappa: f64,
) -> Result<PerturbationBound> {
    let l = m.rows();
    if !m.is_square() || q.shape() != (l, l) || r.shape() != (l, l) {
        return Err(Error::dims("backward_certificate", m.shape(), q.shape()));
    }
    let m_norm = norm2_est(m);
    let alpha = if m_norm == 0.0 {
        0.0
    } else {
        factor_residual_norm(m, q, r) / m_norm
    };
    let beta = orthogonality_defect(q);
    if beta >= 1.0 || alpha * kappa >= 1.0 {
        return Err(Error::HypothesesViolated {
            beta,
            alpha_kappa: alpha * kappa,
        });
    }
    let gamma = EPS * l as f64;
    let delta = gamma;
    let (mu, nu) = theorem1_bound(alpha, beta, gamma, delta)?;
    Ok(PerturbationBound {
        alpha,
        beta,
        gamma,
        delta,
        mu,
        nu,
    })
}
