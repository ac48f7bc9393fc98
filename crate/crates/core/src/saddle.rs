//! Saddle-point system assembly, structural validation, and QR-based solves.

use std::fmt;
use std::str::FromStr;

use crate::block::{bcgs, bcgs2, BlockPartition};
use crate::error::{Error, Result};
use crate::linalg::{
    back_substitute, cholesky, default_max_iter, norm2_est, spectral_norm, Cholesky, DenseMatrix,
    Vector, DEFAULT_TOL,
};
use crate::qr::thin_householder_qr;

/// The `(A, B, C)` blocks of `[[A, B], [Bᵀ, −C]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleBlocks {
    a: DenseMatrix,
    b: DenseMatrix,
    c: DenseMatrix,
}

impl SaddleBlocks {
    /// Checks only the dimensions (`A` m×m, `B` m×n, `C` n×n); structural
    /// properties are left to [`validate`].
    pub fn new(a: DenseMatrix, b: DenseMatrix, c: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims(
                "saddle blocks (A must be square)",
                a.shape(),
                a.shape(),
            ));
        }
        if b.rows() != a.rows() {
            return Err(Error::dims("saddle blocks (A, B)", a.shape(), b.shape()));
        }
        if !c.is_square() || c.rows() != b.cols() {
            return Err(Error::dims("saddle blocks (B, C)", b.shape(), c.shape()));
        }
        Ok(SaddleBlocks { a, b, c })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }
    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }
    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }
    pub fn m(&self) -> usize {
        self.a.rows()
    }
    pub fn n(&self) -> usize {
        self.c.rows()
    }
    pub fn l(&self) -> usize {
        self.m() + self.n()
    }

    /// `M₁ = (A; Bᵀ)`, `M₂ = (B; −C)`.
    pub fn partition(&self) -> BlockPartition {
        let m1 = self.a.vstack(&self.b.transpose()).expect("checked dims");
        let m2 = self.b.vstack(&self.c.scale(-1.0)).expect("checked dims");
        BlockPartition::new(m1, m2).expect("checked dims")
    }
}

/// The full `(m+n) × (m+n)` matrix `[[A, B], [Bᵀ, −C]]`.
pub fn assemble(blocks: &SaddleBlocks) -> Result<DenseMatrix> {
    let m = blocks.m();
    let mut mat = DenseMatrix::zeros(blocks.l(), blocks.l());
    mat.set_block(0, 0, &blocks.a);
    mat.set_block(0, m, &blocks.b);
    mat.set_block(m, 0, &blocks.b.transpose());
    mat.set_block(m, m, &blocks.c.scale(-1.0));
    Ok(mat)
}

/// Structural certificates for a saddle system.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub a_spd: bool,
    pub c_psd: bool,
    pub b_full_rank: bool,
    /// Smallest Cholesky pivot of `A` (the failing pivot if not SPD; NaN if
    /// `A` is not symmetric).
    pub a_min_pivot: f64,
    /// Estimate of `λ_min(C)`.
    pub c_min_eigenvalue: f64,
    /// Smallest `|r_ii|` of the thin QR of `B`; zero on a rank error.
    pub b_min_r_diag: f64,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.a_spd && self.c_psd && self.b_full_rank
    }
}

fn is_symmetric(x: &DenseMatrix, norm: f64) -> bool {
    x.asymmetry()
        .is_some_and(|a| a <= 10.0 * f64::EPSILON * norm)
}

/// Checks `A ≻ 0`, `C ⪰ 0` (both symmetric), and `rank(B) = n ≤ m`.
pub fn validate(blocks: &SaddleBlocks) -> ValidationReport {
    let eps = f64::EPSILON;
    let (a_spd, a_min_pivot) = match cholesky(&blocks.a) {
        Ok(c @ Cholesky::Factor { .. }) => (true, c.pivot_diagnostic()),
        Ok(c) => (false, c.pivot_diagnostic()),
        Err(_) => (false, f64::NAN),
    };

    let c_norm = norm2_est(&blocks.c);
    let c_min_eigenvalue = min_eigenvalue_estimate(&blocks.c, c_norm);
    let c_psd = is_symmetric(&blocks.c, c_norm) && c_min_eigenvalue >= -100.0 * eps * c_norm;

    let (b_full_rank, b_min_r_diag) = if blocks.n() > blocks.m() {
        (false, 0.0)
    } else {
        match thin_householder_qr(&blocks.b) {
            Ok(f) => (true, f.r.diag().into_iter().fold(f64::INFINITY, f64::min)),
            Err(_) => (false, 0.0),
        }
    };

    ValidationReport {
        a_spd,
        c_psd,
        b_full_rank,
        a_min_pivot,
        c_min_eigenvalue,
        b_min_r_diag,
    }
}

/// `λ_min(C) ≈ ‖C‖ − ‖ ‖C‖·I − C ‖` by power iteration on the shifted matrix.
fn min_eigenvalue_estimate(c: &DenseMatrix, c_norm: f64) -> f64 {
    if c_norm == 0.0 {
        return 0.0;
    }
    let shifted = DenseMatrix::identity(c.rows())
        .scale(c_norm)
        .sub(c)
        .expect("square");
    let top = spectral_norm(&shifted, DEFAULT_TOL, default_max_iter(c.rows())).value;
    c_norm - top
}

/// Factorization route for the system matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Bcgs,
    Bcgs2,
    /// Thin Householder QR of the full matrix; a non-block baseline.
    Householder,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Bcgs, Method::Bcgs2, Method::Householder];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bcgs => "bcgs",
            Method::Bcgs2 => "bcgs2",
            Method::Householder => "householder",
        }
    }

    /// Upper-case label used in table row names.
    pub fn label(self) -> &'static str {
        match self {
            Method::Bcgs => "BCGS",
            Method::Bcgs2 => "BCGS2",
            Method::Householder => "HOUSEHOLDER",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bcgs" => Ok(Method::Bcgs),
            "bcgs2" => Ok(Method::Bcgs2),
            "householder" | "house" => Ok(Method::Householder),
            other => Err(Error::Domain(format!(
                "unknown method '{other}' (expected bcgs, bcgs2 or householder)"
            ))),
        }
    }
}

/// Square `Q` and upper-triangular `R` with `M ≈ QR`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub method: Method,
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

impl Factorization {
    /// `g = Qᵀf`, then `Rz = g` by back substitution.
    pub fn solve(&self, f: &Vector) -> Result<Vector> {
        if f.len() != self.q.rows() {
            return Err(Error::dims(
                "solve (right-hand side)",
                self.q.shape(),
                (f.len(), 1),
            ));
        }
        let g = Vector::from(self.q.matvec_t(f.as_slice())?);
        back_substitute(&self.r, &g)
    }
}

/// Factors the assembled system by the chosen route.
pub fn factor(blocks: &SaddleBlocks, method: Method) -> Result<Factorization> {
    let (q, r) = match method {
        Method::Bcgs | Method::Bcgs2 => {
            let p = blocks.partition();
            let f = if method == Method::Bcgs {
                bcgs(&p)?
            } else {
                bcgs2(&p)?
            };
            (f.q(), f.r())
        }
        Method::Householder => {
            let f =
                thin_householder_qr(&assemble(blocks)?).map_err(|e| e.at_step("full matrix"))?;
            (f.q, f.r)
        }
    };
    Ok(Factorization { method, q, r })
}

/// Solution `z = (x; y)` of the saddle system.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub z: Vector,
    m: usize,
    pub method: Method,
}

impl SaddleSolution {
    pub fn x(&self) -> &[f64] {
        &self.z.as_slice()[..self.m]
    }
    pub fn y(&self) -> &[f64] {
        &self.z.as_slice()[self.m..]
    }
}

/// Factors and solves `Mz = f`.
pub fn solve(blocks: &SaddleBlocks, f: &Vector, method: Method) -> Result<SaddleSolution> {
    if f.len() != blocks.l() {
        return Err(Error::dims(
            "solve (right-hand side)",
            (blocks.l(), blocks.l()),
            (f.len(), 1),
        ));
    }
    let z = factor(blocks, method)?.solve(f)?;
    Ok(SaddleSolution {
        z,
        m: blocks.m(),
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::condition_number;

    const EPS: f64 = f64::EPSILON;

    fn small() -> SaddleBlocks {
        SaddleBlocks::new(
            DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 2.0]]),
            DenseMatrix::from_rows(&[[1.0], [0.0]]),
            DenseMatrix::from_rows(&[[1.0]]),
        )
        .unwrap()
    }

    #[test]
    fn assemble_examples() {
        let b = SaddleBlocks::new(
            DenseMatrix::from_rows(&[[2.0]]),
            DenseMatrix::from_rows(&[[1.0]]),
            DenseMatrix::from_rows(&[[1.0]]),
        )
        .unwrap();
        assert_eq!(
            assemble(&b).unwrap(),
            DenseMatrix::from_rows(&[[2.0, 1.0], [1.0, -1.0]])
        );
        let b = SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::zeros(2, 1),
            DenseMatrix::from_rows(&[[3.0]]),
        )
        .unwrap();
        assert_eq!(
            assemble(&b).unwrap(),
            DenseMatrix::diagonal(&[1.0, 1.0, -3.0])
        );
        assert_eq!(
            assemble(&small()).unwrap(),
            DenseMatrix::from_rows(&[[2.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, -1.0]])
        );
    }

    #[test]
    fn dimension_checks() {
        assert!(SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::zeros(3, 1),
            DenseMatrix::identity(1)
        )
        .is_err());
        assert!(SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::zeros(2, 1),
            DenseMatrix::identity(2)
        )
        .is_err());
    }

    #[test]
    fn validate_examples() {
        let ok = SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::from_rows(&[[1.0], [0.0]]),
            DenseMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(validate(&ok).all_pass());

        let indefinite = SaddleBlocks::new(
            DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]),
            DenseMatrix::from_rows(&[[1.0], [0.0]]),
            DenseMatrix::zeros(1, 1),
        )
        .unwrap();
        let r = validate(&indefinite);
        assert!(!r.a_spd && r.c_psd && r.b_full_rank);

        let rank_one = SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]),
            DenseMatrix::zeros(2, 2),
        )
        .unwrap();
        let r = validate(&rank_one);
        assert!(r.a_spd && !r.b_full_rank);

        let negative_c = SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::from_rows(&[[1.0], [0.0]]),
            DenseMatrix::from_rows(&[[-1e-3]]),
        )
        .unwrap();
        assert!(!validate(&negative_c).c_psd);

        let ones = SaddleBlocks::new(
            DenseMatrix::identity(3),
            DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            crate::testgen::ones_rank_one(3),
        )
        .unwrap();
        let r = validate(&ones);
        assert!(r.c_psd, "{r:?}");
    }

    #[test]
    fn solve_constructed_rhs() {
        let blocks = small();
        let kappa = condition_number(&assemble(&blocks).unwrap(), 1e-8)
            .unwrap()
            .value;
        let f = Vector::from(vec![3.0, 2.0, 0.0]);
        for method in Method::ALL {
            let sol = solve(&blocks, &f, method).unwrap();
            for v in sol.z.as_slice() {
                assert!(
                    (v - 1.0).abs() <= 1e3 * EPS * kappa,
                    "{method}: {:?}",
                    sol.z
                );
            }
            assert_eq!(sol.x().len(), 2);
            assert_eq!(sol.y().len(), 1);
        }
    }

    #[test]
    fn solve_matches_cramer() {
        // det(M) = −6; Cramer's rule gives z = (1/3, 0, 1/3) for f = e₁.
        let blocks = small();
        let kappa = condition_number(&assemble(&blocks).unwrap(), 1e-8)
            .unwrap()
            .value;
        let f = Vector::from(vec![1.0, 0.0, 0.0]);
        let expected = [1.0 / 3.0, 0.0, 1.0 / 3.0];
        for method in Method::ALL {
            let sol = solve(&blocks, &f, method).unwrap();
            for (v, e) in sol.z.as_slice().iter().zip(expected) {
                assert!((v - e).abs() <= 1e3 * EPS * kappa, "{method}: {:?}", sol.z);
            }
            assert_eq!(sol.method, method);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let blocks = SaddleBlocks::new(
            DenseMatrix::identity(2),
            DenseMatrix::zeros(2, 1),
            DenseMatrix::zeros(1, 1),
        )
        .unwrap();
        let f = Vector::from(vec![1.0, 1.0, 1.0]);
        for method in Method::ALL {
            let err = solve(&blocks, &f, method).unwrap_err();
            assert!(err.is_singular(), "{method}: {err}");
        }
        // Back substitution on the triangular factor flags the zero pivot
        // directly when handed the factors.
        let fac = Factorization {
            method: Method::Householder,
            q: DenseMatrix::identity(3),
            r: DenseMatrix::diagonal(&[1.0, 1.0, 0.0]),
        };
        assert!(matches!(fac.solve(&f), Err(Error::ZeroDiagonal { row: 2 })));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("BCGS2".parse::<Method>().unwrap(), Method::Bcgs2);
        assert!("lu".parse::<Method>().is_err());
        assert_eq!(Method::Householder.to_string(), "householder");
    }
}
