//! Seeded test-matrix families and the `t`-scaled saddle problem.
//!
//! Every generator takes an explicit seed and builds its own random stream,
//! so identical arguments give bitwise-identical matrices. Streams are
//! ChaCha8 seeded through [`sub_seed`]; normal deviates come from the
//! Box–Muller transform.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::qr::thin_householder_qr;
use crate::saddle::{assemble, SaddleBlocks};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derived seed `h(seed, index) = mix64(seed + index·φ)` with the 64-bit
/// golden-ratio increment φ used by SplitMix64.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Standard-normal stream: Box–Muller over a seeded ChaCha8 generator.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(radius * s);
        radius * c
    }

    /// `rows × cols` matrix filled row by row.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| self.next_normal())
    }
}

/// `diag(10^0, …, 10^(−s))` with `n` logarithmically spaced points; a single
/// point is `10^(−s)`.
pub fn logspace_diag(s: f64, n: usize) -> DenseMatrix {
    let values: Vec<f64> = if n == 1 {
        vec![10f64.powf(-s)]
    } else {
        (0..n)
            .map(|i| 10f64.powf(-s * i as f64 / (n - 1) as f64))
            .collect()
    };
    DenseMatrix::diagonal(&values)
}

/// Orthogonal `n × n` matrix: the positive-diagonal Householder Q factor of
/// a standard-normal matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let mut stream = NormalStream::new(seed);
    loop {
        let g = stream.matrix(n, n);
        // A Gaussian matrix is singular with probability zero; draw again
        // from the same stream if rounding says otherwise.
        if let Ok(f) = thin_householder_qr(&g) {
            return f.q;
        }
    }
}

/// `X = P·D·Qᵀ` (`m × n`) with `P` the first `n` columns of a random
/// orthogonal `m × m`, `Q` random orthogonal `n × n`, `D = logspace_diag(s, n)`.
/// `κ(X) ≈ 10^s`.
pub fn matrix1(m: usize, n: usize, s: f64, seed: u64) -> Result<DenseMatrix> {
    if m < n || n == 0 {
        return Err(Error::dims("matrix1 (needs m >= n >= 1)", (m, n), (n, n)));
    }
    let p = random_orthogonal(m, sub_seed(seed, 1)).leading_columns(n);
    let q = random_orthogonal(n, sub_seed(seed, 2));
    let pd = p.matmul(&logspace_diag(s, n))?;
    pd.matmul(&q.transpose())
}

/// Symmetric positive definite `X = P·D·Pᵀ` (`n × n`), symmetrized as
/// `(X + Xᵀ)/2`. Eigenvalues are approximately `logspace_diag(s, n)`.
///
/// `P` is drawn from the same sub-stream as the left factor of [`matrix1`],
/// so `matrix1(m, n, s, seed)` and `matrix2(m, s, seed)` share their
/// orthogonal basis.
pub fn matrix2(n: usize, s: f64, seed: u64) -> DenseMatrix {
    let p = random_orthogonal(n, sub_seed(seed, 1));
    let pd = p.matmul(&logspace_diag(s, n)).expect("square factors");
    let x = pd.matmul(&p.transpose()).expect("square factors");
    let xt = x.transpose();
    x.add(&xt).expect("same shape").scale(0.5)
}

/// Hilbert matrix `h_ij = 1/(i + j − 1)` (one-based indices).
pub fn hilbert(m: usize) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, j| 1.0 / (i + j + 1) as f64)
}

/// All-ones `n × n` matrix `eeᵀ`.
pub fn ones_rank_one(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Matrix1,
    Matrix2,
    Hilbert,
    OnesRankOne,
}

impl GeneratorKind {
    /// Square families sized by `n` alone.
    pub fn is_square(self) -> bool {
        !matches!(self, GeneratorKind::Matrix1)
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Matrix1 => "matrix1",
            GeneratorKind::Matrix2 => "matrix2",
            GeneratorKind::Hilbert => "hilbert",
            GeneratorKind::OnesRankOne => "ones_rank_one",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix1" => Ok(GeneratorKind::Matrix1),
            "matrix2" => Ok(GeneratorKind::Matrix2),
            "hilbert" => Ok(GeneratorKind::Hilbert),
            "ones_rank_one" | "ones" => Ok(GeneratorKind::OnesRankOne),
            other => Err(Error::Domain(format!("unknown generator kind '{other}'"))),
        }
    }
}

/// Full description of one generated matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Row count for `matrix1`; ignored by the square families.
    pub m: usize,
    pub n: usize,
    /// Decade exponent for `matrix1`/`matrix2`.
    pub s: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if self.kind == GeneratorKind::Matrix1 && self.m < self.n {
            return Err(Error::Domain(format!(
                "matrix1 needs m >= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !self.s.is_finite() || self.s < 0.0 {
            return Err(Error::Domain(format!(
                "s must be finite and >= 0, got {}",
                self.s
            )));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<DenseMatrix> {
        self.validate()?;
        Ok(match self.kind {
            GeneratorKind::Matrix1 => matrix1(self.m, self.n, self.s, self.seed)?,
            GeneratorKind::Matrix2 => matrix2(self.n, self.s, self.seed),
            GeneratorKind::Hilbert => hilbert(self.n),
            GeneratorKind::OnesRankOne => ones_rank_one(self.n),
        })
    }
}

/// A saddle problem after the `t`-scaling, with its manufactured solution.
#[derive(Debug, Clone)]
pub struct ScaledProblem {
    pub blocks: SaddleBlocks,
    pub t: f64,
    /// `(t·e_m; e_n/t)`.
    pub z_star: Vector,
    /// `M · z_star`, computed once and stored.
    pub f: Vector,
    /// Generators that produced the unscaled blocks, if recorded.
    pub provenance: Vec<GeneratorSpec>,
}

/// `A = A₁/t`, `B = B₁·t`, `C = C₁·t`, `z★ = (t·e; e/t)`, `f = M·z★`.
pub fn scale_problem(
    a1: &DenseMatrix,
    b1: &DenseMatrix,
    c1: &DenseMatrix,
    t: f64,
) -> Result<ScaledProblem> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "scaling parameter t must be finite and nonzero, got {t}"
        )));
    }
    let blocks = SaddleBlocks::new(a1.scale(1.0 / t), b1.scale(t), c1.scale(t))?;
    let (m, n) = (blocks.m(), blocks.n());
    let mut z = vec![t; m];
    z.extend(std::iter::repeat_n(1.0 / t, n));
    let mat = assemble(&blocks)?;
    let f = mat.matvec(&z)?;
    Ok(ScaledProblem {
        blocks,
        t,
        z_star: Vector::from(z),
        f: Vector::from(f),
        provenance: Vec::new(),
    })
}
