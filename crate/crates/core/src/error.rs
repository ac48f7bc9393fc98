use std::fmt;

/// Errors raised by the factorization, solve, and I/O routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("singular-to-working-precision")]
    Singular,

    #[error("zero diagonal entry at row {row} in triangular solve")]
    ZeroDiagonal { row: usize },

    #[error("rank-deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("non-positive diagonal entry {value:e} of R at index {index}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("{step}: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate solution for metric normalization")]
    DegenerateSolution,

    #[error("orthogonality defect hypothesis violated: beta = {beta:e} is not below 1")]
    OrthogonalityHypothesis { beta: f64 },

    #[error("backward-error hypotheses violated: beta = {beta:e}, alpha*kappa = {alpha_kappa:e}")]
    HypothesesViolated { beta: f64, alpha_kappa: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            op,
            left_rows: left.0,
            left_cols: left.1,
            right_rows: right.0,
            right_cols: right.1,
        }
    }

    pub(crate) fn at_step(self, step: &'static str) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }

    /// The innermost error, with step annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the error signals that the system matrix (or a panel of it)
    /// is numerically singular.
    pub fn is_singular(&self) -> bool {
        matches!(
            self.root(),
            Error::Singular
                | Error::ZeroDiagonal { .. }
                | Error::RankDeficient { .. }
                | Error::NonPositiveDiagonal { .. }
        )
    }

    /// Short machine-readable code used in benchmark tables (`ERR:<code>`).
    pub fn code(&self) -> ErrorCode {
        ErrorCode(match self.root() {
            Error::DimensionMismatch { .. } => "dimension",
            Error::InvalidData(_) => "invalid-data",
            Error::Domain(_) => "domain",
            Error::NotSymmetric { .. } => "not-symmetric",
            Error::Singular => "singular",
            Error::ZeroDiagonal { .. } => "zero-diagonal",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::NonPositiveDiagonal { .. } => "non-positive-diagonal",
            Error::Step { .. } => unreachable!("root() strips step annotations"),
            Error::DegenerateSolution => "degenerate-solution",
            Error::OrthogonalityHypothesis { .. } => "orthogonality-hypothesis",
            Error::HypothesesViolated { .. } => "hypotheses-violated",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorCode(pub &'static str);

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
