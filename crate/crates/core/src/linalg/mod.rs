//! Dense matrix storage, products, norm and condition estimates, and the
//! triangular and Cholesky kernels.

pub mod cholesky;
pub mod condition;
pub mod eigen;
pub mod matrix;
pub mod norm;
pub mod triangular;

pub use cholesky::{cholesky, Cholesky};
pub use condition::condition_number;
pub use eigen::{singular_values, symmetric_eigenvalues};
pub use matrix::{DenseMatrix, Vector};
pub use norm::{
    default_max_iter, norm2_est, spectral_norm, spectral_norm_op, LinearOperator, NormEstimate,
    DEFAULT_TOL,
};
pub use triangular::back_substitute;
