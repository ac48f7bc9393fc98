//! Block Gram–Schmidt QR solvers for symmetric saddle-point systems
//!
//! ```text
//! [ A   B ] [x]   [b]
//! [ Bᵀ -C ] [y] = [c]
//! ```
//!
//! with `A` symmetric positive definite, `C` symmetric positive semidefinite
//! and `B` of full column rank. The system matrix is factored as `M = QR` by
//! block classical Gram–Schmidt over the column partition `(M₁, M₂)`, either
//! once ([`block::bcgs`]) or with one reorthogonalization pass
//! ([`block::bcgs2`]), each panel handled by a thin Householder QR. The
//! [`stability`] module measures how far the computed factors and solutions
//! are from exact, and [`testgen`] builds the seeded test families.

pub mod block;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod mtx;
pub mod qr;
pub mod saddle;
pub mod stability;
pub mod testgen;

pub use block::{bcgs, bcgs2, BlockPartition, BlockQR};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, NormEstimate, Vector};
pub use qr::{thin_householder_qr, ThinQR};
pub use saddle::{Method, SaddleBlocks, SaddleSolution};
pub use stability::{PerturbationBound, StabilityReport};

/// Machine precision used by every metric: the spacing of `f64` at 1.
pub const EPS: f64 = f64::EPSILON;
