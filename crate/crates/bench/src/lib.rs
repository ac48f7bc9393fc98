//! Shared fixtures for the criterion benchmarks.

use saddle_core::experiment::{BaseBlocks, BenchConfig, Example};
use saddle_core::testgen::{matrix1, ScaledProblem};
use saddle_core::DenseMatrix;

/// Sizes `(m, n)` swept by the benchmarks.
pub const SIZES: [(usize, usize); 3] = [(40, 20), (100, 50), (200, 100)];

/// A `matrix1` test matrix with `κ = 10^s`.
pub fn tall_matrix(l: usize, k: usize, s: f64) -> DenseMatrix {
    matrix1(l, k, s, 0).expect("l >= k")
}

/// Example-2-style saddle problem at `t = 1`.
pub fn saddle_problem(m: usize, n: usize) -> ScaledProblem {
    let cfg = BenchConfig {
        m,
        n,
        t_list: vec![1.0],
        ..BenchConfig::for_example(Example::Two)
    };
    BaseBlocks::generate(&cfg)
        .and_then(|b| b.scaled(1.0))
        .expect("valid benchmark configuration")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_shapes() {
        assert_eq!(tall_matrix(30, 10, 4.0).shape(), (30, 10));
        let p = saddle_problem(20, 10);
        assert_eq!((p.blocks.m(), p.blocks.n()), (20, 10));
        assert_eq!(p.f.len(), 30);
    }
}
