//! Eigensolver kernels: Sturm-sequence bisection for symmetric tridiagonal
//! matrices and a matrix-free locally optimal iteration for sparse
//! self-adjoint operators.

mod operator;
mod tridiag;

pub use operator::{smallest_eig_operator, smallest_eig_operator_from, LinearOp};
pub use tridiag::{discretize_schrodinger_1d, smallest_eig_tridiag, solve_tridiag};

/// The deterministic start vector used by [`smallest_eig_operator`];
/// exposed so warm-start call sites can reproduce the cold-start path.
pub fn seeded_start_for_dim(dim: usize) -> Vec<f64> {
    seeded_unit_vector(dim, 0xA24B_AED4_963E_E407)
}

pub(crate) use tridiag::kth_eigenvalue_tridiag;

/// Result of a smallest-eigenpair solve.
///
/// The vector is normalized to unit Euclidean norm and `residual` is the
/// relative residual `‖A u − λ u‖ / ‖u‖`.
#[derive(Clone, Debug)]
pub struct EigenResult<S = f64> {
    pub value: f64,
    pub vector: Vec<S>,
    pub residual: f64,
    pub iterations: usize,
}

/// Deterministic pseudo-random start vector (xorshift64*), unit norm.
pub(crate) fn seeded_unit_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let bits = state.wrapping_mul(0x2545_F491_4F6C_DD1D);
            // Map to (-1, 1).
            (bits >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}
