//! Exact rational linear algebra on symmetric squares.
//!
//! Elements of Sym²V are held in two forms. [`SymTensor`] is a quadratic
//! polynomial in the basis vectors `v_1..v_n` (monomial coefficients, 1-based
//! indices). [`SymMatrix`] is the symmetric Gram-style matrix, either exact or
//! complex floating point. A polynomial `P` corresponds to the matrix `M` with
//! `xᵀ M x = P(x)`, so the monomial `v_k v_l` (k ≠ l) sits at `M[k][l] = 1/2`.

mod linalg;
mod quadrics;
mod span;
mod tensor;

pub use linalg::{exact_rank, rational_kernel, float_rank};
pub use quadrics::{quadrics_through, quadrics_through_float, Quadric, QuadricBasis};
pub use span::{
    random_rational_vectors, sigma_product, sigma_span_rank, sigma_tensor, span_rank,
    tau_tensor, verify_direct_sum_e1v, verify_sigma_span, verify_tau_independence,
    DirectSumReport, SigmaSpanReport, SigmaTrial, SpanElement, SpanMode, TauReport,
    DEFAULT_FLOAT_RANK_THRESHOLD, MAX_EXACT_DIMENSION, RANDOM_ENTRY_BOUND,
};
pub use tensor::{sym2_dim, SymMatrix, SymTensor};

pub use num_rational::BigRational;

/// Shorthand for an exact rational from a small fraction.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}
