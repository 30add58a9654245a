//! Hyperelliptic curves: period matrices, normalized differentials and the
//! Abel–Jacobi map.
//!
//! Homology basis: branch points are sorted by `(Re, Im)` in the working
//! chart and joined by a monotone polyline. Each edge lifts to a closed cycle
//! `c_k`; consecutive cycles meet once and are oriented to intersect with
//! `+1`. Then `a_i = c_{2i−1}` and `b_i = c_{2i} + c_{2i+2} + … + c_{2g}`
//! form a symplectic basis.

mod abel;
mod curve;
mod differentials;
mod jinv;
pub mod path;
mod periods;
pub mod quadrature;

pub use abel::{AbelJacobi, LatticeReduction};
pub use curve::{parse_complex, CurvePoint, HyperellipticCurve, Sheet, MIN_RELATIVE_SEPARATION};
pub use jinv::{j_algebraic, j_from_lambda};
pub use periods::{
    period_matrix, period_matrix_with, ChainCycle, Chart, Origin, PeriodDiagnostics,
    PeriodLayout, PeriodOptions, RiemannMatrix, DEFAULT_PRECISION, MIN_PRECISION,
};
