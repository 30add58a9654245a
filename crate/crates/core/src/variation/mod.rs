//! First-order variations of period matrices.
//!
//! [`schiffer_tensor`] and [`fay_tensor`] build the rank-one and rank-two
//! tensors `2πi·w wᵀ` and `2πi(u vᵀ + v uᵀ)` from normalized differentials.
//! [`rauch_fd_check`] compares the first of them against finite differences
//! of the period matrix when a branch point moves, and
//! [`fay_degeneration_fit`] follows a family in which two branch points
//! collide, fitting the logarithmic divergence and the limit of the
//! off-diagonal periods.

mod degeneration;
mod family;
mod rauch;
mod tensor;

pub use degeneration::{fay_degeneration_fit, AjLimit, DegenerationFit, FitOptions};
pub use family::{Deformation, FamilySpec};
pub use rauch::{rauch_fd_check, RauchOptions, RichardsonTable, VariationReport, DEFAULT_STEPS};
pub use tensor::{
    composite_sigma, fay_tensor, schiffer_tensor, ScaleConvention, VariationKind, VariationTensor,
    FAY_RANK_TOL, SCHIFFER_RANK_TOL,
};
