//! Siegel theta constants, lattice theta series, the Schottky form and the
//! Φ-operator.
//!
//! Convention: for a characteristic `(ε, δ) ∈ {0,1}^g × {0,1}^g`,
//!
//! ```text
//! θ[ε;δ](T) = Σ_{n ∈ Z^g} exp(πi (n+ε/2)ᵀ T (n+ε/2) + πi (n+ε/2)ᵀ δ).
//! ```

mod constants;
mod forms;
mod lattice;
mod point;

pub use constants::{
    all_characteristics, even_characteristics, theta_constant, theta_constants, truncation_radius,
    ThetaCharacteristic, ThetaTable, DEFAULT_THETA_TOL, MAX_RADIUS,
};
pub use forms::{
    j_invariant, schottky_form, siegel_phi, theta_series_via_constants, PhiResult, SchottkyValue,
    ThetaSeries,
};
pub use lattice::{lattice_theta, LatticeSpec, LatticeTheta, LatticeThetaOptions};
pub use point::SiegelPoint;
