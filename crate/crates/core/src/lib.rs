//! Period matrices of hyperelliptic curves, first-order Schiffer and Fay
//! variation tensors, exact span checks in symmetric squares, and Siegel
//! theta constants with the Schottky form and the Φ-operator.
//!
//! The crate is organised by subsystem:
//!
//! * [`exact`]: rational symmetric tensors, the τ/σ families and their ranks,
//!   quadrics through point sets.
//! * [`riemann`]: hyperelliptic curves, period matrices, normalized
//!   differentials and the Abel–Jacobi map.
//! * [`variation`]: Schiffer/Fay tensors, finite-difference checks of the
//!   branch-point variation, and log-degeneration fits.
//! * [`theta`]: theta constants, lattice theta series, the Schottky form and
//!   the Siegel Φ-operator.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is on (the default) and plain iterators otherwise.

pub mod error;
pub mod exact;
pub mod linalg;
pub mod par;
pub mod riemann;
pub mod suite;
pub mod theta;
pub mod variation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
