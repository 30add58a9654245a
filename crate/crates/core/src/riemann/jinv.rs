use num_complex::Complex64;

use super::curve::HyperellipticCurve;
use crate::error::{Error, Result};

/// `j = 256 (λ² − λ + 1)³ / (λ² (λ − 1)²)`.
pub fn j_from_lambda(lambda: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let num = (lambda * lambda - lambda + one).powu(3) * 256.0;
    let den = lambda * lambda * (lambda - one) * (lambda - one);
    num / den
}

/// j-invariant of a genus-1 curve from the cross-ratio of its four branch
/// points (infinity allowed as the fourth).
pub fn j_algebraic(curve: &HyperellipticCurve) -> Result<Complex64> {
    if curve.genus() != 1 {
        return Err(Error::Domain(format!("j-invariant needs genus 1, got {}", curve.genus())));
    }
    let e = curve.finite_branch_points();
    let lambda = if curve.has_infinity() {
        (e[2] - e[0]) / (e[2] - e[1])
    } else {
        ((e[2] - e[0]) * (e[3] - e[1])) / ((e[2] - e[1]) * (e[3] - e[0]))
    };
    Ok(j_from_lambda(lambda))
}
