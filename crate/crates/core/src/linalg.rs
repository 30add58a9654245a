//! Small dense complex matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn invert(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("singular matrix".into()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖m − mᵀ‖_F` (plain transpose, not adjoint).
pub fn asymmetry(m: &CMatrix) -> f64 {
    frobenius(&(m - m.transpose()))
}

/// Eigenvalues of the real part of a Hermitian view of a real symmetric
/// matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn imag_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.im)
}

pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// Smallest eigenvalue of `Im m`.
pub fn min_imag_eigenvalue(m: &CMatrix) -> f64 {
    symmetric_eigenvalues(&imag_part(m))[0]
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Best rank-one approximation `σ₁ u vᴴ`.
pub fn dominant_rank_one(m: &CMatrix) -> Result<CMatrix> {
    let svd = m.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Diagnostic("SVD did not converge".into())),
    };
    let (idx, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &s)| if s > best.1 { (i, s) } else { best });
    let col = u.column(idx).into_owned();
    let row = v_t.row(idx).into_owned();
    Ok(col * row * Complex64::new(s, 0.0))
}

/// Angle between two matrices viewed as vectors in `C^{n²}`, measured as
/// `atan2(‖a − proj_b a‖, ‖proj_b a‖)` so small angles keep full precision.
pub fn matrix_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if bb == 0.0 || frobenius(a) == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let ba: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let c = ba / bb;
    let perp = a - b * c;
    frobenius(&perp).atan2(c.norm() * bb.sqrt())
}

/// `w wᵀ` (no conjugation).
pub fn outer_sym(w: &CVector) -> CMatrix {
    w * w.transpose()
}
