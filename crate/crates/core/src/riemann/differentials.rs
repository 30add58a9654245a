use num_complex::Complex64;

use super::curve::{CurvePoint, Sheet};
use super::periods::RiemannMatrix;
use crate::error::{Error, Result};
use crate::linalg::CVector;

impl RiemannMatrix {
    /// Raw differentials `x^p dx / y`, `p < g`, divided by `dz` for the
    /// declared local coordinate at `point`.
    ///
    /// At a regular point `z = x − x₀`. At the branch point `λ_k`,
    /// `z = √(x − λ_k)`, and `x^p dx / y = 2 λ_k^p / √(∏_{i≠k}(λ_k − λ_i)) dz`
    /// with the principal root on sheet `+`.
    pub fn raw_differentials_at(&self, point: &CurvePoint, sheet: Sheet) -> Result<CVector> {
        let g = self.genus();
        let finite = self.curve.finite_branch_points();
        let (x, inv_y) = match *point {
            CurvePoint::Regular { x, sheet: s } => {
                let scale = self.curve.diameter().max(1.0);
                if let Some(i) = self.curve.branch_index_near(x, 1e-12 * scale) {
                    return Err(Error::Argument(format!(
                        "x = {x} is the branch point {i}; use CurvePoint::Branch"
                    )));
                }
                let y = self.curve.y_at(x, s) * sheet.sign();
                (x, 1.0 / y)
            }
            CurvePoint::Branch(k) => {
                let lk = *finite
                    .get(k)
                    .ok_or_else(|| Error::Argument(format!("no finite branch point {k}")))?;
                let d: Complex64 =
                    finite.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, l)| lk - l).product();
                (lk, Complex64::new(2.0 * sheet.sign(), 0.0) / d.sqrt())
            }
        };
        let mut out = CVector::zeros(g);
        let mut xp = Complex64::new(1.0, 0.0);
        for p in 0..g {
            out[p] = xp * inv_y;
            xp *= x;
        }
        Ok(out)
    }

    /// `(ω_p / dz)(point)` for the normalized basis `ω = A⁻¹ (x^p dx / y)`.
    ///
    /// For regular points `sheet` multiplies the point's own sheet (so
    /// `Plus` keeps it); for branch points it picks the sign of the root.
    pub fn normalized_differentials_at(&self, point: &CurvePoint, sheet: Sheet) -> Result<CVector> {
        Ok(&self.a_inv * self.raw_differentials_at(point, sheet)?)
    }

    /// Convenience: normalized values at a regular point on the given sheet.
    pub fn normalized_at(&self, x: Complex64, sheet: Sheet) -> Result<CVector> {
        self.normalized_differentials_at(&CurvePoint::regular(x, sheet), Sheet::Plus)
    }
}
