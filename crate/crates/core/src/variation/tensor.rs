use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::SymMatrix;
use crate::linalg::{self, CMatrix, CVector};
use crate::riemann::{CurvePoint, RiemannMatrix, Sheet};

/// A Schiffer tensor counts as rank one when `s₂ < SCHIFFER_RANK_TOL · s₁`.
pub const SCHIFFER_RANK_TOL: f64 = 1e-10;
/// A Fay tensor counts as rank at most two when `s₃ < FAY_RANK_TOL · s₁`.
pub const FAY_RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VariationKind {
    Schiffer,
    Fay,
}

/// How the tensor was normalized.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleConvention {
    /// Whether the overall factor `2πi` is included.
    pub includes_two_pi_i: bool,
    /// Local coordinate is `z / lambda` with `z = x − x₀` or `√(x − λ_k)`.
    pub lambda: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationTensor {
    pub g: usize,
    pub matrix: CMatrix,
    pub kind: VariationKind,
    pub scale_convention: ScaleConvention,
}

impl VariationTensor {
    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.matrix)
    }

    /// Numerical rank with the threshold of this tensor's kind.
    pub fn numerical_rank(&self) -> usize {
        let s = self.singular_values();
        let tol = match self.kind {
            VariationKind::Schiffer => SCHIFFER_RANK_TOL,
            VariationKind::Fay => FAY_RANK_TOL,
        };
        s.iter().filter(|&&x| x > tol * s[0]).count()
    }
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI)
}

fn values_at(rm: &RiemannMatrix, p: &CurvePoint) -> Result<CVector> {
    rm.normalized_differentials_at(p, Sheet::Plus)
}

/// `2πi·w wᵀ` with `w` the normalized differentials at `a` against the
/// coordinate `z / λ`, that is `w = λ·(ω / dz)(a)`.
pub fn schiffer_tensor(rm: &RiemannMatrix, a: &CurvePoint, lambda: Complex64) -> Result<VariationTensor> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::Argument("coordinate scale must be nonzero".into()));
    }
    let w = values_at(rm, a)? * lambda;
    if w.iter().all(|z| z.norm() == 0.0) || w.iter().any(|z| !z.is_finite()) {
        return Err(Error::Diagnostic("normalized differentials vanish or overflow at the centre".into()));
    }
    Ok(VariationTensor {
        g: rm.genus(),
        matrix: linalg::outer_sym(&w) * two_pi_i(),
        kind: VariationKind::Schiffer,
        scale_convention: ScaleConvention { includes_two_pi_i: true, lambda },
    })
}

/// `2πi(u vᵀ + v uᵀ)` with `u`, `v` the normalized differentials at `a`, `b`.
pub fn fay_tensor(rm: &RiemannMatrix, a: &CurvePoint, b: &CurvePoint) -> Result<VariationTensor> {
    if a == b {
        return Err(Error::Argument("Fay tensor needs two distinct points".into()));
    }
    let u = values_at(rm, a)?;
    let v = values_at(rm, b)?;
    let m = (&u * v.transpose() + &v * u.transpose()) * two_pi_i();
    Ok(VariationTensor {
        g: rm.genus(),
        matrix: m,
        kind: VariationKind::Fay,
        scale_convention: ScaleConvention { includes_two_pi_i: true, lambda: Complex64::new(1.0, 0.0) },
    })
}

/// `(fay(a_{n−1}, a_n) + Σ_{j ≤ n−2} schiffer(a_j)) / 2πi`, i.e.
/// `w_{n−1} w_nᵀ + w_n w_{n−1}ᵀ + Σ_j w_j w_jᵀ`.
pub fn composite_sigma(rm: &RiemannMatrix, points: &[CurvePoint]) -> Result<SymMatrix<Complex64>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Argument("composite σ needs at least three points".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::Argument(format!("points {j} and {i} coincide")));
            }
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut m = fay_tensor(rm, &points[n - 2], &points[n - 1])?.matrix;
    for p in &points[..n - 2] {
        m += schiffer_tensor(rm, p, one)?.matrix;
    }
    let m = m / two_pi_i();
    let g = rm.genus();
    SymMatrix::from_rows((0..g).map(|i| (0..g).map(|j| m[(i, j)]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::sigma_tensor;
    use crate::riemann::{period_matrix, HyperellipticCurve};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn curve() -> RiemannMatrix {
        let h = HyperellipticCurve::new(vec![
            c(-2.0, 0.3),
            c(-0.7, -1.1),
            c(0.2, 0.5),
            c(1.1, -0.4),
            c(2.3, 1.0),
            c(0.4, 2.2),
            c(-1.2, 1.9),
            c(1.7, -1.6),
        ])
        .unwrap();
        period_matrix(&h, 1e-12).unwrap()
    }

    fn reg(x: Complex64) -> CurvePoint {
        CurvePoint::regular(x, Sheet::Plus)
    }

    #[test]
    fn ranks() {
        let rm = curve();
        let s = schiffer_tensor(&rm, &reg(c(0.3, -0.2)), c(1.0, 0.0)).unwrap();
        assert_eq!(s.numerical_rank(), 1);
        let f = fay_tensor(&rm, &reg(c(0.3, -0.2)), &reg(c(-0.9, 0.6))).unwrap();
        assert_eq!(f.numerical_rank(), 2);
        let sb = schiffer_tensor(&rm, &CurvePoint::Branch(2), c(1.0, 0.0)).unwrap();
        assert_eq!(sb.numerical_rank(), 1);
    }

    #[test]
    fn lambda_squared_scaling() {
        let rm = curve();
        let p = reg(c(0.3, -0.2));
        let base = schiffer_tensor(&rm, &p, c(1.0, 0.0)).unwrap().matrix;
        for lam in [c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)] {
            let scaled = schiffer_tensor(&rm, &p, lam).unwrap().matrix;
            let diff = linalg::frobenius(&(&scaled - &base * (lam * lam)));
            assert!(diff < 1e-12 * linalg::frobenius(&scaled));
        }
    }

    #[test]
    fn fay_is_symmetric_in_its_points_and_tends_to_twice_schiffer() {
        let rm = curve();
        let a = reg(c(0.3, -0.2));
        let b = reg(c(-0.9, 0.6));
        let ab = fay_tensor(&rm, &a, &b).unwrap().matrix;
        let ba = fay_tensor(&rm, &b, &a).unwrap().matrix;
        assert_eq!(ab, ba);
        let target = schiffer_tensor(&rm, &a, c(1.0, 0.0)).unwrap().matrix * c(2.0, 0.0);
        let mut errs = vec![];
        for h in [1e-2, 5e-3, 2.5e-3] {
            let near = reg(c(0.3 + h, -0.2));
            errs.push(linalg::frobenius(&(fay_tensor(&rm, &a, &near).unwrap().matrix - &target)));
        }
        // Linear convergence: halving the separation halves the error.
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((r - 2.0).abs() < 0.1, "{errs:?}");
        }
    }

    #[test]
    fn composite_matches_sigma_tensor_of_the_values() {
        let rm = curve();
        let pts = [reg(c(0.3, -0.2)), reg(c(-0.9, 0.6)), reg(c(1.4, 0.9)), reg(c(0.0, 1.1))];
        let sig = composite_sigma(&rm, &pts).unwrap();
        let ws: Vec<Vec<Complex64>> = pts
            .iter()
            .map(|p| values_at(&rm, p).unwrap().iter().copied().collect())
            .collect();
        let oracle = sigma_tensor(&ws, 3, 4).unwrap();
        for i in 0..rm.genus() {
            for j in 0..rm.genus() {
                assert!((*sig.get(i, j) - *oracle.get(i, j)).norm() < 1e-12);
            }
        }
        assert!(composite_sigma(&rm, &[pts[0], pts[1], pts[0]]).is_err());
    }
}
