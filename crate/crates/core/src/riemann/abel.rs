use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::curve::CurvePoint;
use super::path::Segment;
use super::periods::RiemannMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, CVector};

/// Paths are kept at least this fraction of the smallest branch-point
/// separation away from branch points they do not end on.
const CLEARANCE_FRACTION: f64 = 0.05;
/// Absolute floor relative to the curve diameter.
const MIN_CLEARANCE: f64 = 1e-8;

/// Abel–Jacobi value with its reduction modulo `Z^g + τ Z^g`.
#[derive(Clone, Debug)]
pub struct AbelJacobi {
    pub value: CVector,
    pub reduction: LatticeReduction,
    pub error_estimate: f64,
}

/// `v = (m + τ n) + reduced`, with integer `m`, `n`.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeReduction {
    pub reduced: Vec<Complex64>,
    pub m: Vec<i64>,
    pub n: Vec<i64>,
}

#[derive(Clone, Copy)]
enum Vertex {
    Branch(usize),
    Regular(Complex64),
}

impl Vertex {
    fn x(&self, branch: &[Complex64]) -> Complex64 {
        match *self {
            Vertex::Branch(i) => branch[i],
            Vertex::Regular(x) => x,
        }
    }
    fn index(&self) -> Option<usize> {
        match *self {
            Vertex::Branch(i) => Some(i),
            Vertex::Regular(_) => None,
        }
    }
}

impl RiemannMatrix {
    fn clearance(&self) -> f64 {
        (CLEARANCE_FRACTION * self.curve.min_separation())
            .max(MIN_CLEARANCE * self.curve.diameter().max(1.0))
    }

    /// Polyline from `from` to `to` whose pieces keep clear of other branch
    /// points, detouring through a waypoint when the straight segment does not.
    fn route(&self, from: Vertex, to: Vertex) -> Result<Vec<Vertex>> {
        let branch = self.curve.finite_branch_points();
        let clear = self.clearance();
        let ok = |a: Vertex, b: Vertex| {
            Segment::new(branch, a.x(branch), b.x(branch), a.index(), b.index()).clearance(branch)
                > clear
        };
        if ok(from, to) {
            return Ok(vec![from, to]);
        }
        let (a, b) = (from.x(branch), to.x(branch));
        let mid = (a + b) * 0.5;
        let normal = (b - a) * Complex64::new(0.0, 1.0);
        for scale in [0.25, 0.5, 1.0, 2.0] {
            for side in [1.0, -1.0] {
                let w = Vertex::Regular(mid + normal * (scale * side));
                if branch.iter().all(|l| (l - w.x(branch)).norm() > clear) && ok(from, w) && ok(w, to) {
                    return Ok(vec![from, w, to]);
                }
            }
        }
        Err(Error::Diagnostic(format!(
            "no clear path from {a} to {b} after path deformation"
        )))
    }

    /// Integrates the raw differentials along a polyline. `y_start` fixes the
    /// sheet at a regular start; a branch start takes the canonical sheet.
    /// Returns the integral, the error estimate and `y` at the end.
    fn integrate_polyline(
        &self,
        vertices: &[Vertex],
        y_start: Option<Complex64>,
        precision: f64,
    ) -> Result<(CVector, f64, Complex64)> {
        let branch = self.curve.finite_branch_points();
        let g = self.genus();
        let mut total = CVector::zeros(g);
        let mut err = 0.0;
        let mut y_here = y_start;
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg = Segment::new(branch, a.x(branch), b.x(branch), a.index(), b.index());
            let kappa = match (a, y_here) {
                (Vertex::Regular(x), Some(y)) => y / seg.canonical_y(branch, x),
                (Vertex::Branch(_), _) => Complex64::new(1.0, 0.0),
                (Vertex::Regular(_), None) => {
                    return Err(Error::Argument("regular start needs a sheet".into()))
                }
            };
            let s = seg.integrate(branch, kappa, g, precision, 0)?;
            for j in 0..g {
                total[j] += s.values[j];
            }
            err += s.error;
            y_here = match b {
                Vertex::Regular(x) => Some(kappa * seg.canonical_y(branch, x)),
                Vertex::Branch(_) => None,
            };
        }
        Ok((total, err, y_here.unwrap_or(Complex64::new(0.0, 0.0))))
    }

    /// Raw integral `∫_from^to` from a point to a branch point, starting on
    /// the point's own sheet.
    fn raw_to_branch(&self, from: &CurvePoint, to: usize, precision: f64) -> Result<(CVector, f64)> {
        let (v, y0) = self.vertex_of(from)?;
        let path = self.route(v, Vertex::Branch(to))?;
        let (val, err, _) = self.integrate_polyline(&path, y0, precision)?;
        Ok((val, err))
    }

    fn vertex_of(&self, p: &CurvePoint) -> Result<(Vertex, Option<Complex64>)> {
        match *p {
            CurvePoint::Branch(i) => {
                self.curve.x_of(p)?;
                Ok((Vertex::Branch(i), None))
            }
            CurvePoint::Regular { x, sheet } => {
                let scale = self.curve.diameter().max(1.0);
                if self.curve.branch_index_near(x, 1e-12 * scale).is_some() {
                    return Err(Error::Argument(format!("{x} is a branch point")));
                }
                Ok((Vertex::Regular(x), Some(self.curve.y_at(x, sheet))))
            }
        }
    }

    /// `∫_p^q ω` for the normalized differentials, with its lattice
    /// reduction.
    ///
    /// Regular-to-regular integrals go through a branch point `λ*`, where the
    /// two sheets meet: `∫_p^q = ∫_p^{λ*} − ∫_q^{λ*}`, each leg started on
    /// its own endpoint's sheet.
    pub fn abel_jacobi(&self, p: &CurvePoint, q: &CurvePoint, precision: f64) -> Result<AbelJacobi> {
        let g = self.genus();
        let (raw, err) = match (*p, *q) {
            _ if p == q => (CVector::zeros(g), 0.0),
            (CurvePoint::Branch(i), CurvePoint::Branch(j)) => {
                self.curve.x_of(p)?;
                self.curve.x_of(q)?;
                let path = self.route(Vertex::Branch(i), Vertex::Branch(j))?;
                let (v, e, _) = self.integrate_polyline(&path, None, precision)?;
                (v, e)
            }
            (_, CurvePoint::Branch(j)) => self.raw_to_branch(p, j, precision)?,
            (CurvePoint::Branch(i), _) => {
                let (v, e) = self.raw_to_branch(q, i, precision)?;
                (-v, e)
            }
            _ => {
                let star = self.pick_pivot(p, q)?;
                let (a, ea) = self.raw_to_branch(p, star, precision)?;
                let (b, eb) = self.raw_to_branch(q, star, precision)?;
                (a - b, ea + eb)
            }
        };
        let value = &self.a_inv * raw;
        let reduction = self.reduce_mod_lattice(&value);
        Ok(AbelJacobi {
            value,
            reduction,
            error_estimate: err * linalg::frobenius(&self.a_inv),
        })
    }

    fn pick_pivot(&self, p: &CurvePoint, q: &CurvePoint) -> Result<usize> {
        let branch = self.curve.finite_branch_points();
        let (xp, xq) = (self.curve.x_of(p)?, self.curve.x_of(q)?);
        let clear = self.clearance();
        let mut best: Option<(bool, f64, usize)> = None;
        for (i, l) in branch.iter().enumerate() {
            let straight = Segment::new(branch, xp, *l, None, Some(i)).clearance(branch) > clear
                && Segment::new(branch, xq, *l, None, Some(i)).clearance(branch) > clear;
            let len = (xp - l).norm() + (xq - l).norm();
            let key = (!straight, len, i);
            if best.map_or(true, |b| (key.0, key.1) < (b.0, b.1)) {
                best = Some(key);
            }
        }
        best.map(|b| b.2).ok_or_else(|| Error::Diagnostic("curve has no finite branch point".into()))
    }

    /// Writes `v = m + τ n + r` with integer `m`, `n` chosen to make `r`
    /// short. Re-reducing `r` returns it unchanged.
    pub fn reduce_mod_lattice(&self, v: &CVector) -> LatticeReduction {
        let g = self.genus();
        let im_tau = linalg::imag_part(&self.tau);
        let re_tau = linalg::real_part(&self.tau);
        let im_v = DMatrix::from_fn(g, 1, |i, _| v[i].im);
        let re_v = DMatrix::from_fn(g, 1, |i, _| v[i].re);
        let n_real = im_tau
            .clone()
            .lu()
            .solve(&im_v)
            .unwrap_or_else(|| DMatrix::zeros(g, 1));
        let m_real = &re_v - &re_tau * &n_real;
        let mut m: Vec<i64> = m_real.iter().map(|x| x.round() as i64).collect();
        let mut n: Vec<i64> = n_real.iter().map(|x| x.round() as i64).collect();
        let residual = |m: &[i64], n: &[i64]| -> CVector {
            let mut r = v.clone();
            for i in 0..g {
                r[i] -= Complex64::new(m[i] as f64, 0.0);
                for k in 0..g {
                    r[i] -= self.tau[(i, k)] * n[k] as f64;
                }
            }
            r
        };
        let mut best = residual(&m, &n);
        // Rounding coordinates is not the nearest lattice point for skewed
        // lattices; polish with unit moves while they shorten the residual.
        if g <= 3 {
            loop {
                let mut improved = false;
                for coord in 0..(2 * g) {
                    for step in [-1i64, 1] {
                        let (mut m2, mut n2) = (m.clone(), n.clone());
                        if coord < g {
                            m2[coord] += step;
                        } else {
                            n2[coord - g] += step;
                        }
                        let r = residual(&m2, &n2);
                        if r.norm() < best.norm() - 1e-15 {
                            best = r;
                            m = m2;
                            n = n2;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        LatticeReduction { reduced: best.iter().copied().collect(), m, n }
    }

    /// Euclidean distance from `v` to the period lattice (after reduction).
    pub fn distance_to_lattice(&self, v: &CVector) -> f64 {
        self.reduce_mod_lattice(v).reduced.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn equal_mod_lattice(&self, v: &CVector, w: &CVector, tol: f64) -> bool {
        self.distance_to_lattice(&(v - w)) < tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::curve::{HyperellipticCurve, Sheet};
    use crate::riemann::periods::period_matrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn genus_two() -> RiemannMatrix {
        let curve = HyperellipticCurve::with_infinity(vec![
            c(-2.0, 0.3),
            c(-0.7, -1.1),
            c(0.2, 0.5),
            c(1.1, -0.4),
            c(2.3, 1.0),
        ])
        .unwrap();
        period_matrix(&curve, 1e-12).unwrap()
    }

    #[test]
    fn branch_differences_are_two_torsion() {
        let rm = genus_two();
        for (i, j) in [(0, 1), (0, 4), (1, 3), (2, 4), (3, 1)] {
            let aj = rm.abel_jacobi(&CurvePoint::Branch(i), &CurvePoint::Branch(j), 1e-12).unwrap();
            let twice = &aj.value * Complex64::new(2.0, 0.0);
            assert!(rm.distance_to_lattice(&twice) < 1e-8, "({i},{j})");
            // A single branch difference is a nonzero 2-torsion point.
            assert!(rm.distance_to_lattice(&aj.value) > 1e-3, "({i},{j})");
        }
    }

    #[test]
    fn reversal_and_empty_path() {
        let rm = genus_two();
        let p = CurvePoint::regular(c(0.3, -2.0), Sheet::Plus);
        let q = CurvePoint::regular(c(-1.5, 1.2), Sheet::Minus);
        assert_eq!(rm.abel_jacobi(&p, &p, 1e-12).unwrap().value.norm(), 0.0);
        let pq = rm.abel_jacobi(&p, &q, 1e-12).unwrap().value;
        let qp = rm.abel_jacobi(&q, &p, 1e-12).unwrap().value;
        assert!(rm.distance_to_lattice(&(pq + qp)) < 1e-9);
    }

    #[test]
    fn derivative_in_the_endpoint_is_the_normalized_differential() {
        let rm = genus_two();
        let p = CurvePoint::regular(c(0.3, -2.0), Sheet::Plus);
        let x = c(-1.0, 1.5);
        let h = 1e-4;
        // Sheet of nearby points continues the sheet at x.
        let y0 = rm.curve.y_at(x, Sheet::Plus);
        let at = |dx: Complex64| {
            let xs = x + dx;
            let sheet = if (rm.curve.y_at(xs, Sheet::Plus) - y0).norm() < y0.norm() { Sheet::Plus } else { Sheet::Minus };
            rm.abel_jacobi(&p, &CurvePoint::regular(xs, sheet), 1e-12).unwrap().value
        };
        // Reduce the difference: the two endpoints may route differently.
        let diff = rm.reduce_mod_lattice(&(at(c(h, 0.0)) - at(c(-h, 0.0)))).reduced;
        let fd = CVector::from_vec(diff) / c(2.0 * h, 0.0);
        let w = rm.normalized_at(x, Sheet::Plus).unwrap();
        assert!((&fd - &w).norm() < 1e-6 * w.norm(), "{fd} vs {w}");
    }

    #[test]
    fn reduction_is_idempotent() {
        let rm = genus_two();
        let v = CVector::from_vec(vec![c(3.7, 5.1), c(-2.2, 4.4)]);
        let r1 = CVector::from_vec(rm.reduce_mod_lattice(&v).reduced);
        let red2 = rm.reduce_mod_lattice(&r1);
        assert!(red2.m.iter().chain(red2.n.iter()).all(|&k| k == 0));
        assert!(rm.equal_mod_lattice(&v, &r1, 1e-10));
    }
}
