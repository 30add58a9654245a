use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::riemann::{parse_complex, HyperellipticCurve};

#[derive(Clone, Debug, PartialEq)]
pub enum Deformation {
    /// Branch points `i` and `j` approach their midpoint `m` as
    /// `m ∓ √t·u`, with `u` the unit vector from `i` to `j`. At `t = 1` the
    /// pair sits at unit distance from `m`.
    Collide { pair: (usize, usize) },
    /// Branch point `index` moves to `λ + t·direction`.
    Move { index: usize, direction: Complex64 },
}

/// One-parameter family of hyperelliptic curves sampled on `t_grid`.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub base: HyperellipticCurve,
    pub deformation: Deformation,
    pub t_grid: Vec<f64>,
}

impl FamilySpec {
    pub fn new(base: HyperellipticCurve, deformation: Deformation, t_grid: Vec<f64>) -> Result<Self> {
        let n = base.finite_branch_points().len();
        match deformation {
            Deformation::Collide { pair: (i, j) } => {
                if i == j || i >= n || j >= n {
                    return Err(Error::Argument(format!("bad collision pair ({i}, {j})")));
                }
                if !t_grid.windows(2).all(|w| w[1] < w[0]) {
                    return Err(Error::Argument("t_grid must be strictly decreasing".into()));
                }
            }
            Deformation::Move { index, .. } => {
                if index >= n {
                    return Err(Error::Argument(format!("no branch point {index}")));
                }
            }
        }
        if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Argument("t_grid must be non-empty and positive".into()));
        }
        let spec = Self { base, deformation, t_grid };
        for &t in &spec.t_grid {
            spec.curve_at(t)?;
        }
        Ok(spec)
    }

    /// Midpoint and unit direction of a colliding pair.
    pub fn collision_frame(&self) -> Option<(Complex64, Complex64)> {
        match self.deformation {
            Deformation::Collide { pair: (i, j) } => {
                let b = self.base.finite_branch_points();
                let m = (b[i] + b[j]) * 0.5;
                let d = b[j] - b[i];
                Some((m, d / d.norm()))
            }
            Deformation::Move { .. } => None,
        }
    }

    pub fn curve_at(&self, t: f64) -> Result<HyperellipticCurve> {
        let mut pts = self.base.finite_branch_points().to_vec();
        match self.deformation {
            Deformation::Collide { pair: (i, j) } => {
                let (m, u) = self.collision_frame().unwrap();
                pts[i] = m - u * t.sqrt();
                pts[j] = m + u * t.sqrt();
            }
            Deformation::Move { index, direction } => pts[index] += direction * t,
        }
        HyperellipticCurve::new(pts)
            .map_err(|e| Error::Argument(format!("family degenerates at t = {t:e}: {e}")))
    }

    /// The base with the colliding pair removed.
    pub fn normalization(&self) -> Result<HyperellipticCurve> {
        match self.deformation {
            Deformation::Collide { pair: (i, j) } => {
                let pts: Vec<Complex64> = self
                    .base
                    .finite_branch_points()
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, p)| *p)
                    .collect();
                HyperellipticCurve::new(pts)
            }
            Deformation::Move { .. } => Err(Error::Argument("only collisions have a normalization".into())),
        }
    }

    /// Parses `{"base": <curve>, "deformation": {...}, "t_grid": [...]}`.
    pub fn from_json(doc: &Value) -> Result<Self> {
        let base = HyperellipticCurve::from_json(
            doc.get("base").ok_or_else(|| Error::Parse("family needs \"base\"".into()))?,
        )?;
        let def = doc
            .get("deformation")
            .ok_or_else(|| Error::Parse("family needs \"deformation\"".into()))?;
        let idx = |v: &Value| -> Result<usize> {
            v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("bad index {v}")))
        };
        let deformation = match def.get("kind").and_then(Value::as_str) {
            Some("collide") => {
                let pair = def
                    .get("pair")
                    .and_then(Value::as_array)
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Parse("\"pair\" must hold two indices".into()))?;
                Deformation::Collide { pair: (idx(&pair[0])?, idx(&pair[1])?) }
            }
            Some("move") => Deformation::Move {
                index: idx(def.get("index").unwrap_or(&Value::Null))?,
                direction: parse_complex(def.get("direction").unwrap_or(&Value::Null))?,
            },
            other => return Err(Error::Parse(format!("unknown deformation kind {other:?}"))),
        };
        let t_grid = doc
            .get("t_grid")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("family needs a \"t_grid\" array".into()))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| Error::Parse(format!("bad t value {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, deformation, t_grid)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        let deformation = match self.deformation {
            Deformation::Collide { pair: (i, j) } => json!({"kind": "collide", "pair": [i, j]}),
            Deformation::Move { index, direction } => {
                json!({"kind": "move", "index": index, "direction": [direction.re, direction.im]})
            }
        };
        json!({"base": self.base.to_json(), "deformation": deformation, "t_grid": self.t_grid})
    }

    /// Log-spaced decreasing grid from `t_max` to `t_min`.
    pub fn log_grid(t_max: f64, t_min: f64, count: usize) -> Vec<f64> {
        let (a, b) = (t_max.ln(), t_min.ln());
        (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> FamilySpec {
        let base = HyperellipticCurve::from_real(&[-1.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        FamilySpec::new(base, Deformation::Collide { pair: (0, 1) }, FamilySpec::log_grid(1e-2, 1e-5, 7))
            .unwrap()
    }

    #[test]
    fn collision_places_pair_at_plus_minus_root_t() {
        let f = example();
        let c = f.curve_at(1e-4).unwrap();
        assert!((c.finite_branch_points()[0] - Complex64::new(-1e-2, 0.0)).norm() < 1e-15);
        assert!((c.finite_branch_points()[1] - Complex64::new(1e-2, 0.0)).norm() < 1e-15);
        assert_eq!(f.normalization().unwrap().finite_branch_points().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let f = example();
        let g = FamilySpec::from_json(&f.to_json()).unwrap();
        assert_eq!(g.deformation, f.deformation);
        assert_eq!(g.t_grid, f.t_grid);
        assert_eq!(g.base, f.base);
    }

    #[test]
    fn increasing_grid_is_rejected_for_collisions() {
        let base = HyperellipticCurve::from_real(&[-1.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(FamilySpec::new(base, Deformation::Collide { pair: (0, 1) }, vec![1e-5, 1e-3]).is_err());
    }
}
