use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Relative separation below which two branch points count as coincident.
pub const MIN_RELATIVE_SEPARATION: f64 = 1e-10;

/// `y² = ∏ (x − λ_i)` over the finite branch points; when their number is
/// odd the point at infinity is a branch point as well.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperellipticCurve {
    finite: Vec<Complex64>,
}

/// Which sheet `y = ±√f(x)` a point lies on, relative to the principal root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

/// A finite point on the curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvePoint {
    /// The ramification point over the finite branch point with this index
    /// (position in the curve's branch-point list).
    Branch(usize),
    /// `(x, ±√f(x))` with `x` off the branch locus.
    Regular { x: Complex64, sheet: Sheet },
}

impl CurvePoint {
    pub fn regular(x: Complex64, sheet: Sheet) -> Self {
        CurvePoint::Regular { x, sheet }
    }
}

impl HyperellipticCurve {
    /// Curve from its finite branch points. An odd count means infinity is
    /// also a branch point.
    pub fn new(finite: Vec<Complex64>) -> Result<Self> {
        let total = finite.len() + finite.len() % 2;
        if finite.len() < 3 || total < 4 {
            return Err(Error::Argument(format!(
                "need at least 3 finite branch points, got {}",
                finite.len()
            )));
        }
        if finite.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Argument("branch points must be finite numbers".into()));
        }
        let curve = Self { finite };
        curve.check_separation()?;
        Ok(curve)
    }

    /// Curve with an explicitly listed branch point at infinity; the finite
    /// count must then be odd.
    pub fn with_infinity(finite: Vec<Complex64>) -> Result<Self> {
        if finite.len() % 2 == 0 {
            return Err(Error::Argument(
                "with a branch point at infinity the finite count must be odd".into(),
            ));
        }
        Self::new(finite)
    }

    /// Real branch points, convenience for tests and examples.
    pub fn from_real(points: &[f64]) -> Result<Self> {
        Self::new(points.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    fn check_separation(&self) -> Result<()> {
        let diam = self.diameter().max(1.0);
        let sep = self.min_separation();
        if sep <= MIN_RELATIVE_SEPARATION * diam {
            return Err(Error::Conditioning(format!(
                "branch points separated by {sep:e}, diameter {diam:e}"
            )));
        }
        Ok(())
    }

    pub fn finite_branch_points(&self) -> &[Complex64] {
        &self.finite
    }

    pub fn has_infinity(&self) -> bool {
        self.finite.len() % 2 == 1
    }

    pub fn genus(&self) -> usize {
        (self.finite.len() - 1) / 2
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.finite.iter().enumerate() {
            for b in &self.finite[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn min_separation(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.finite.iter().enumerate() {
            for b in &self.finite[i + 1..] {
                d = d.min((a - b).norm());
            }
        }
        d
    }

    /// `f(x) = ∏ (x − λ_i)`.
    pub fn poly(&self, x: Complex64) -> Complex64 {
        self.finite.iter().map(|l| x - l).product()
    }

    /// `y` on the requested sheet at a regular point.
    pub fn y_at(&self, x: Complex64, sheet: Sheet) -> Complex64 {
        self.poly(x).sqrt() * sheet.sign()
    }

    /// Index of the finite branch point within `tol` of `x`, if any.
    pub fn branch_index_near(&self, x: Complex64, tol: f64) -> Option<usize> {
        self.finite.iter().position(|l| (l - x).norm() <= tol)
    }

    pub fn x_of(&self, p: &CurvePoint) -> Result<Complex64> {
        match *p {
            CurvePoint::Branch(i) => self
                .finite
                .get(i)
                .copied()
                .ok_or_else(|| Error::Argument(format!("no finite branch point with index {i}"))),
            CurvePoint::Regular { x, .. } => Ok(x),
        }
    }

    /// Same curve with branch point `index` replaced.
    pub fn with_moved_point(&self, index: usize, to: Complex64) -> Result<Self> {
        let mut finite = self.finite.clone();
        *finite
            .get_mut(index)
            .ok_or_else(|| Error::Argument(format!("branch index {index} out of range")))? = to;
        Self::new(finite)
    }

    /// Parses `{"type":"hyperelliptic","branch_points":[[re,im],...]}`, with
    /// the string `"inf"` allowed once in place of a pair.
    pub fn from_json(doc: &Value) -> Result<Self> {
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::Parse("curve document must be an object".into()))?;
        match obj.get("type").and_then(Value::as_str) {
            Some("hyperelliptic") => {}
            other => return Err(Error::Parse(format!("unsupported curve type {other:?}"))),
        }
        let pts = obj
            .get("branch_points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing branch_points array".into()))?;
        let mut finite = Vec::with_capacity(pts.len());
        let mut infinities = 0;
        for p in pts {
            if p.as_str() == Some("inf") {
                infinities += 1;
                continue;
            }
            finite.push(parse_complex(p)?);
        }
        match infinities {
            0 => Self::new(finite),
            1 => Self::with_infinity(finite),
            _ => Err(Error::Parse("\"inf\" may appear at most once".into())),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        let mut pts: Vec<Value> =
            self.finite.iter().map(|z| serde_json::json!([z.re, z.im])).collect();
        if self.has_infinity() {
            pts.push(Value::String("inf".into()));
        }
        serde_json::json!({ "type": "hyperelliptic", "branch_points": pts })
    }
}

/// `[re, im]` or a bare real number.
pub fn parse_complex(v: &Value) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(Error::Parse(format!("bad complex number {v}"))),
        },
        _ => Err(Error::Parse(format!("expected [re, im], got {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_and_infinity() {
        let c = HyperellipticCurve::from_real(&[0.0, 1.0, -1.0]).unwrap();
        assert_eq!(c.genus(), 1);
        assert!(c.has_infinity());
        let c = HyperellipticCurve::from_real(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(c.genus(), 2);
        assert!(!c.has_infinity());
    }

    #[test]
    fn coincident_points_are_rejected() {
        let e = HyperellipticCurve::from_real(&[0.0, 1.0, 1.0 + 1e-13, 3.0]).unwrap_err();
        assert!(matches!(e, Error::Conditioning(_)));
        assert!(HyperellipticCurve::from_real(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn json_round_trip_with_infinity() {
        let c = HyperellipticCurve::from_json_str(
            r#"{"type":"hyperelliptic","branch_points":[[0,0],[1,0],[-1,0],"inf"]}"#,
        )
        .unwrap();
        assert_eq!(c.finite_branch_points().len(), 3);
        assert_eq!(HyperellipticCurve::from_json(&c.to_json()).unwrap(), c);
        assert!(HyperellipticCurve::from_json_str(
            r#"{"type":"hyperelliptic","branch_points":[[0,0],[1,0],[2,0],[3,0],"inf"]}"#
        )
        .is_err());
        assert!(HyperellipticCurve::from_json_str(r#"{"type":"quartic","branch_points":[]}"#).is_err());
    }
}
