use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::riemann::parse_complex;

/// Relative symmetry tolerance for user-supplied matrices.
const SYMMETRY_TOL: f64 = 1e-12;

/// A point of the Siegel upper half space: `T` symmetric with `Im T ≻ 0`.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    t: CMatrix,
    /// Overrides the automatic summation radius of theta constants.
    pub truncation: Option<usize>,
}

impl SiegelPoint {
    pub fn new(t: CMatrix) -> Result<Self> {
        if t.nrows() == 0 || t.nrows() != t.ncols() {
            return Err(Error::Argument("T must be a non-empty square matrix".into()));
        }
        let asym = linalg::asymmetry(&t);
        if asym > SYMMETRY_TOL * linalg::frobenius(&t).max(1.0) {
            return Err(Error::Domain(format!("T is not symmetric (|T - T^T| = {asym:e})")));
        }
        let t = (&t + t.transpose()) * Complex64::new(0.5, 0.0);
        let lam = linalg::min_imag_eigenvalue(&t);
        if !(lam > 0.0) {
            return Err(Error::Domain(format!(
                "Im T is not positive definite (smallest eigenvalue {lam:e})"
            )));
        }
        Ok(Self { t, truncation: None })
    }

    pub fn degree(&self) -> usize {
        self.t.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn min_imag_eigenvalue(&self) -> f64 {
        linalg::min_imag_eigenvalue(&self.t)
    }

    /// Degree-one point `τ`.
    pub fn scalar(tau: Complex64) -> Result<Self> {
        Self::new(CMatrix::from_element(1, 1, tau))
    }

    /// `diag(τ, i·t)`, the point at which the Φ-operator takes its limit.
    pub fn block_with_cusp(&self, t: f64) -> Result<Self> {
        let g = self.degree();
        let mut m = CMatrix::zeros(g + 1, g + 1);
        m.view_mut((0, 0), (g, g)).copy_from(&self.t);
        m[(g, g)] = Complex64::new(0.0, t);
        Self::new(m)
    }

    /// `T + Δ` for a symmetric `Δ`.
    pub fn perturbed(&self, delta: &CMatrix) -> Result<Self> {
        Self::new(&self.t + delta)
    }

    /// Random point: real part uniform in `[−½, ½]`, imaginary part
    /// `min_imag·I + A Aᵀ / g` with `A` uniform in `[−½, ½]`.
    pub fn random<R: Rng>(rng: &mut R, g: usize, min_imag: f64) -> Result<Self> {
        let x = nalgebra::DMatrix::<f64>::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
        let a = nalgebra::DMatrix::<f64>::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
        let y = &a * a.transpose() / g as f64 + nalgebra::DMatrix::identity(g, g) * min_imag;
        let t = CMatrix::from_fn(g, g, |i, j| {
            Complex64::new(0.5 * (x[(i, j)] + x[(j, i)]), y[(i, j)])
        });
        Self::new(t)
    }

    /// Parses `{"g": 4, "T": [[[re, im], ...], ...]}`.
    pub fn from_json(doc: &Value) -> Result<Self> {
        let rows = doc
            .get("T")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("Siegel point needs a \"T\" array".into()))?;
        let g = rows.len();
        if let Some(declared) = doc.get("g") {
            if declared.as_u64() != Some(g as u64) {
                return Err(Error::Parse(format!("\"g\" = {declared} but T has {g} rows")));
            }
        }
        let mut t = CMatrix::zeros(g, g);
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|r| r.len() == g)
                .ok_or_else(|| Error::Parse(format!("row {i} of T must have {g} entries")))?;
            for (j, v) in row.iter().enumerate() {
                t[(i, j)] = parse_complex(v)?;
            }
        }
        Self::new(t)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        let g = self.degree();
        let rows: Vec<Value> = (0..g)
            .map(|i| {
                Value::Array((0..g).map(|j| json!([self.t[(i, j)].re, self.t[(i, j)].im])).collect())
            })
            .collect();
        json!({ "g": g, "T": rows })
    }
}
