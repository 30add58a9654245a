use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dimension of Sym² of an `n`-dimensional space.
pub fn sym2_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Quadratic polynomial in `v_1..v_n` with exact coefficients.
///
/// Keys are unordered pairs stored as `(k, l)` with `1 <= k <= l <= n`; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SymTensor {
    n: usize,
    coeffs: BTreeMap<(usize, usize), BigRational>,
}

impl SymTensor {
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: BTreeMap::new() }
    }

    /// The monomial `v_k v_l` (or `v_k²` when `k == l`).
    pub fn monomial(n: usize, k: usize, l: usize) -> Result<Self> {
        let mut t = Self::zero(n);
        t.add_term(k, l, BigRational::from_integer(1.into()))?;
        Ok(t)
    }

    /// `p₂ = Σ_j v_j²`.
    pub fn power_sum2(n: usize) -> Self {
        let mut t = Self::zero(n);
        for j in 1..=n {
            t.coeffs.insert((j, j), BigRational::from_integer(1.into()));
        }
        t
    }

    /// `e₁ · v_i` where `e₁ = v_1 + … + v_n`.
    pub fn e1_times(n: usize, i: usize) -> Result<Self> {
        let mut t = Self::zero(n);
        for j in 1..=n {
            t.add_term(i, j, BigRational::from_integer(1.into()))?;
        }
        Ok(t)
    }

    /// Monomial basis of Sym²V in the fixed order (1,1),(1,2),…,(1,n),(2,2),…
    pub fn basis(n: usize) -> Vec<SymTensor> {
        Self::pairs(n)
            .map(|(k, l)| Self::monomial(n, k, l).expect("pair in range"))
            .collect()
    }

    fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
        (1..=n).flat_map(move |k| (k..=n).map(move |l| (k, l)))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, k: usize, l: usize, c: BigRational) -> Result<()> {
        if k == 0 || l == 0 || k > self.n || l > self.n {
            return Err(Error::Argument(format!(
                "index pair ({k},{l}) outside 1..={}",
                self.n
            )));
        }
        let key = if k <= l { (k, l) } else { (l, k) };
        let entry = self.coeffs.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
        Ok(())
    }

    /// Coefficient of the monomial `v_k v_l`.
    pub fn coeff(&self, k: usize, l: usize) -> BigRational {
        let key = if k <= l { (k, l) } else { (l, k) };
        self.coeffs.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &BigRational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Monomial coefficients in basis order.
    pub fn monomial_coords(&self) -> Vec<BigRational> {
        Self::pairs(self.n).map(|(k, l)| self.coeff(k, l)).collect()
    }

    /// Upper-triangle entries of the matrix with `xᵀMx = self(x)`.
    pub fn matrix_coords(&self) -> Vec<BigRational> {
        let half = BigRational::new(1.into(), 2.into());
        Self::pairs(self.n)
            .map(|(k, l)| {
                let c = self.coeff(k, l);
                if k == l {
                    c
                } else {
                    c * &half
                }
            })
            .collect()
    }

    pub fn to_matrix(&self) -> SymMatrix<BigRational> {
        let n = self.n;
        let half = BigRational::new(1.into(), 2.into());
        let mut entries = vec![BigRational::zero(); n * n];
        for (&(k, l), c) in &self.coeffs {
            if k == l {
                entries[(k - 1) * n + (k - 1)] = c.clone();
            } else {
                let v = c * &half;
                entries[(k - 1) * n + (l - 1)] = v.clone();
                entries[(l - 1) * n + (k - 1)] = v;
            }
        }
        SymMatrix { g: n, entries }
    }

    /// Image under the linear map `v_i ↦ vectors[i-1]` into Sym² of the
    /// target space.
    pub fn push_forward(&self, vectors: &[Vec<BigRational>]) -> Result<SymTensor> {
        if vectors.len() != self.n {
            return Err(Error::Argument(format!(
                "need {} image vectors, got {}",
                self.n,
                vectors.len()
            )));
        }
        let g = vectors.first().map(|v| v.len()).unwrap_or(0);
        if vectors.iter().any(|v| v.len() != g) {
            return Err(Error::Argument("image vectors have mixed dimensions".into()));
        }
        let mut out = SymTensor::zero(g);
        for (&(k, l), c) in &self.coeffs {
            let a = &vectors[k - 1];
            let b = &vectors[l - 1];
            for p in 0..g {
                if a[p].is_zero() && b[p].is_zero() {
                    continue;
                }
                for r in 0..g {
                    let prod = &a[p] * &b[r];
                    if !prod.is_zero() {
                        out.add_term(p + 1, r + 1, c * prod)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(k, l), c)| {
                if k == l {
                    format!("{c}*v{k}^2")
                } else {
                    format!("{c}*v{k}v{l}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &SymTensor {
    type Output = SymTensor;
    fn add(self, rhs: &SymTensor) -> SymTensor {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = self.clone();
        for (&(k, l), c) in &rhs.coeffs {
            out.add_term(k, l, c.clone()).expect("same dimension");
        }
        out
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: &SymTensor) -> SymTensor {
        self + &(-rhs)
    }
}

impl Neg for &SymTensor {
    type Output = SymTensor;
    fn neg(self) -> SymTensor {
        SymTensor {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Mul<&BigRational> for &SymTensor {
    type Output = SymTensor;
    fn mul(self, rhs: &BigRational) -> SymTensor {
        self.scale(rhs)
    }
}

/// Scalar types a [`SymMatrix`] can hold.
pub trait SymScalar: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn to_complex(&self) -> Complex64;
    fn symmetric_match(a: &Self, b: &Self) -> bool;
}

impl SymScalar for BigRational {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn symmetric_match(a: &Self, b: &Self) -> bool {
        a == b
    }
}

impl SymScalar for Complex64 {
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn symmetric_match(a: &Self, b: &Self) -> bool {
        let scale = a.norm().max(b.norm()).max(1e-300);
        (a - b).norm() <= 1e-12 * scale
    }
}

/// Symmetric `g×g` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    g: usize,
    entries: Vec<T>,
}

impl<T: SymScalar> SymMatrix<T> {
    /// Builds from row-major entries; rejects non-symmetric input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let g = rows.len();
        if rows.iter().any(|r| r.len() != g) {
            return Err(Error::Argument("matrix is not square".into()));
        }
        for p in 0..g {
            for q in (p + 1)..g {
                if !T::symmetric_match(&rows[p][q], &rows[q][p]) {
                    return Err(Error::Argument(format!("entries ({p},{q}) and ({q},{p}) differ")));
                }
            }
        }
        Ok(Self { g, entries: rows.into_iter().flatten().collect() })
    }

    pub(crate) fn from_fn(g: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(g * g);
        for p in 0..g {
            for q in 0..g {
                entries.push(if q >= p { f(p, q) } else { f(q, p) });
            }
        }
        Self { g, entries }
    }

    pub fn size(&self) -> usize {
        self.g
    }

    pub fn get(&self, p: usize, q: usize) -> &T {
        &self.entries[p * self.g + q]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.g).map(|r| r.to_vec()).collect()
    }

    /// Entries `(p, q)` with `p <= q`, row by row.
    pub fn upper_triangle(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(sym2_dim(self.g));
        for p in 0..self.g {
            for q in p..self.g {
                out.push(self.get(p, q).clone());
            }
        }
        out
    }

    pub fn to_complex(&self) -> SymMatrix<Complex64> {
        SymMatrix {
            g: self.g,
            entries: self.entries.iter().map(|e| e.to_complex()).collect(),
        }
    }
}

impl SymMatrix<BigRational> {
    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for p in 0..self.g {
            for q in 0..self.g {
                acc += self.get(p, q) * &v[p] * &v[q];
            }
        }
        acc
    }

    /// `trace(self · other)`, the pairing of a quadric with a tangent tensor.
    pub fn trace_pairing(&self, other: &SymMatrix<BigRational>) -> BigRational {
        let mut acc = BigRational::zero();
        for p in 0..self.g {
            for q in 0..self.g {
                acc += self.get(p, q) * other.get(q, p);
            }
        }
        acc
    }
}

impl SymMatrix<Complex64> {
    pub fn trace_pairing(&self, other: &SymMatrix<Complex64>) -> Complex64 {
        let mut acc = Complex64::zero();
        for p in 0..self.g {
            for q in 0..self.g {
                acc += self.get(p, q) * other.get(q, p);
            }
        }
        acc
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..self.g {
            for q in 0..self.g {
                worst = worst.max((self.get(p, q) - self.get(q, p)).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn basis_has_sym2_dimension() {
        for n in 1..8 {
            assert_eq!(SymTensor::basis(n).len(), sym2_dim(n));
        }
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        assert!(SymTensor::monomial(3, 0, 1).is_err());
        assert!(SymTensor::monomial(3, 1, 4).is_err());
    }

    #[test]
    fn arithmetic_closes_and_cancels() {
        let a = SymTensor::monomial(3, 1, 2).unwrap();
        let b = SymTensor::monomial(3, 2, 1).unwrap();
        assert!((&a - &b).is_zero());
        let two = &a + &b;
        assert_eq!(two.coeff(1, 2), q(2, 1));
        assert_eq!(two.scale(&q(1, 2)), a);
    }

    #[test]
    fn matrix_form_reproduces_polynomial() {
        // p₂ - v1 v2 evaluated at x = (1, 2, 3) is 14 - 2 = 12.
        let t = &SymTensor::power_sum2(3) - &SymTensor::monomial(3, 1, 2).unwrap();
        let m = t.to_matrix();
        assert_eq!(m.quadratic_form(&[q(1, 1), q(2, 1), q(3, 1)]), q(12, 1));
    }

    #[test]
    fn symmetric_matrix_rejects_asymmetry() {
        let rows = vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(1, 1)]];
        assert!(SymMatrix::from_rows(rows).is_err());
    }
}
