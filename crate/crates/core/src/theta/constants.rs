use num_complex::Complex64;
use serde::Serialize;

use super::point::SiegelPoint;
use crate::error::{Error, Result};
use crate::par;

/// Default absolute tail tolerance for theta sums.
pub const DEFAULT_THETA_TOL: f64 = 1e-15;
/// Largest summation radius `‖n‖∞ ≤ N` accepted.
pub const MAX_RADIUS: usize = 60;

/// Characteristic `[ε; δ]` with entries in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ThetaCharacteristic {
    pub eps: Vec<u8>,
    pub delta: Vec<u8>,
}

impl ThetaCharacteristic {
    pub fn new(eps: Vec<u8>, delta: Vec<u8>) -> Result<Self> {
        if eps.len() != delta.len() || eps.is_empty() {
            return Err(Error::Argument("ε and δ must have the same positive length".into()));
        }
        if eps.iter().chain(delta.iter()).any(|&b| b > 1) {
            return Err(Error::Argument("characteristic entries must be 0 or 1".into()));
        }
        Ok(Self { eps, delta })
    }

    /// Characteristic from bit masks; bit `i` is entry `i`.
    pub fn from_bits(g: usize, eps: usize, delta: usize) -> Self {
        let bits = |m: usize| (0..g).map(|i| ((m >> i) & 1) as u8).collect();
        Self { eps: bits(eps), delta: bits(delta) }
    }

    pub fn genus(&self) -> usize {
        self.eps.len()
    }

    /// `ε·δ mod 2`; 0 for even characteristics.
    pub fn parity(&self) -> u8 {
        (self.eps.iter().zip(&self.delta).map(|(a, b)| (a * b) as u32).sum::<u32>() % 2) as u8
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 0
    }

    fn bits(v: &[u8]) -> usize {
        v.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum()
    }
}

/// All `4^g` characteristics, ordered by `(ε, δ)` bit masks.
pub fn all_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    let k = 1usize << g;
    (0..k)
        .flat_map(|e| (0..k).map(move |d| ThetaCharacteristic::from_bits(g, e, d)))
        .collect()
}

/// The `2^{g−1}(2^g + 1)` even characteristics, in the order of
/// [`all_characteristics`].
pub fn even_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    all_characteristics(g).into_iter().filter(|c| c.is_even()).collect()
}

/// Smallest `N` whose shell tail bound is below `tol`.
///
/// Terms with `‖n‖∞ = k` have `|n + ε/2| ≥ k − ½`, so their modulus is at
/// most `exp(−π λ (k − ½)²)` with `λ` the smallest eigenvalue of `Im T`; the
/// shell holds `(2k+1)^g − (2k−1)^g` of them.
pub fn truncation_radius(min_imag: f64, g: usize, tol: f64) -> Result<usize> {
    if !(min_imag > 0.0) {
        return Err(Error::Domain("Im T is not positive definite".into()));
    }
    let shell = |k: usize| ((2 * k + 1) as f64).powi(g as i32) - ((2 * k - 1) as f64).powi(g as i32);
    let term = |k: usize| shell(k) * (-std::f64::consts::PI * min_imag * (k as f64 - 0.5).powi(2)).exp();
    for n in 1..=MAX_RADIUS {
        // Terms decay faster than geometrically once past the peak; bound the
        // remainder by summing a generous window.
        let tail: f64 = (n + 1..n + 200).map(term).sum();
        if tail < tol {
            return Ok(n);
        }
    }
    Err(Error::Truncation(format!(
        "theta sum needs radius above {MAX_RADIUS} (smallest eigenvalue of Im T = {min_imag:e})"
    )))
}

/// All `4^g` theta constants of one point.
#[derive(Clone, Debug)]
pub struct ThetaTable {
    pub g: usize,
    pub radius: usize,
    values: Vec<Complex64>,
}

impl ThetaTable {
    pub fn get(&self, ch: &ThetaCharacteristic) -> Complex64 {
        let e = ThetaCharacteristic::bits(&ch.eps);
        let d = ThetaCharacteristic::bits(&ch.delta);
        self.values[(e << self.g) + d]
    }

    /// Values at the even characteristics, in [`even_characteristics`] order.
    pub fn even_values(&self) -> Vec<Complex64> {
        even_characteristics(self.g).iter().map(|c| self.get(c)).collect()
    }
}

fn radius_for(t: &SiegelPoint, tol: f64) -> Result<usize> {
    match t.truncation {
        Some(n) if n <= MAX_RADIUS => Ok(n),
        Some(n) => Err(Error::Truncation(format!("requested radius {n} exceeds {MAX_RADIUS}"))),
        None => truncation_radius(t.min_imag_eigenvalue(), t.degree(), tol),
    }
}

/// Computes every theta constant of `t` in one pass.
///
/// For fixed `ε` the `δ` dependence of a term is `i^{ε·δ} (−1)^{n·δ}`, so it
/// is enough to sum `exp(πi mᵀ T m)`, `m = n + ε/2`, separately over the
/// `2^g` classes of `n mod 2`.
pub fn theta_constants(t: &SiegelPoint, tol: f64) -> Result<ThetaTable> {
    let g = t.degree();
    let radius = radius_for(t, tol)?;
    let k = 1usize << g;
    let tm = t.matrix();
    let class_sums = par::map_range(k, |e| {
        let shift: Vec<f64> = (0..g).map(|i| 0.5 * ((e >> i) & 1) as f64).collect();
        let mut sums = vec![Complex64::new(0.0, 0.0); k];
        let side = 2 * radius + 1;
        let total = side.pow(g as u32);
        let mut m = vec![0.0; g];
        for idx in 0..total {
            let mut rest = idx;
            let mut class = 0usize;
            for i in 0..g {
                let n = (rest % side) as i64 - radius as i64;
                rest /= side;
                m[i] = n as f64 + shift[i];
                class |= ((n.rem_euclid(2)) as usize) << i;
            }
            let mut q = Complex64::new(0.0, 0.0);
            for i in 0..g {
                let mut row = Complex64::new(0.0, 0.0);
                for j in 0..g {
                    row += tm[(i, j)] * m[j];
                }
                q += row * m[i];
            }
            sums[class] += (Complex64::new(0.0, std::f64::consts::PI) * q).exp();
        }
        sums
    });
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut values = vec![Complex64::new(0.0, 0.0); k * k];
    for e in 0..k {
        for d in 0..k {
            let mut v = Complex64::new(0.0, 0.0);
            for (class, s) in class_sums[e].iter().enumerate() {
                if (class & d).count_ones() % 2 == 0 {
                    v += s;
                } else {
                    v -= s;
                }
            }
            values[(e << g) + d] = v * i_pow[((e & d).count_ones() % 4) as usize];
        }
    }
    Ok(ThetaTable { g, radius, values })
}

/// `θ[ε;δ](T)` by direct summation over the box `‖n‖∞ ≤ N`.
pub fn theta_constant(ch: &ThetaCharacteristic, t: &SiegelPoint, tol: f64) -> Result<Complex64> {
    if ch.genus() != t.degree() {
        return Err(Error::Argument(format!(
            "characteristic of length {} for a degree-{} point",
            ch.genus(),
            t.degree()
        )));
    }
    let g = t.degree();
    let radius = radius_for(t, tol)?;
    let tm = t.matrix();
    let side = 2 * radius + 1;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut m = vec![0.0; g];
    for idx in 0..side.pow(g as u32) {
        let mut rest = idx;
        for i in 0..g {
            m[i] = (rest % side) as f64 - radius as f64 + 0.5 * ch.eps[i] as f64;
            rest /= side;
        }
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                q += tm[(i, j)] * (m[i] * m[j]);
            }
            q += Complex64::new(m[i] * ch.delta[i] as f64, 0.0);
        }
        sum += (Complex64::new(0.0, std::f64::consts::PI) * q).exp();
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn even_counts() {
        for (g, n) in [(1, 3), (2, 10), (3, 36), (4, 136)] {
            assert_eq!(even_characteristics(g).len(), n);
            assert_eq!(n, (1 << (g - 1)) * ((1 << g) + 1));
        }
    }

    #[test]
    fn table_matches_direct_sums() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for g in 1..=3 {
            let t = SiegelPoint::random(&mut rng, g, 0.6).unwrap();
            let table = theta_constants(&t, 1e-15).unwrap();
            for ch in all_characteristics(g) {
                let direct = theta_constant(&ch, &t, 1e-15).unwrap();
                assert!((direct - table.get(&ch)).norm() < 1e-13, "{ch:?}");
            }
        }
    }

    #[test]
    fn radius_grows_as_im_t_shrinks() {
        let a = truncation_radius(2.0, 2, 1e-15).unwrap();
        let b = truncation_radius(0.3, 2, 1e-15).unwrap();
        assert!(a < b);
        assert!(matches!(truncation_radius(1e-5, 4, 1e-15), Err(Error::Truncation(_))));
    }

    #[test]
    fn bad_characteristic_is_rejected() {
        assert!(ThetaCharacteristic::new(vec![0, 2], vec![0, 0]).is_err());
        assert!(ThetaCharacteristic::new(vec![0], vec![0, 0]).is_err());
    }
}
