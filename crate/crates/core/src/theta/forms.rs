use num_complex::Complex64;
use serde::Serialize;

use super::constants::{theta_constants, ThetaCharacteristic, ThetaTable};
use super::point::SiegelPoint;
use crate::error::{Error, Result};

/// Theta series of rank-8 and rank-16 even unimodular lattices expressed
/// through theta constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ThetaSeries {
    /// `Θ_{E₈} = 2^{−g} Σ_even θ⁸`.
    E8,
    /// `Θ_{E₈ ⊕ E₈} = Θ_{E₈}²`.
    E8Squared,
    /// `Θ_{D₁₆⁺} = 2^{−g} Σ_even θ¹⁶`.
    D16Plus,
}

fn series_from_table(family: ThetaSeries, table: &ThetaTable) -> Complex64 {
    let norm = 0.5f64.powi(table.g as i32);
    let evens = table.even_values();
    match family {
        ThetaSeries::E8 => evens.iter().map(|t| t.powu(8)).sum::<Complex64>() * norm,
        ThetaSeries::E8Squared => (evens.iter().map(|t| t.powu(8)).sum::<Complex64>() * norm).powu(2),
        ThetaSeries::D16Plus => evens.iter().map(|t| t.powu(16)).sum::<Complex64>() * norm,
    }
}

pub fn theta_series_via_constants(family: ThetaSeries, t: &SiegelPoint, tol: f64) -> Result<Complex64> {
    Ok(series_from_table(family, &theta_constants(t, tol)?))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SchottkyValue {
    pub value: Complex64,
    pub e8_squared: Complex64,
    pub d16_plus: Complex64,
    /// Larger modulus of the two terms.
    pub scale: f64,
    /// `|value| / scale`.
    pub relative: f64,
}

/// `F = Θ_{E₈⊕E₈} − Θ_{D₁₆⁺}` with the size of the two terms for reference.
pub fn schottky_form(t: &SiegelPoint, tol: f64) -> Result<SchottkyValue> {
    let table = theta_constants(t, tol)?;
    let e8_squared = series_from_table(ThetaSeries::E8Squared, &table);
    let d16_plus = series_from_table(ThetaSeries::D16Plus, &table);
    let value = e8_squared - d16_plus;
    let scale = e8_squared.norm().max(d16_plus.norm());
    Ok(SchottkyValue { value, e8_squared, d16_plus, scale, relative: value.norm() / scale })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiResult {
    pub value: Complex64,
    pub t_list: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `|F(t_{k+1}) − F(t_k)|`.
    pub differences: Vec<f64>,
}

/// Evaluates a degree-`g+1` form at `diag(τ, i·t)` along `t_list` and
/// returns the last value.
///
/// The sequence counts as converged when every difference is no larger than
/// its predecessor or lies below `noise_floor`.
pub fn siegel_phi<F>(form: F, tau: &SiegelPoint, t_list: &[f64], noise_floor: f64) -> Result<PhiResult>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    if t_list.len() < 2 || t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("t_list must be strictly increasing with at least two values".into()));
    }
    if *t_list.last().unwrap() < 10.0 {
        return Err(Error::Argument("the last t must be at least 10".into()));
    }
    let values = t_list
        .iter()
        .map(|&t| form(&tau.block_with_cusp(t)?))
        .collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let settled = differences
        .windows(2)
        .all(|w| w[1] <= w[0] || w[1] <= noise_floor);
    if !settled {
        return Err(Error::Diagnostic(format!(
            "Φ-operator sequence does not settle: differences {differences:?}"
        )));
    }
    Ok(PhiResult { value: *values.last().unwrap(), t_list: t_list.to_vec(), values, differences })
}

/// `j(τ) = 32 (θ₂⁸ + θ₃⁸ + θ₄⁸)³ / (θ₂ θ₃ θ₄)⁸`.
pub fn j_invariant(tau: &SiegelPoint, tol: f64) -> Result<Complex64> {
    if tau.degree() != 1 {
        return Err(Error::Domain("j-invariant needs a degree-one point".into()));
    }
    let table = theta_constants(tau, tol)?;
    let th = |e: u8, d: u8| table.get(&ThetaCharacteristic { eps: vec![e], delta: vec![d] });
    let (t2, t3, t4) = (th(1, 0), th(0, 0), th(0, 1));
    let s = t2.powu(8) + t3.powu(8) + t4.powu(8);
    Ok(32.0 * s.powu(3) / (t2 * t3 * t4).powu(8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `j` from the q-expansion `1/q + 744 + 196884 q + …` truncated far out
    /// (coefficients from the Eisenstein-series formula).
    fn j_by_eisenstein(tau: Complex64) -> Complex64 {
        let q = (c(0.0, 2.0 * std::f64::consts::PI) * tau).exp();
        let sigma = |n: u64, k: u32| (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(k as i32)).sum::<f64>();
        let mut e4 = c(1.0, 0.0);
        let mut e6 = c(1.0, 0.0);
        let mut qn = c(1.0, 0.0);
        for n in 1..200u64 {
            qn *= q;
            e4 += 240.0 * sigma(n, 3) * qn;
            e6 -= 504.0 * sigma(n, 5) * qn;
        }
        1728.0 * e4.powu(3) / (e4.powu(3) - e6.powu(2))
    }

    #[test]
    fn j_matches_eisenstein_series() {
        for tau in [c(0.0, 1.0), c(0.3, 0.9), c(-0.45, 1.7)] {
            let j = j_invariant(&SiegelPoint::scalar(tau).unwrap(), 1e-16).unwrap();
            let oracle = j_by_eisenstein(tau);
            assert!((j - oracle).norm() < 1e-9 * oracle.norm(), "{tau}: {j} vs {oracle}");
        }
    }

    #[test]
    fn phi_of_constant_form_is_one() {
        let tau = SiegelPoint::scalar(c(0.1, 1.1)).unwrap();
        let r = siegel_phi(|_| Ok(c(1.0, 0.0)), &tau, &[2.0, 5.0, 10.0], 0.0).unwrap();
        assert_eq!(r.value, c(1.0, 0.0));
        assert!(r.differences.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn phi_rejects_bad_t_lists() {
        let tau = SiegelPoint::scalar(c(0.1, 1.1)).unwrap();
        assert!(siegel_phi(|_| Ok(c(1.0, 0.0)), &tau, &[2.0, 5.0], 0.0).is_err());
        assert!(siegel_phi(|_| Ok(c(1.0, 0.0)), &tau, &[12.0, 11.0], 0.0).is_err());
    }

    #[test]
    fn schottky_vanishes_in_degree_two() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let t = SiegelPoint::random(&mut rng, 2, 0.7).unwrap();
        let f = schottky_form(&t, 1e-16).unwrap();
        assert!(f.relative < 1e-10, "{f:?}");
    }
}
