use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::par;
use crate::riemann::{
    period_matrix_with, CurvePoint, HyperellipticCurve, PeriodLayout, PeriodOptions, Sheet,
};

/// Default step sizes, as fractions of the distance from the moving branch
/// point to its nearest neighbour.
pub const DEFAULT_STEPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

#[derive(Clone, Debug)]
pub struct RauchOptions {
    pub steps: Vec<f64>,
    pub precision: f64,
}

impl Default for RauchOptions {
    fn default() -> Self {
        Self { steps: DEFAULT_STEPS.to_vec(), precision: 1e-13 }
    }
}

/// Central differences and their Richardson extrapolations; `levels[0]`
/// holds one entry per step, each later level one fewer.
#[derive(Clone, Debug, Serialize)]
pub struct RichardsonTable {
    pub steps: Vec<f64>,
    pub levels: Vec<Vec<CMatrix>>,
    /// `‖D(h_i) − best‖ / ‖D(h_{i+1}) − best‖`, close to 4 for halving.
    pub error_ratios: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationReport {
    pub branch_index: usize,
    /// Extrapolated `dτ/dλ_k`.
    pub fd_matrix: CMatrix,
    /// Second singular value over the first.
    pub rank1_ratio: f64,
    /// Angle (radians) between `fd_matrix` and `w wᵀ`, `w` the normalized
    /// differentials at the branch point against `√(x − λ_k)`.
    pub collinearity_angle: f64,
    /// `c` minimizing `‖fd_matrix − c·w wᵀ‖`.
    pub scalar: Complex64,
    pub asymmetry: f64,
    pub table: RichardsonTable,
}

fn extrapolate(steps: &[f64], d: Vec<CMatrix>) -> Result<RichardsonTable> {
    let mut levels = vec![d];
    let mut order = 2;
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let ratio = steps[i] / steps[i + 1];
            let f = ratio.powi(order);
            next.push((&prev[i + 1] * Complex64::new(f, 0.0) - &prev[i]) / Complex64::new(f - 1.0, 0.0));
        }
        levels.push(next);
        order += 2;
    }
    let best = levels.last().unwrap()[0].clone();
    let error_ratios = levels[0]
        .windows(2)
        .map(|w| linalg::frobenius(&(&w[0] - &best)) / linalg::frobenius(&(&w[1] - &best)))
        .collect();
    Ok(RichardsonTable { steps: steps.to_vec(), levels, error_ratios })
}

/// Finite-difference check that moving branch point `k` changes `τ` in the
/// rank-one direction `w wᵀ`.
///
/// The homology basis is held fixed (same chart and chain order) while the
/// point moves along the real axis by `±h`.
pub fn rauch_fd_check(curve: &HyperellipticCurve, k: usize, opts: &RauchOptions) -> Result<VariationReport> {
    let finite = curve.finite_branch_points();
    let lk = *finite
        .get(k)
        .ok_or_else(|| Error::Argument(format!("no finite branch point {k}")))?;
    if opts.steps.len() < 2 || opts.steps.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(Error::Argument("steps must be positive and strictly decreasing".into()));
    }
    let local = finite
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, l)| (l - lk).norm())
        .fold(f64::INFINITY, f64::min);
    let layout = PeriodLayout::for_curve(curve);
    let popts = PeriodOptions::with_precision(opts.precision);
    let base = period_matrix_with(curve, &layout, popts)?;

    let hs: Vec<f64> = opts.steps.iter().map(|s| s * local).collect();
    let shifts: Vec<f64> = hs.iter().flat_map(|&h| [h, -h]).collect();
    let taus = par::try_map_slice(&shifts, |&dh| {
        let moved = curve.with_moved_point(k, lk + dh)?;
        if !layout.is_sorted_for(&moved) {
            return Err(Error::Diagnostic(format!("step {dh:e} reorders the branch points")));
        }
        Ok(period_matrix_with(&moved, &layout, popts)?.tau)
    })?;
    let diffs: Vec<CMatrix> = hs
        .iter()
        .enumerate()
        .map(|(i, &h)| (&taus[2 * i] - &taus[2 * i + 1]) / Complex64::new(2.0 * h, 0.0))
        .collect();
    let table = extrapolate(&hs, diffs)?;
    let fd = table.levels.last().unwrap()[0].clone();

    // The table is trustworthy when the last two levels agree better than
    // the raw differences do.
    let top = table.levels.len() - 1;
    if top >= 2 {
        let spread_raw = linalg::frobenius(&(&table.levels[0][0] - &fd));
        let spread_top = linalg::frobenius(&(&table.levels[top - 1][0] - &fd));
        if !(spread_top <= spread_raw) {
            return Err(Error::Diagnostic(format!(
                "Richardson extrapolation diverges: level spreads {spread_raw:e} -> {spread_top:e}"
            )));
        }
    }

    let w = base.normalized_differentials_at(&CurvePoint::Branch(k), Sheet::Plus)?;
    let ww = linalg::outer_sym(&w);
    let s = linalg::singular_values(&fd);
    let ww_norm2: f64 = ww.iter().map(|z| z.norm_sqr()).sum();
    let scalar = ww.iter().zip(fd.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / ww_norm2;
    Ok(VariationReport {
        branch_index: k,
        rank1_ratio: if s.len() > 1 { s[1] / s[0] } else { 0.0 },
        collinearity_angle: linalg::matrix_angle(&fd, &ww),
        scalar,
        asymmetry: linalg::asymmetry(&fd) / linalg::frobenius(&fd),
        fd_matrix: fd,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_quadratic_and_quartic_terms() {
        // D(h) = 1 + h² + h⁴ extrapolates to 1 exactly.
        let steps = [0.1, 0.05, 0.025];
        let d: Vec<CMatrix> = steps
            .iter()
            .map(|h: &f64| CMatrix::from_element(1, 1, Complex64::new(1.0 + h * h + h.powi(4), 0.0)))
            .collect();
        let t = extrapolate(&steps, d).unwrap();
        assert!((t.levels[2][0][(0, 0)] - 1.0).norm() < 1e-14);
        assert!((t.error_ratios[0] - 4.0).abs() < 0.1);
    }

    #[test]
    fn genus_one_derivative_is_rank_one_trivially() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let curve = HyperellipticCurve::new(vec![c(-1.0, 0.2), c(0.1, -0.8), c(1.0, 0.3), c(0.2, 1.4)]).unwrap();
        let r = rauch_fd_check(&curve, 1, &RauchOptions::default()).unwrap();
        assert_eq!(r.rank1_ratio, 0.0);
        assert!(r.collinearity_angle < 1e-6);
    }
}
