use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::curve::HyperellipticCurve;
use super::path::Segment;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::par;

/// Default quadrature target for period integrals.
pub const DEFAULT_PRECISION: f64 = 1e-12;
/// Tightest quadrature target accepted.
pub const MIN_PRECISION: f64 = 1e-13;

/// Coordinate chart in which cycles are built.
///
/// Odd-degree models are moved to an even-degree model by `ξ = 1/(x − x₀)`,
/// which sends the branch point at infinity to `ξ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Chart {
    Identity,
    Inversion { x0: Complex64 },
}

/// Which branch point of the user model sits at a chain position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Origin {
    Finite(usize),
    Infinity,
}

/// Chart plus the ordering of branch points along the cycle chain. Fixing a
/// layout and moving branch points continuously moves the homology basis
/// continuously.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodLayout {
    pub chart: Chart,
    pub order: Vec<Origin>,
}

impl PeriodLayout {
    /// Deterministic layout: chain order is lexicographic in `(Re, Im)` of
    /// the chart coordinates.
    pub fn for_curve(curve: &HyperellipticCurve) -> Self {
        let chart = if curve.has_infinity() {
            Chart::Inversion { x0: choose_inversion_centre(curve.finite_branch_points()) }
        } else {
            Chart::Identity
        };
        let mut origins: Vec<Origin> =
            (0..curve.finite_branch_points().len()).map(Origin::Finite).collect();
        if curve.has_infinity() {
            origins.push(Origin::Infinity);
        }
        let mut keyed: Vec<(Complex64, Origin)> = origins
            .into_iter()
            .map(|o| (chart_point(curve, chart, o), o))
            .collect();
        keyed.sort_by(|a, b| {
            a.0.re
                .partial_cmp(&b.0.re)
                .unwrap()
                .then(a.0.im.partial_cmp(&b.0.im).unwrap())
        });
        Self { chart, order: keyed.into_iter().map(|(_, o)| o).collect() }
    }

    /// Branch points in chain order, in chart coordinates.
    pub fn chain_points(&self, curve: &HyperellipticCurve) -> Vec<Complex64> {
        self.order.iter().map(|&o| chart_point(curve, self.chart, o)).collect()
    }

    /// True when the chain order equals the lexicographic order for `curve`.
    pub fn is_sorted_for(&self, curve: &HyperellipticCurve) -> bool {
        let pts = self.chain_points(curve);
        pts.windows(2).all(|w| (w[0].re, w[0].im) <= (w[1].re, w[1].im))
    }
}

fn chart_point(curve: &HyperellipticCurve, chart: Chart, o: Origin) -> Complex64 {
    match (chart, o) {
        (Chart::Identity, Origin::Finite(i)) => curve.finite_branch_points()[i],
        (Chart::Inversion { x0 }, Origin::Finite(i)) => 1.0 / (curve.finite_branch_points()[i] - x0),
        (Chart::Inversion { .. }, Origin::Infinity) => Complex64::new(0.0, 0.0),
        (Chart::Identity, Origin::Infinity) => unreachable!("identity chart has no point at infinity"),
    }
}

fn choose_inversion_centre(pts: &[Complex64]) -> Complex64 {
    let n = pts.len() as f64;
    let centre: Complex64 = pts.iter().sum::<Complex64>() / n;
    let radius = pts.iter().map(|p| (p - centre).norm()).fold(0.0, f64::max).max(1e-3);
    let mut best = (f64::MIN, centre);
    for k in 0..24 {
        let x0 = centre + Complex64::from_polar(radius, std::f64::consts::PI * k as f64 / 12.0);
        let d = pts.iter().map(|p| (p - x0).norm()).fold(f64::INFINITY, f64::min);
        if d > best.0 + 1e-12 {
            best = (d, x0);
        }
    }
    best.1
}

/// One cycle of the chain: the lift of the segment between consecutive
/// branch points, out on `y = sign·canonical` and back on the other sheet.
#[derive(Clone, Debug)]
pub struct ChainCycle {
    pub segment: Segment,
    pub sign: f64,
}

impl ChainCycle {
    /// `y` on the outgoing sheet of this cycle, chart coordinates.
    pub fn y(&self, branch: &[Complex64], x: Complex64) -> Complex64 {
        self.segment.canonical_y(branch, x) * self.sign
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PeriodOptions {
    pub precision: f64,
    /// Lower bound on quadrature nodes per segment; raise it to check node
    /// refinement.
    pub min_nodes: usize,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        Self { precision: DEFAULT_PRECISION, min_nodes: 0 }
    }
}

impl PeriodOptions {
    pub fn with_precision(precision: f64) -> Self {
        Self { precision, ..Self::default() }
    }
}

/// Period data of a hyperelliptic curve.
///
/// `a_periods[(j, i)] = ∮_{a_i} x^j dx / y` and likewise for `b_periods`,
/// in the user's coordinate `x`. The normalized differentials are
/// `ω = A⁻¹ (x^j dx / y)_j`, and `tau = A⁻¹ B`.
#[derive(Clone, Debug)]
pub struct RiemannMatrix {
    pub curve: HyperellipticCurve,
    pub layout: PeriodLayout,
    pub tau: CMatrix,
    pub a_periods: CMatrix,
    pub b_periods: CMatrix,
    pub a_inv: CMatrix,
    /// Quadrature error estimate propagated to `tau`.
    pub error_estimate: f64,
    pub max_nodes: usize,
    pub(crate) chain_points: Vec<Complex64>,
    pub(crate) cycles: Vec<ChainCycle>,
}

impl RiemannMatrix {
    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        linalg::asymmetry(&self.tau) < rel_tol * linalg::frobenius(&self.tau)
    }

    pub fn min_imag_eigenvalue(&self) -> f64 {
        linalg::min_imag_eigenvalue(&self.tau)
    }

    /// Chain cycles in order; `a_i` is cycle `2i`, `b_i` the sum of cycles
    /// `2k + 1` for `k >= i` (0-based).
    pub fn cycles(&self) -> &[ChainCycle] {
        &self.cycles
    }

    /// Branch points in chain order, chart coordinates.
    pub fn chain_points(&self) -> &[Complex64] {
        &self.chain_points
    }
}

/// Period matrix with the deterministic layout of [`PeriodLayout::for_curve`].
pub fn period_matrix(curve: &HyperellipticCurve, precision: f64) -> Result<RiemannMatrix> {
    period_matrix_with(curve, &PeriodLayout::for_curve(curve), PeriodOptions::with_precision(precision))
}

/// Period matrix using a fixed layout (used for perturbations and families).
pub fn period_matrix_with(
    curve: &HyperellipticCurve,
    layout: &PeriodLayout,
    opts: PeriodOptions,
) -> Result<RiemannMatrix> {
    if !(opts.precision >= MIN_PRECISION) {
        return Err(Error::Argument(format!(
            "precision {:e} below the supported {MIN_PRECISION:e}",
            opts.precision
        )));
    }
    let g = curve.genus();
    let pts = layout.chain_points(curve);
    if pts.len() != 2 * g + 2 {
        return Err(Error::Argument("layout does not match the curve".into()));
    }
    let cycles = build_chain(&pts, 2 * g)?;
    // Cycle integrals ∮ ξ^j dξ/η = 2 ∫_segment (outgoing sheet).
    let integrals = par::try_map_slice(&cycles, |c| {
        c.segment
            .integrate(&pts, Complex64::new(c.sign, 0.0), g, opts.precision, opts.min_nodes)
    })?;
    let max_err = integrals.iter().map(|s| 2.0 * s.error).fold(0.0, f64::max);
    let max_nodes = integrals.iter().map(|s| s.nodes).max().unwrap_or(0);
    let cyc = |k: usize, j: usize| integrals[k].values[j] * 2.0;
    let a_int = CMatrix::from_fn(g, g, |j, i| cyc(2 * i, j));
    let b_int = CMatrix::from_fn(g, g, |j, i| {
        (i..g).map(|k| cyc(2 * k + 1, j)).sum::<Complex64>()
    });
    let m = user_basis_change(curve, layout, g);
    let a = &m * a_int;
    let b = &m * b_int;
    let a_inv = linalg::invert(&a)?;
    let tau = &a_inv * &b;
    let error_estimate = max_err
        * linalg::frobenius(&a_inv)
        * linalg::frobenius(&m)
        * (1.0 + linalg::frobenius(&tau))
        * (g as f64);
    let rm = RiemannMatrix {
        curve: curve.clone(),
        layout: layout.clone(),
        tau,
        a_periods: a,
        b_periods: b,
        a_inv,
        error_estimate,
        max_nodes,
        chain_points: pts,
        cycles,
    };
    let asym = linalg::asymmetry(&rm.tau);
    let scale = linalg::frobenius(&rm.tau);
    if !(asym < 1e-6 * scale) {
        return Err(Error::Precision(format!(
            "period matrix asymmetric: |tau - tau^T| = {asym:e}, |tau| = {scale:e}"
        )));
    }
    let lam = rm.min_imag_eigenvalue();
    if !(lam > 0.0) {
        return Err(Error::Diagnostic(format!(
            "Im tau not positive definite (smallest eigenvalue {lam:e})"
        )));
    }
    Ok(rm)
}

/// Chain cycles over the first `count` segments, each oriented so that
/// consecutive cycles meet with intersection number +1.
///
/// Near a shared branch point `P`, the local uniformizer `s` with `s² = x − P`
/// turns both cycles into straight lines through `s = 0`. The incoming cycle
/// runs along direction `−s(x₁)`, the outgoing one along `s(x₂)`; requiring
/// `Im(conj(−s₁)·s₂) > 0` fixes the sign of the next cycle. Since `y ≈ C·s`
/// with the same `C` on both sides, the test reduces to the sign of
/// `Im(conj(y₁)·y₂)`.
pub(crate) fn build_chain(pts: &[Complex64], count: usize) -> Result<Vec<ChainCycle>> {
    let mut cycles: Vec<ChainCycle> = Vec::with_capacity(count);
    for k in 0..count {
        let seg = Segment::new(pts, pts[k], pts[k + 1], Some(k), Some(k + 1));
        let sign = match cycles.last() {
            None => 1.0,
            Some(prev) => {
                let p = pts[k];
                let delta = 1e-6;
                let x1 = p + (pts[k - 1] - p) * delta;
                let x2 = p + (pts[k + 1] - p) * delta;
                let y1 = prev.y(pts, x1);
                let y2 = seg.canonical_y(pts, x2);
                let im = (y1.conj() * y2).im;
                if im == 0.0 {
                    return Err(Error::Diagnostic(format!(
                        "cannot orient chain cycle {k}: tangent directions coincide"
                    )));
                }
                if im < 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        cycles.push(ChainCycle { segment: seg, sign });
    }
    Ok(cycles)
}

/// Matrix `M` with `x^j dx / y = Σ_k M[j][k] ξ^k dξ / η` between the user
/// model and the chart model.
///
/// For `ξ = 1/(x − x₀)`: `y = √K η / ξ^{g+1}` with `K = ∏ (x₀ − λ_i)`, so
/// `x^j dx / y = −K^{-1/2} (x₀ξ + 1)^j ξ^{g−1−j} dξ / η`.
fn user_basis_change(curve: &HyperellipticCurve, layout: &PeriodLayout, g: usize) -> CMatrix {
    match layout.chart {
        Chart::Identity => CMatrix::identity(g, g),
        Chart::Inversion { x0 } => {
            let k: Complex64 = curve.finite_branch_points().iter().map(|l| x0 - l).product();
            let coef = -1.0 / k.sqrt();
            let mut m = DMatrix::from_element(g, g, Complex64::new(0.0, 0.0));
            for j in 0..g {
                let mut binom = 1.0;
                for r in 0..=j {
                    m[(j, g - 1 - j + r)] += coef * binom * x0.powu(r as u32);
                    binom = binom * (j - r) as f64 / (r + 1) as f64;
                }
            }
            m
        }
    }
}

/// Diagnostics bundle for reports.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodDiagnostics {
    pub genus: usize,
    pub asymmetry: f64,
    pub tau_norm: f64,
    pub min_imag_eigenvalue: f64,
    pub error_estimate: f64,
    pub max_nodes: usize,
}

impl RiemannMatrix {
    pub fn diagnostics(&self) -> PeriodDiagnostics {
        PeriodDiagnostics {
            genus: self.genus(),
            asymmetry: linalg::asymmetry(&self.tau),
            tau_norm: linalg::frobenius(&self.tau),
            min_imag_eigenvalue: self.min_imag_eigenvalue(),
            error_estimate: self.error_estimate,
            max_nodes: self.max_nodes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Moves a point of the upper half plane into the standard fundamental
    /// domain of SL(2, Z).
    fn reduce_upper_half(mut t: Complex64) -> Complex64 {
        for _ in 0..1000 {
            t.re -= t.re.round();
            if t.norm_sqr() < 1.0 - 1e-14 {
                t = -1.0 / t;
            } else {
                break;
            }
        }
        t
    }

    #[test]
    fn square_torus_reduces_to_i() {
        let curve = HyperellipticCurve::with_infinity(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rm = period_matrix(&curve, 1e-12).unwrap();
        let t = reduce_upper_half(rm.tau[(0, 0)]);
        assert!((t - c(0.0, 1.0)).norm() < 1e-10, "{t}");
    }

    #[test]
    fn hexagonal_torus_reduces_to_rho() {
        let pts: Vec<Complex64> =
            (0..3).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0)).collect();
        let curve = HyperellipticCurve::with_infinity(pts).unwrap();
        let rm = period_matrix(&curve, 1e-12).unwrap();
        let t = reduce_upper_half(rm.tau[(0, 0)]);
        let rho = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!((t - rho).norm() < 1e-8 || (t - (rho - 1.0)).norm() < 1e-8, "{t}");
    }

    #[test]
    fn even_degree_model_gives_riemann_matrix() {
        let even = HyperellipticCurve::new(vec![c(0.5, 0.1), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)]).unwrap();
        let rm = period_matrix(&even, 1e-12).unwrap();
        assert!(rm.min_imag_eigenvalue() > 0.0);
    }

    #[test]
    fn random_genus_two_and_three_are_riemann_matrices() {
        let sets = [
            vec![c(-2.0, 0.3), c(-0.7, -1.1), c(0.2, 0.5), c(1.1, -0.4), c(2.3, 1.0)],
            vec![c(-2.0, 0.3), c(-0.7, -1.1), c(0.2, 0.5), c(1.1, -0.4), c(2.3, 1.0), c(0.4, 2.2)],
            vec![
                c(-3.0, 0.0), c(-2.0, 1.0), c(-1.0, -0.5), c(0.0, 0.7), c(1.0, -1.2), c(2.0, 0.1),
                c(3.0, 1.5),
            ],
        ];
        for (i, s) in sets.iter().enumerate() {
            let curve = if s.len() % 2 == 1 {
                HyperellipticCurve::with_infinity(s.clone()).unwrap()
            } else {
                HyperellipticCurve::new(s.clone()).unwrap()
            };
            let rm = period_matrix(&curve, 1e-12).unwrap();
            assert!(rm.is_symmetric(1e-10), "set {i}");
            assert!(rm.min_imag_eigenvalue() > 0.0, "set {i}");
        }
    }
}
