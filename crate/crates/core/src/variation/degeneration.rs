use num_complex::Complex64;
use serde::Serialize;

use super::family::{Deformation, FamilySpec};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::par;
use crate::riemann::{
    period_matrix_with, CurvePoint, Origin, PeriodLayout, PeriodOptions, RiemannMatrix, Sheet,
};

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub precision: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { precision: 1e-12 }
    }
}

/// Limit of the off-diagonal periods against the Abel–Jacobi image of the
/// node preimages on the normalization.
#[derive(Clone, Debug, Serialize)]
pub struct AjLimit {
    /// Node location `x = m`.
    pub node: Complex64,
    /// Off-diagonal column at the smallest `t`.
    pub column_at_smallest_t: Vec<Complex64>,
    /// Linear extrapolation to `t = 0` from the two smallest grid values.
    pub column: Vec<Complex64>,
    /// `±∫_{P₋}^{P₊} ω` on the normalization.
    pub target: Vec<Complex64>,
    /// Distance from `column − target` to the normalization's lattice.
    pub distance: f64,
    /// Sheet of the preimage `P₊` on the normalization.
    pub plus_sheet: Sheet,
    /// Sign relating the family's cycles to the normalization's.
    pub cycle_sign: f64,
    /// Period of the vanishing differential around a small circle at the
    /// node on the probe sheet (`±1`).
    pub residue_period: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationFit {
    /// Fit `τ_vv(t) = alpha·log t + c` of the vanishing-cycle entry.
    pub alpha: Complex64,
    pub c: Complex64,
    /// Coefficient of determination of the fit.
    pub r_squared: f64,
    /// RMS of the fit residuals.
    pub residual: f64,
    pub t_grid: Vec<f64>,
    pub tau_vanishing: Vec<Complex64>,
    /// Largest entry of `τ_upper(t_min) − τ_normalization`.
    pub upper_block_error: f64,
    pub tau_normalization: CMatrix,
    pub aj_limit: AjLimit,
}

/// `α, c` minimizing `Σ |y_i − α x_i − c|²` with real `x`, plus `R²` and
/// the residual RMS.
fn log_fit(x: &[f64], y: &[Complex64]) -> (Complex64, Complex64, f64, f64) {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<Complex64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    let sxy: Complex64 = x.iter().zip(y).map(|(a, b)| (b - ym) * (a - xm)).sum();
    let alpha = sxy / sxx;
    let c = ym - alpha * xm;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - alpha * a - c).norm_sqr()).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - ym).norm_sqr()).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (alpha, c, r2, (ss_res / n).sqrt())
}

/// Continues `y = ±√f(x)` along the points `xs` starting from `y0`.
fn continue_root(f: impl Fn(Complex64) -> Complex64, xs: &[Complex64], y0: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut prev = y0;
    for &x in xs {
        let r = f(x).sqrt();
        prev = if (r - prev).norm() <= (r + prev).norm() { r } else { -r };
        out.push(prev);
    }
    out
}

/// Follows a collision family and compares it with its normalization.
///
/// The colliding pair must be the first two branch points of the chain order,
/// so that the vanishing cycle is `a_0` and the remaining cycles of the family
/// match those of the normalization. Entry 0 is moved to the last position
/// before reporting.
pub fn fay_degeneration_fit(family: &FamilySpec, opts: FitOptions) -> Result<DegenerationFit> {
    let (i, j) = match family.deformation {
        Deformation::Collide { pair } => pair,
        Deformation::Move { .. } => {
            return Err(Error::Argument("degeneration fit needs a collision family".into()))
        }
    };
    if family.t_grid.len() < 3 {
        return Err(Error::Argument("degeneration fit needs at least three t values".into()));
    }
    let first = family.curve_at(family.t_grid[0])?;
    let layout = PeriodLayout::for_curve(&first);
    let pair_first = matches!(
        (layout.order[0], layout.order[1]),
        (Origin::Finite(a), Origin::Finite(b)) if (a == i && b == j) || (a == j && b == i)
    );
    if !pair_first {
        return Err(Error::Diagnostic(format!(
            "the colliding pair ({i}, {j}) must be the first two branch points in (Re, Im) order"
        )));
    }
    let popts = PeriodOptions::with_precision(opts.precision);
    let mats: Vec<RiemannMatrix> = par::try_map_slice(&family.t_grid, |&t| {
        let curve = family.curve_at(t)?;
        if !layout.is_sorted_for(&curve) {
            return Err(Error::Diagnostic(format!("basis tracking failed at t = {t:e}: chain order changed")));
        }
        period_matrix_with(&curve, &layout, popts)
            .map_err(|e| Error::Diagnostic(format!("period computation failed at t = {t:e}: {e}")))
    })?;

    let gp1 = mats[0].genus();
    let g = gp1 - 1;
    // New index a holds old index perm(a): the vanishing index 0 goes last.
    let perm = |a: usize| if a < g { a + 1 } else { 0 };
    let permuted: Vec<CMatrix> = mats
        .iter()
        .map(|m| CMatrix::from_fn(gp1, gp1, |a, b| m.tau[(perm(a), perm(b))]))
        .collect();

    let logs: Vec<f64> = family.t_grid.iter().map(|t| t.ln()).collect();
    let tau_v: Vec<Complex64> = permuted.iter().map(|m| m[(g, g)]).collect();
    let (alpha, c, r_squared, residual) = log_fit(&logs, &tau_v);

    // Normalization with the inherited chart and chain order.
    let norm_curve = family.normalization()?;
    let reindex = |k: usize| k - (i < k) as usize - (j < k) as usize;
    let norm_layout = PeriodLayout {
        chart: layout.chart,
        order: layout.order[2..]
            .iter()
            .map(|o| match *o {
                Origin::Finite(k) => Origin::Finite(reindex(k)),
                Origin::Infinity => Origin::Infinity,
            })
            .collect(),
    };
    let norm = period_matrix_with(&norm_curve, &norm_layout, popts)?;

    let last = permuted.len() - 1;
    let small = &permuted[last];
    let upper_block_error = (0..g)
        .flat_map(|a| (0..g).map(move |b| (a, b)))
        .map(|(a, b)| (small[(a, b)] - norm.tau[(a, b)]).norm())
        .fold(0.0, f64::max);

    let aj_limit = aj_limit(family, &mats[last], &norm, &permuted, g)?;
    Ok(DegenerationFit {
        alpha,
        c,
        r_squared,
        residual,
        t_grid: family.t_grid.clone(),
        tau_vanishing: tau_v,
        upper_block_error,
        tau_normalization: norm.tau.clone(),
        aj_limit,
    })
}

fn aj_limit(
    family: &FamilySpec,
    fam: &RiemannMatrix,
    norm: &RiemannMatrix,
    permuted: &[CMatrix],
    g: usize,
) -> Result<AjLimit> {
    let (node, u) = family.collision_frame().unwrap();
    let t_min = *family.t_grid.last().unwrap();
    let others = norm.curve.finite_branch_points();
    let reach = others.iter().map(|l| (l - node).norm()).fold(f64::INFINITY, f64::min);
    let r = 0.25 * reach;
    if r < 10.0 * t_min.sqrt() {
        return Err(Error::Diagnostic(format!(
            "smallest t = {t_min:e} is too large to separate the node from the other branch points"
        )));
    }
    // Probe point off the collision axis, at distance r from the node.
    let probe = node + u * Complex64::new(0.0, r);
    let y_fam = fam.curve.y_at(probe, Sheet::Plus);
    let y_norm = norm.curve.y_at(probe, Sheet::Plus);
    let ratio = y_fam / ((probe - node) * y_norm);
    if (ratio.norm() - 1.0).abs() > 0.1 {
        return Err(Error::Diagnostic(format!("family and normalization disagree near the node (ratio {ratio})")));
    }
    let probe_sheet = if ratio.re > 0.0 { Sheet::Plus } else { Sheet::Minus };

    // Period of the vanishing differential around |x − m| = r.
    let n = 512;
    let circle: Vec<Complex64> = (0..n)
        .map(|k| node + (probe - node) * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let ys = continue_root(|x| fam.curve.poly(x), &circle, y_fam);
    let mut residue_period = Complex64::new(0.0, 0.0);
    for (x, y) in circle.iter().zip(&ys) {
        let dx = (x - node) * Complex64::new(0.0, 2.0 * std::f64::consts::PI / n as f64);
        let mut xp = Complex64::new(1.0, 0.0);
        for p in 0..=g {
            residue_period += fam.a_inv[(0, p)] * xp / y * dx;
            xp *= x;
        }
    }
    let residue_sign = residue_period.re.signum();
    if (residue_period - residue_sign).norm() > 1e-3 {
        return Err(Error::Diagnostic(format!("vanishing differential has period {residue_period} around the node")));
    }

    // Cycle sign from the holomorphic differentials at the probe.
    let w_fam = fam.normalized_at(probe, Sheet::Plus)?;
    let w_norm = norm.normalized_at(probe, probe_sheet)?;
    let k = (0..g)
        .max_by(|&a, &b| w_norm[a].norm().partial_cmp(&w_norm[b].norm()).unwrap())
        .unwrap();
    let s_ratio = w_fam[k + 1] / w_norm[k];
    if (s_ratio.norm() - 1.0).abs() > 1e-2 {
        return Err(Error::Diagnostic(format!("cycle identification failed (ratio {s_ratio})")));
    }
    let cycle_sign = s_ratio.re.signum();

    // Preimage on the probe sheet, continued from the probe to the node.
    let steps = 64;
    let segment: Vec<Complex64> =
        (1..=steps).map(|k| probe + (node - probe) * (k as f64 / steps as f64)).collect();
    let y_probe = norm.curve.y_at(probe, probe_sheet);
    let y_node = *continue_root(|x| norm.curve.poly(x), &segment, y_probe).last().unwrap();
    let plus_sheet = if (y_node - norm.curve.y_at(node, Sheet::Plus)).norm()
        <= (y_node - norm.curve.y_at(node, Sheet::Minus)).norm()
    {
        Sheet::Plus
    } else {
        Sheet::Minus
    };
    let p_plus = CurvePoint::regular(node, plus_sheet);
    let p_minus = CurvePoint::regular(node, plus_sheet.flip());
    let aj = norm.abel_jacobi(&p_minus, &p_plus, 1e-12)?.value;
    let target: CVector = aj * Complex64::new(cycle_sign * residue_sign, 0.0);

    let last = permuted.len() - 1;
    let col = |m: &CMatrix| CVector::from_fn(g, |a, _| m[(a, g)]);
    let c1 = col(&permuted[last]);
    let c2 = col(&permuted[last - 1]);
    let (t1, t2) = (family.t_grid[last], family.t_grid[last - 1]);
    let extrapolated = &c1 - (&c2 - &c1) * Complex64::new(t1 / (t2 - t1), 0.0);
    let distance = norm.distance_to_lattice(&(&extrapolated - &target));
    Ok(AjLimit {
        node,
        column_at_smallest_t: c1.iter().copied().collect(),
        column: extrapolated.iter().copied().collect(),
        target: target.iter().copied().collect(),
        distance,
        plus_sheet,
        cycle_sign,
        residue_period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::HyperellipticCurve;

    #[test]
    fn log_fit_recovers_exact_line() {
        let x: Vec<f64> = (1..6).map(|k| -(k as f64)).collect();
        let a = Complex64::new(0.2, -0.7);
        let b = Complex64::new(-1.0, 0.5);
        let y: Vec<Complex64> = x.iter().map(|v| a * v + b).collect();
        let (fa, fb, r2, res) = log_fit(&x, &y);
        assert!((fa - a).norm() < 1e-14 && (fb - b).norm() < 1e-14);
        assert!((r2 - 1.0).abs() < 1e-14 && res < 1e-14);
    }

    #[test]
    fn pair_must_lead_the_chain() {
        let base = HyperellipticCurve::from_real(&[2.0, 3.0, 4.0, 5.0, -1.0, 1.0]).unwrap();
        let f = FamilySpec::new(base, Deformation::Collide { pair: (1, 2) }, vec![1e-2, 1e-3, 1e-4]).unwrap();
        assert!(matches!(fay_degeneration_fit(&f, FitOptions::default()), Err(Error::Diagnostic(_))));
    }
}
