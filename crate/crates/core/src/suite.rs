//! The verification suites behind `periods verify-all` and the acceptance
//! tests: each function runs one family of checks and returns a [`Check`]
//! with the measured quantities, the thresholds and the runtime.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{verify_direct_sum_e1v, verify_sigma_span, verify_tau_independence};
use crate::linalg::{self, CMatrix, CVector};
use crate::riemann::{j_algebraic, period_matrix, CurvePoint, HyperellipticCurve, RiemannMatrix, Sheet};
use crate::theta::{
    all_characteristics, j_invariant, lattice_theta, schottky_form, siegel_phi, theta_constants,
    theta_series_via_constants, LatticeSpec, LatticeThetaOptions, SiegelPoint, ThetaCharacteristic,
    ThetaSeries,
};
use crate::variation::{fay_degeneration_fit, rauch_fd_check, schiffer_tensor, Deformation, FamilySpec, FitOptions, RauchOptions};

pub const DEFAULT_SEED: u64 = 1;

/// `Γ(3/4)`.
const GAMMA_3_4: f64 = 1.225_416_702_465_177_6;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// The statement being checked.
    pub claim: String,
    pub pass: bool,
    pub summary: String,
    pub runtime_s: f64,
    pub runtime_limit_s: Option<f64>,
    pub details: Value,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn run(
    name: &str,
    claim: &str,
    limit: Option<f64>,
    body: impl FnOnce() -> Result<(bool, String, Value)>,
) -> Check {
    let start = Instant::now();
    let outcome = body();
    let runtime_s = start.elapsed().as_secs_f64();
    let in_time = limit.map_or(true, |l| runtime_s < l);
    let (pass, summary, details) = match outcome {
        Ok((ok, s, d)) => {
            let s = if in_time { s } else { format!("{s}; runtime {runtime_s:.1}s over limit") };
            (ok && in_time, s, d)
        }
        Err(e) => (false, format!("error: {e}"), json!({ "error": e.to_string() })),
    };
    Check { name: name.into(), claim: claim.into(), pass, summary, runtime_s, runtime_limit_s: limit, details }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Genus-2 curve with six finite branch points used by several suites.
pub fn fixed_genus_two_curve() -> HyperellipticCurve {
    HyperellipticCurve::new(vec![
        c(-2.0, 0.3),
        c(-0.7, -1.1),
        c(0.2, 0.5),
        c(1.1, -0.4),
        c(2.3, 1.0),
        c(0.4, 2.2),
    ])
    .expect("fixed curve is valid")
}

/// Branch points uniform in `[−2, 2]²`, redrawn until they are at least
/// `0.1` apart. With `with_infinity` one finite point fewer is drawn.
pub fn random_curve<R: Rng>(rng: &mut R, genus: usize, with_infinity: bool) -> HyperellipticCurve {
    let count = 2 * genus + 2 - with_infinity as usize;
    loop {
        let pts: Vec<Complex64> =
            (0..count).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        if let Ok(curve) = HyperellipticCurve::new(pts) {
            if curve.min_separation() >= 0.1 {
                return curve;
            }
        }
    }
}

/// `y² = (x² − t)(x − 2)(x − 3)(x − 4)(x − 5)` on a log grid in
/// `[1e−5, 1e−2]`.
pub fn collision_family(points: usize) -> FamilySpec {
    let base = HyperellipticCurve::from_real(&[-1.0, 1.0, 2.0, 3.0, 4.0, 5.0]).expect("valid");
    FamilySpec::new(base, Deformation::Collide { pair: (0, 1) }, FamilySpec::log_grid(1e-2, 1e-5, points))
        .expect("valid family")
}

/// Genus-4 curve `y² = ∏(x − λ_i)` with nine finite branch points spread
/// around the unit circle (and one at infinity), redrawn until
/// `λ_min(Im τ) ≥ 0.3`. Returns the curve and its period matrix.
pub fn genus_four_jacobian_point(seed: u64) -> Result<(HyperellipticCurve, RiemannMatrix)> {
    let mut rng = rng_for(seed, 40);
    for _ in 0..20 {
        let pts: Vec<Complex64> = (0..9)
            .map(|k| {
                let r = 1.0 + rng.gen_range(-0.2..0.2);
                let a = 2.0 * std::f64::consts::PI * (k as f64 + rng.gen_range(-0.2..0.2)) / 9.0;
                Complex64::from_polar(r, a)
            })
            .collect();
        let curve = HyperellipticCurve::with_infinity(pts)?;
        let rm = period_matrix(&curve, 1e-12)?;
        if rm.min_imag_eigenvalue() >= 0.3 {
            return Ok((curve, rm));
        }
    }
    Err(Error::Diagnostic("no genus-4 sample with λ_min(Im τ) ≥ 0.3 in 20 draws".into()))
}

/// Random symmetric complex direction with largest entry of modulus
/// `size`, redrawn until `T + Δ` stays in Siegel space.
pub fn perturb<R: Rng>(rng: &mut R, t: &SiegelPoint, size: f64) -> Result<(SiegelPoint, CMatrix)> {
    let g = t.degree();
    for _ in 0..50 {
        let d = CMatrix::from_fn(g, g, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let d = (&d + d.transpose()) * c(0.5, 0.0);
        let m = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let d = d * c(size / m, 0.0);
        if let Ok(p) = t.perturbed(&d) {
            return Ok((p, d));
        }
    }
    Err(Error::Diagnostic("no admissible perturbation in 50 draws".into()))
}

pub fn span_ranks(seed: u64) -> Check {
    run(
        "span_ranks",
        "tau_kl independent, T + e1V = Sym2 V, and the sigma_kl span n(n-1)/2 dimensions, n = 3..12",
        Some(10.0),
        || {
            let mut rows = vec![];
            let mut ok = true;
            for n in 3..=12 {
                let tau = verify_tau_independence(n)?;
                let ds = verify_direct_sum_e1v(n)?;
                let generic = verify_sigma_span(n, n, 5, false, seed)?;
                let zero = verify_sigma_span(n, n, 5, true, seed)?;
                ok &= tau.pass && ds.pass && generic.pass && zero.pass;
                rows.push(json!({
                    "n": n,
                    "tau_rank": tau.rank,
                    "direct_sum_rank": ds.rank_union,
                    "sigma_generic": generic.dims,
                    "sigma_zero_sum": zero.dims,
                    "expected": [tau.expected, ds.expected, generic.expected],
                }));
            }
            Ok((ok, format!("ranks exact for n = 3..12: {}", if ok { "all match" } else { "mismatch" }), json!(rows)))
        },
    )
}

pub fn genus_one_j() -> Check {
    run(
        "genus_one_j",
        "j(tau) from the period matrix equals the cross-ratio j for {0,1,-1,inf} and the cube roots of unity",
        Some(10.0),
        || {
            let square = HyperellipticCurve::with_infinity(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])?;
            let hex = HyperellipticCurve::with_infinity(
                (0..3).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0)).collect(),
            )?;
            let mut worst: f64 = 0.0;
            let mut rows = vec![];
            for curve in [square, hex] {
                let rm = period_matrix(&curve, 1e-12)?;
                let tau = rm.tau[(0, 0)];
                let j_tau = j_invariant(&SiegelPoint::scalar(tau)?, 1e-16)?;
                let j_alg = j_algebraic(&curve)?;
                // Relative to 1728 when the algebraic value is 0.
                let err = (j_tau - j_alg).norm() / j_alg.norm().max(1728.0);
                worst = worst.max(err);
                rows.push(json!({"tau": tau, "j_from_tau": j_tau, "j_algebraic": j_alg, "relative_error": err}));
            }
            Ok((worst < 1e-6, format!("max relative error {worst:.2e} (< 1e-6)"), json!(rows)))
        },
    )
}

pub fn riemann_invariants(seed: u64) -> Check {
    run(
        "riemann_invariants",
        "20 random genus-2 and 20 random genus-3 curves give symmetric tau with Im tau positive definite",
        Some(120.0),
        || {
            let mut rng = rng_for(seed, 3);
            let mut worst_asym: f64 = 0.0;
            let mut min_lam = f64::INFINITY;
            let mut count = 0;
            for genus in [2, 3] {
                for trial in 0..20 {
                    let curve = random_curve(&mut rng, genus, trial % 2 == 0);
                    let rm = period_matrix(&curve, 1e-12)?;
                    worst_asym = worst_asym.max(linalg::asymmetry(&rm.tau) / linalg::frobenius(&rm.tau));
                    min_lam = min_lam.min(rm.min_imag_eigenvalue());
                    count += 1;
                }
            }
            let ok = worst_asym < 1e-6 && min_lam > 0.0;
            Ok((
                ok,
                format!("{count} curves: max |tau-tau^T|/|tau| = {worst_asym:.2e}, min eig Im tau = {min_lam:.3}"),
                json!({"curves": count, "max_relative_asymmetry": worst_asym, "min_imag_eigenvalue": min_lam}),
            ))
        },
    )
}

pub fn schiffer_rank_one() -> Check {
    run(
        "schiffer_rank_one",
        "finite-difference dtau/dlambda_k is rank one along w w^T at every branch point of a genus-2 curve",
        Some(120.0),
        || {
            let curve = fixed_genus_two_curve();
            let mut rows = vec![];
            let (mut worst_ratio, mut worst_angle): (f64, f64) = (0.0, 0.0);
            for k in 0..curve.finite_branch_points().len() {
                let r = rauch_fd_check(&curve, k, &RauchOptions::default())?;
                worst_ratio = worst_ratio.max(r.rank1_ratio);
                worst_angle = worst_angle.max(r.collinearity_angle);
                rows.push(json!({
                    "branch": k,
                    "rank1_ratio": r.rank1_ratio,
                    "collinearity_angle": r.collinearity_angle,
                    "scalar": r.scalar,
                    "richardson_error_ratios": r.table.error_ratios,
                }));
            }
            let ok = worst_ratio < 1e-3 && worst_angle < 1e-3;
            Ok((ok, format!("max s2/s1 = {worst_ratio:.2e}, max angle = {worst_angle:.2e} rad (< 1e-3)"), json!(rows)))
        },
    )
}

pub fn lambda_rescaling() -> Check {
    run(
        "lambda_rescaling",
        "schiffer tensor for the coordinate z/lambda is lambda^2 times the tensor for z",
        None,
        || {
            let rm = period_matrix(&fixed_genus_two_curve(), 1e-12)?;
            let mut worst: f64 = 0.0;
            for p in [CurvePoint::regular(c(0.3, -0.2), Sheet::Plus), CurvePoint::Branch(2)] {
                let base = schiffer_tensor(&rm, &p, c(1.0, 0.0))?.matrix;
                for lam in [c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)] {
                    let scaled = schiffer_tensor(&rm, &p, lam)?.matrix;
                    let err = linalg::frobenius(&(&scaled - &base * (lam * lam))) / linalg::frobenius(&scaled);
                    worst = worst.max(err);
                }
            }
            Ok((worst < 1e-12, format!("max relative deviation {worst:.2e} (< 1e-12)"), json!({"max_relative_error": worst})))
        },
    )
}

pub fn fay_degeneration() -> Check {
    run(
        "fay_degeneration",
        "tau_vv = alpha log t + c with R^2 > 0.999 on [1e-5, 1e-2]; off-diagonal limit is the node Abel-Jacobi value mod lattice",
        Some(300.0),
        || {
            let fit = fay_degeneration_fit(&collision_family(10), FitOptions::default())?;
            let ok = fit.r_squared > 0.999 && fit.aj_limit.distance < 1e-3;
            Ok((
                ok,
                format!(
                    "R^2 = {:.8}, alpha = {:.6}{:+.6}i, AJ distance = {:.2e} (< 1e-3)",
                    fit.r_squared, fit.alpha.re, fit.alpha.im, fit.aj_limit.distance
                ),
                serde_json::to_value(&fit)?,
            ))
        },
    )
}

fn g2_test_point() -> Result<SiegelPoint> {
    SiegelPoint::new(CMatrix::from_row_slice(2, 2, &[c(0.2, 2.0), c(0.1, 0.3), c(0.1, 0.3), c(-0.3, 1.9)]))
}

pub fn theta_cross_checks(seed: u64) -> Check {
    run(
        "theta_cross_checks",
        "theta_3(i), Jacobi identity, odd characteristics, and lattice sums against theta-constant formulas",
        None,
        || {
            let pi = std::f64::consts::PI;
            let th = |t: &SiegelPoint, e: u8, d: u8| -> Result<Complex64> {
                Ok(theta_constants(t, 1e-16)?.get(&ThetaCharacteristic { eps: vec![e], delta: vec![d] }))
            };
            let i_pt = SiegelPoint::scalar(c(0.0, 1.0))?;
            let theta3_err = (th(&i_pt, 0, 0)? - pi.powf(0.25) / GAMMA_3_4).norm();
            let two_i = SiegelPoint::scalar(c(0.0, 2.0))?;
            let jacobi_err =
                (th(&two_i, 1, 0)?.powu(4) + th(&two_i, 0, 1)?.powu(4) - th(&two_i, 0, 0)?.powu(4)).norm();

            let mut rng = rng_for(seed, 7);
            let mut odd_max: f64 = 0.0;
            for g in 1..=4 {
                for _ in 0..2 {
                    let t = SiegelPoint::random(&mut rng, g, 0.5)?;
                    let table = theta_constants(&t, 1e-16)?;
                    for ch in all_characteristics(g).iter().filter(|c| !c.is_even()) {
                        odd_max = odd_max.max(table.get(ch).norm());
                    }
                }
            }

            let mut lattice_rows = vec![];
            let mut lattice_max: f64 = 0.0;
            let points = [SiegelPoint::scalar(c(0.15, 1.2))?, g2_test_point()?];
            for t in &points {
                for (spec, fam) in [(LatticeSpec::e8(), ThetaSeries::E8), (LatticeSpec::d16_plus(), ThetaSeries::D16Plus)] {
                    let lt = lattice_theta(&spec, t, LatticeThetaOptions { tol: 1e-8, ..Default::default() })?;
                    let tc = theta_series_via_constants(fam, t, 1e-16)?;
                    let err = (lt.value - tc).norm();
                    lattice_max = lattice_max.max(err);
                    lattice_rows.push(json!({
                        "lattice": spec.name, "degree": t.degree(), "lattice_sum": lt.value,
                        "theta_constants": tc, "difference": err, "points": lt.points, "bound": lt.bound,
                    }));
                }
            }
            let ok = theta3_err < 1e-10 && jacobi_err < 1e-10 && odd_max < 1e-10 && lattice_max < 1e-6;
            Ok((
                ok,
                format!(
                    "theta3(i) {theta3_err:.1e}, Jacobi {jacobi_err:.1e}, odd {odd_max:.1e} (< 1e-10); lattice {lattice_max:.1e} (< 1e-6)"
                ),
                json!({
                    "theta3_i_error": theta3_err, "jacobi_error": jacobi_err,
                    "odd_max": odd_max, "lattice": lattice_rows,
                }),
            ))
        },
    )
}

pub fn schottky(seed: u64) -> Check {
    run(
        "schottky",
        "F vanishes in degree <= 3 and at a genus-4 hyperelliptic Jacobian, and is visibly nonzero after a 0.1 perturbation",
        Some(600.0),
        || {
            let mut rng = rng_for(seed, 8);
            let mut low_max: f64 = 0.0;
            for g in 1..=3 {
                for _ in 0..5 {
                    let t = SiegelPoint::random(&mut rng, g, 0.5)?;
                    low_max = low_max.max(schottky_form(&t, 1e-16)?.relative);
                }
            }
            let (curve, rm) = genus_four_jacobian_point(seed)?;
            let jac = SiegelPoint::new(rm.tau.clone())?;
            let at_jacobian = schottky_form(&jac, 1e-16)?;
            let mut prng = rng_for(seed, 9);
            let (moved, _) = perturb(&mut prng, &jac, 0.1)?;
            let off = schottky_form(&moved, 1e-16)?;
            let ok = low_max < 1e-8 && at_jacobian.relative < 1e-4 && off.relative > 1e-2;
            Ok((
                ok,
                format!(
                    "degree<=3 max {low_max:.1e} (< 1e-8); Jacobian {:.1e} (< 1e-4); perturbed {:.1e} (> 1e-2)",
                    at_jacobian.relative, off.relative
                ),
                json!({
                    "degree_le_3_max_relative": low_max,
                    "genus4_curve": curve.to_json(),
                    "genus4_min_imag_eigenvalue": jac.min_imag_eigenvalue(),
                    "at_jacobian": at_jacobian,
                    "perturbed": off,
                }),
            ))
        },
    )
}

pub fn phi_operator(seed: u64) -> Check {
    run(
        "phi_operator",
        "Phi(Theta_E8 in degree 2) = Theta_E8 in degree 1, and Phi of the degree-4 Schottky form vanishes",
        None,
        || {
            let mut rng = rng_for(seed, 10);
            let t_list = [10.0, 12.0, 14.0];
            let mut e8_max: f64 = 0.0;
            let mut rows = vec![];
            for _ in 0..3 {
                let tau = SiegelPoint::scalar(c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.5)))?;
                let opts = LatticeThetaOptions { tol: 1e-12, ..Default::default() };
                let phi = siegel_phi(|p| Ok(lattice_theta(&LatticeSpec::e8(), p, opts)?.value), &tau, &t_list, 1e-12)?;
                let lower = theta_series_via_constants(ThetaSeries::E8, &tau, 1e-16)?;
                let err = (phi.value - lower).norm();
                e8_max = e8_max.max(err);
                rows.push(json!({"tau": tau.matrix()[(0, 0)], "phi": phi.value, "degree_one": lower, "error": err}));
            }
            let tau3 = SiegelPoint::random(&mut rng, 3, 0.5)?;
            let phi_f = siegel_phi(
                |p| {
                    let f = schottky_form(p, 1e-16)?;
                    Ok(f.value / f.scale)
                },
                &tau3,
                &t_list,
                1e-12,
            )?;
            let f_rel = phi_f.value.norm();
            let ok = e8_max < 1e-6 && f_rel < 1e-8;
            Ok((
                ok,
                format!("E8 max error {e8_max:.1e} (< 1e-6); |Phi F|/scale {f_rel:.1e} (< 1e-8)"),
                json!({"e8": rows, "schottky_relative": f_rel, "schottky_differences": phi_f.differences}),
            ))
        },
    )
}

pub fn abel_jacobi_torsion() -> Check {
    run(
        "abel_jacobi_torsion",
        "2 AJ(lambda_i, lambda_j) lies on the period lattice for branch points of a genus-2 curve",
        None,
        || {
            let rm = period_matrix(&fixed_genus_two_curve(), 1e-12)?;
            let mut worst: f64 = 0.0;
            let mut rows = vec![];
            for (i, j) in [(0, 1), (0, 3), (1, 4), (2, 5), (3, 5)] {
                let aj = rm.abel_jacobi(&CurvePoint::Branch(i), &CurvePoint::Branch(j), 1e-12)?;
                let twice: CVector = &aj.value * c(2.0, 0.0);
                let d = rm.distance_to_lattice(&twice);
                worst = worst.max(d);
                rows.push(json!({"pair": [i, j], "aj": aj.value.iter().collect::<Vec<_>>(), "distance_2aj": d}));
            }
            Ok((worst < 1e-5, format!("max distance of 2 AJ to lattice {worst:.1e} (< 1e-5)"), json!(rows)))
        },
    )
}

/// Every suite, in a fixed order.
pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        span_ranks(seed),
        genus_one_j(),
        riemann_invariants(seed),
        schiffer_rank_one(),
        lambda_rescaling(),
        fay_degeneration(),
        theta_cross_checks(seed),
        schottky(seed),
        phi_operator(seed),
        abel_jacobi_torsion(),
    ]
}
