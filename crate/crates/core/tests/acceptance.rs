//! One line per acceptance criterion, then a single assertion over all of them.

use num_complex::Complex64;
use periods_core::suite::{self, Check, DEFAULT_SEED};
use periods_core::theta::{theta_constants, SiegelPoint, ThetaCharacteristic};

fn line(check: &Check) -> String {
    let limit = check.runtime_limit_s.map(|l| format!(" / limit {l:.0}s")).unwrap_or_default();
    format!(
        "[{}] {:<20} {:>8.2}s{}  {}",
        if check.pass { "PASS" } else { "FAIL" },
        check.name,
        check.runtime_s,
        limit,
        check.summary
    )
}

/// θ₃(i) against π^{1/4}/Γ(3/4) with Γ from libm rather than a stored constant.
fn theta3_at_i_against_libm() -> f64 {
    let t = SiegelPoint::scalar(Complex64::new(0.0, 1.0)).unwrap();
    let th = theta_constants(&t, 1e-16).unwrap().get(&ThetaCharacteristic { eps: vec![0], delta: vec![0] });
    let expected = std::f64::consts::PI.powf(0.25) / libm::tgamma(0.75);
    (th - expected).norm()
}

#[test]
fn acceptance() {
    let mut checks = suite::run_all(DEFAULT_SEED);
    let oracle = theta3_at_i_against_libm();
    if let Some(theta) = checks.iter_mut().find(|c| c.name == "theta_cross_checks") {
        theta.pass &= oracle < 1e-10;
        theta.summary.push_str(&format!("; theta3(i) vs libm gamma {oracle:.1e}"));
    }
    println!();
    for c in &checks {
        println!("{}", line(c));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    println!("{} of {} criteria pass", checks.len() - failed.len(), checks.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
