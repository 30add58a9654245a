//! Gauss–Legendre and Gauss–Chebyshev rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static LEGENDRE_CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();

/// `n`-point Gauss–Legendre rule, computed by Newton iteration on `P_n` and
/// cached per `n`.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    let cache = LEGENDRE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(compute_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_legendre(n: usize) -> Rule {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi initial guess.
        let k = (i + 1) as f64;
        let nf = n as f64;
        let mut x = (PI * (k - 0.25) / (nf + 0.5)).cos()
            * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Angles `θ_j = (2j − 1)π / 2n` of the `n`-point Gauss–Chebyshev rule for
/// `∫ h(u) / √(1 − u²) du ≈ (π/n) Σ h(cos θ_j)`.
pub fn chebyshev_angles(n: usize) -> Vec<f64> {
    (1..=n).map(|j| (2 * j - 1) as f64 * PI / (2 * n) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let r = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn large_rules_have_unit_total_weight() {
        let r = gauss_legendre(2048);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_rule_integrates_weighted_polynomials() {
        // ∫ u² / √(1-u²) du = π/2
        let n = 8;
        let s: f64 = chebyshev_angles(n).iter().map(|t| t.cos().powi(2)).sum::<f64>() * PI / n as f64;
        assert!((s - PI / 2.0).abs() < 1e-14);
    }
}
