//! Integration of `x^j dx / y` along straight segments of the x-plane.
//!
//! Along a segment that avoids the branch locus, `y = κ ∏ √(x − λ_i)` where
//! every factor uses a branch cut pointing away from the segment: for the
//! factor at `λ_i` the cut is the ray opposite to the direction from `λ_i`
//! to the segment midpoint. Each factor is then analytic on the whole open
//! segment, so the product is an exact analytic continuation of `y` and no
//! step-by-step sign tracking is needed.

use num_complex::Complex64;

use super::quadrature::{chebyshev_angles, gauss_legendre};
use crate::error::{Error, Result};

/// Largest node count tried before giving up on a segment.
pub const MAX_NODES: usize = 1 << 14;
const START_NODES: usize = 16;

/// A straight segment whose endpoints may sit on branch points (given by
/// their index in the branch list).
#[derive(Clone, Debug)]
pub struct Segment {
    pub start: Complex64,
    pub end: Complex64,
    pub start_branch: Option<usize>,
    pub end_branch: Option<usize>,
    rotations: Vec<Complex64>,
}

/// Result of integrating the first `g` monomial differentials.
#[derive(Clone, Debug)]
pub struct SegmentIntegral {
    pub values: Vec<Complex64>,
    pub error: f64,
    pub nodes: usize,
}

impl Segment {
    pub fn new(
        branch: &[Complex64],
        start: Complex64,
        end: Complex64,
        start_branch: Option<usize>,
        end_branch: Option<usize>,
    ) -> Self {
        let mid = (start + end) * 0.5;
        let rotations = branch
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let dir = if Some(i) == start_branch {
                    end - start
                } else if Some(i) == end_branch {
                    start - end
                } else {
                    mid - l
                };
                Complex64::from_polar(1.0, 0.5 * dir.arg())
            })
            .collect();
        Self { start, end, start_branch, end_branch, rotations }
    }

    fn sqrt_factor(&self, branch: &[Complex64], i: usize, x: Complex64) -> Complex64 {
        let r = self.rotations[i];
        r * ((x - branch[i]) / (r * r)).sqrt()
    }

    /// Canonical branch `∏ √(x − λ_i)` at a point of the segment.
    pub fn canonical_y(&self, branch: &[Complex64], x: Complex64) -> Complex64 {
        (0..branch.len()).map(|i| self.sqrt_factor(branch, i, x)).product()
    }

    /// Product over factors other than the endpoint branch points.
    fn rest(&self, branch: &[Complex64], x: Complex64) -> Complex64 {
        (0..branch.len())
            .filter(|&i| Some(i) != self.start_branch && Some(i) != self.end_branch)
            .map(|i| self.sqrt_factor(branch, i, x))
            .product()
    }

    /// Distance from the segment to the nearest branch point that is not one
    /// of its endpoints.
    pub fn clearance(&self, branch: &[Complex64]) -> f64 {
        branch
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.start_branch && Some(*i) != self.end_branch)
            .map(|(_, &l)| point_segment_distance(l, self.start, self.end))
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫ x^j dx / y` for `j < g` along the segment with `y = κ·canonical_y`.
    pub fn integrate(
        &self,
        branch: &[Complex64],
        kappa: Complex64,
        g: usize,
        tol: f64,
        min_nodes: usize,
    ) -> Result<SegmentIntegral> {
        let mut n = min_nodes.max(START_NODES);
        let mut prev = self.rule(branch, kappa, g, n);
        loop {
            let next_n = 2 * n;
            if next_n > MAX_NODES {
                return Err(Error::Precision(format!(
                    "segment {} -> {} did not converge to {tol:e} with {MAX_NODES} nodes",
                    self.start, self.end
                )));
            }
            let next = self.rule(branch, kappa, g, next_n);
            let scale = next.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let error = next
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if error <= tol * scale {
                return Ok(SegmentIntegral { values: next, error, nodes: next_n });
            }
            prev = next;
            n = next_n;
        }
    }

    fn rule(&self, branch: &[Complex64], kappa: Complex64, g: usize, n: usize) -> Vec<Complex64> {
        let (a, b) = (self.start, self.end);
        let mut acc = vec![Complex64::new(0.0, 0.0); g];
        let mut add = |x: Complex64, w: Complex64| {
            let mut xp = w;
            for slot in acc.iter_mut() {
                *slot += xp;
                xp *= x;
            }
        };
        match (self.start_branch, self.end_branch) {
            (Some(i), Some(j)) => {
                // x = mid + half·cos θ; the endpoint factors equal
                // c·half·sin θ with a constant c fixed at the midpoint.
                let mid = (a + b) * 0.5;
                let half = (b - a) * 0.5;
                let c = self.sqrt_factor(branch, i, mid) * self.sqrt_factor(branch, j, mid) / half;
                let w0 = std::f64::consts::PI / n as f64;
                for theta in chebyshev_angles(n) {
                    let x = mid + half * theta.cos();
                    // dx / y = half dθ·sinθ / (κ c half sinθ rest)
                    add(x, Complex64::new(w0, 0.0) / (kappa * c * self.rest(branch, x)));
                }
            }
            (Some(i), None) => {
                let s = self.single_endpoint(branch, i, a, b, kappa, n);
                for (x, w) in s {
                    add(x, w);
                }
            }
            (None, Some(j)) => {
                for (x, w) in self.single_endpoint(branch, j, b, a, kappa, n) {
                    add(x, -w);
                }
            }
            (None, None) => {
                let rule = gauss_legendre(n);
                let d = (b - a) * 0.5;
                for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let x = a + (b - a) * (0.5 * (u + 1.0));
                    let y = kappa * self.canonical_y(branch, x);
                    add(x, d * w / y);
                }
            }
        }
        acc
    }

    /// Nodes and weights for `∫_p^q` where `p` is the branch point with index
    /// `i`: substituting `x = p + (q − p)s²` cancels the square-root
    /// singularity.
    fn single_endpoint(
        &self,
        branch: &[Complex64],
        i: usize,
        p: Complex64,
        q: Complex64,
        kappa: Complex64,
        n: usize,
    ) -> Vec<(Complex64, Complex64)> {
        let rule = gauss_legendre(n);
        let root = self.sqrt_factor(branch, i, q);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| {
                let s = 0.5 * (u + 1.0);
                let x = p + (q - p) * (s * s);
                // dx / y = 2(q-p) s ds / (κ s √(q-p) rest)
                let wt = (q - p) * (w * 0.5 * 2.0) / (kappa * root * self.rest(branch, x));
                (x, wt)
            })
            .collect()
    }
}

pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_branch_squares_to_polynomial() {
        let branch = vec![c(0.0, 0.0), c(1.0, 0.5), c(-2.0, 1.0), c(3.0, -1.0)];
        let seg = Segment::new(&branch, branch[0], branch[1], Some(0), Some(1));
        for t in [0.1, 0.5, 0.9] {
            let x = branch[0] + (branch[1] - branch[0]) * t;
            let y = seg.canonical_y(&branch, x);
            let f: Complex64 = branch.iter().map(|l| x - l).product();
            assert!((y * y - f).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_branch_is_continuous_along_segment() {
        let branch = vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.01), c(1.0, -0.02)];
        let seg = Segment::new(&branch, c(0.0, 0.0), c(2.0, 0.0), Some(0), Some(1));
        let mut prev = seg.canonical_y(&branch, c(0.001, 0.0));
        for k in 2..2000 {
            let x = c(0.001 * k as f64, 0.0);
            let y = seg.canonical_y(&branch, x);
            assert!((y - prev).norm() < 0.2, "jump at {x}");
            prev = y;
        }
    }

    #[test]
    fn chebyshev_segment_matches_closed_form() {
        // ∫_{-1}^{1} dx / √((x+1)(x-1)(x-3)(x+3)) on a fixed branch, compared
        // against the same integral after the substitution x = sin φ.
        let branch = vec![c(-1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0)];
        let seg = Segment::new(&branch, branch[0], branch[1], Some(0), Some(1));
        let got = seg.integrate(&branch, c(1.0, 0.0), 1, 1e-14, 0).unwrap();
        let rule = gauss_legendre(200);
        let oracle: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| {
                let phi = u * PI / 2.0;
                let x = phi.sin();
                w * (PI / 2.0) / (9.0 - x * x).sqrt()
            })
            .sum();
        assert!((got.values[0].norm() - oracle).abs() < 1e-12);
    }

    #[test]
    fn one_sided_and_two_sided_rules_agree() {
        let branch = vec![c(0.0, 0.0), c(1.0, 1.0), c(3.0, -0.5), c(-1.0, 2.0)];
        let mid = c(0.5, 0.5);
        let whole = Segment::new(&branch, branch[0], branch[1], Some(0), Some(1));
        let y_mid = whole.canonical_y(&branch, mid);
        let full = whole.integrate(&branch, c(1.0, 0.0), 3, 1e-13, 0).unwrap();
        let left = Segment::new(&branch, branch[0], mid, Some(0), None);
        let kl = y_mid / left.canonical_y(&branch, mid);
        let right = Segment::new(&branch, mid, branch[1], None, Some(1));
        let kr = y_mid / right.canonical_y(&branch, mid);
        let a = left.integrate(&branch, kl, 3, 1e-13, 0).unwrap();
        let b = right.integrate(&branch, kr, 3, 1e-13, 0).unwrap();
        for j in 0..3 {
            assert!((a.values[j] + b.values[j] - full.values[j]).norm() < 1e-11);
        }
    }

    #[test]
    fn distance_to_segment() {
        assert!((point_segment_distance(c(0.5, 1.0), c(0.0, 0.0), c(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((point_segment_distance(c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)) - 1.0).abs() < 1e-15);
    }
}
