use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::point::SiegelPoint;
use crate::error::{Error, Result};
use crate::par;

/// Positive definite even lattice given by an integer Gram matrix, optionally
/// enlarged by glue cosets (representatives in basis coordinates).
#[derive(Clone, Debug, Serialize)]
pub struct LatticeSpec {
    pub name: String,
    pub gram: Vec<Vec<i64>>,
    pub glue: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct LatticeThetaOptions {
    /// Target for the estimated truncation error.
    pub tol: f64,
    /// Fixed bound on `Σ_pq Im(T)_pq ⟨x_p, x_q⟩`; chosen from `tol` when unset.
    pub bound: Option<f64>,
    /// Refuse to enumerate more than roughly this many tuples.
    pub max_points: f64,
    /// Permit `rank · g > 32`.
    pub allow_large_degree: bool,
}

impl Default for LatticeThetaOptions {
    fn default() -> Self {
        Self { tol: 1e-10, bound: None, max_points: 4e8, allow_large_degree: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeTheta {
    pub value: Complex64,
    pub bound: f64,
    pub points: u64,
    pub tail_estimate: f64,
    /// Set when a fixed bound leaves a tail estimate above `tol`.
    pub warning: Option<String>,
}

fn dynkin_cartan(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    m
}

impl LatticeSpec {
    /// The `E₈` root lattice (Cartan matrix of the `E₈` diagram).
    pub fn e8() -> Self {
        let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, i + 1)).collect();
        edges.push((4, 7));
        Self { name: "E8".into(), gram: dynkin_cartan(8, &edges), glue: vec![] }
    }

    /// `D₁₆⁺`: the `D₁₆` root lattice together with the coset of
    /// `(½, …, ½)`.
    pub fn d16_plus() -> Self {
        // Simple roots e_i − e_{i+1} (i < 15) and e_14 + e_15.
        let n = 16;
        let mut roots = DMatrix::<f64>::zeros(n, n);
        for i in 0..15 {
            roots[(i, i)] = 1.0;
            roots[(i, i + 1)] = -1.0;
        }
        roots[(15, 14)] = 1.0;
        roots[(15, 15)] = 1.0;
        let gram = &roots * roots.transpose();
        let spinor = nalgebra::DVector::from_element(n, 0.5);
        let coords = roots.transpose().lu().solve(&spinor).expect("D16 roots are a basis");
        Self {
            name: "D16+".into(),
            gram: (0..n).map(|i| (0..n).map(|j| gram[(i, j)].round() as i64).collect()).collect(),
            glue: vec![coords.iter().map(|c| (c * 2.0).round() / 2.0).collect()],
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "E8" | "e8" => Ok(Self::e8()),
            "D16+" | "D16plus" | "d16+" => Ok(Self::d16_plus()),
            _ => Err(Error::Argument(format!("unknown lattice {name:?}; use E8 or D16+"))),
        }
    }

    pub fn custom(name: &str, gram: Vec<Vec<i64>>, glue: Vec<Vec<f64>>) -> Result<Self> {
        let spec = Self { name: name.into(), gram, glue };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    fn gram_f64(&self) -> DMatrix<f64> {
        let r = self.rank();
        DMatrix::from_fn(r, r, |i, j| self.gram[i][j] as f64)
    }

    /// Coset representatives including the zero coset.
    pub fn cosets(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.rank()]];
        out.extend(self.glue.iter().cloned());
        out
    }

    pub fn determinant(&self) -> f64 {
        self.gram_f64().determinant()
    }

    /// Gram symmetric, even diagonal, positive definite; glue vectors
    /// half-integral with even norm and integral pairings with the lattice.
    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        if r == 0 || self.gram.iter().any(|row| row.len() != r) {
            return Err(Error::Argument("Gram matrix must be square and non-empty".into()));
        }
        for i in 0..r {
            if self.gram[i][i] % 2 != 0 {
                return Err(Error::Argument(format!("diagonal entry {i} of the Gram matrix is odd")));
            }
            for j in 0..i {
                if self.gram[i][j] != self.gram[j][i] {
                    return Err(Error::Argument("Gram matrix is not symmetric".into()));
                }
            }
        }
        let g = self.gram_f64();
        if g.clone().cholesky().is_none() {
            return Err(Error::Argument("Gram matrix is not positive definite".into()));
        }
        for c in &self.glue {
            if c.len() != r || c.iter().any(|x| (2.0 * x).fract() != 0.0) {
                return Err(Error::Argument("glue vectors must be half-integral of full length".into()));
            }
            let v = nalgebra::DVector::from_column_slice(c);
            let pair = &g * &v;
            let norm = v.dot(&pair);
            if pair.iter().any(|p| p.fract().abs() > 1e-9) || (norm / 2.0).fract().abs() > 1e-9 {
                return Err(Error::Argument("glue vector is not even/integral against the lattice".into()));
            }
        }
        Ok(())
    }

    /// Unimodular when `det(Gram) = (number of cosets)²`.
    pub fn is_unimodular(&self) -> bool {
        let k = self.cosets().len() as f64;
        (self.determinant() - k * k).abs() < 1e-6
    }

    /// Number of vectors of each even norm `0, 2, …, max_norm`.
    pub fn shell_counts(&self, max_norm: u32) -> Vec<u64> {
        let g = self.gram_f64();
        let mut counts = vec![0u64; max_norm as usize / 2 + 1];
        for shift in self.cosets() {
            let e = Enumerator::new(&g, &shift, max_norm as f64 + 0.5);
            for top in e.top_values() {
                e.walk(top, &mut |_, norm| {
                    counts[(norm / 2.0).round() as usize] += 1;
                });
            }
        }
        counts
    }
}

/// Fincke–Pohst enumeration of `x ∈ z + shift`, `z` integral, with
/// `xᵀ Q x ≤ bound`.
struct Enumerator {
    d: usize,
    /// `q(x) = Σ_i diag_i (x_i + Σ_{j>i} mu[i][j] x_j)²`.
    diag: Vec<f64>,
    mu: Vec<Vec<f64>>,
    shift: Vec<f64>,
    bound: f64,
}

impl Enumerator {
    fn new(q: &DMatrix<f64>, shift: &[f64], bound: f64) -> Self {
        let d = q.nrows();
        let l = q.clone().cholesky().expect("positive definite form").l();
        let r = l.transpose();
        let diag = (0..d).map(|i| r[(i, i)] * r[(i, i)]).collect();
        let mu = (0..d).map(|i| (0..d).map(|j| if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 }).collect()).collect();
        Self { d, diag, mu, shift: shift.to_vec(), bound }
    }

    fn range(&self, i: usize, x: &[f64], used: f64) -> (i64, i64) {
        let centre: f64 = -(i + 1..self.d).map(|j| self.mu[i][j] * x[j]).sum::<f64>();
        let rem = (self.bound - used).max(0.0);
        let rad = (rem / self.diag[i]).sqrt();
        let lo = (centre - rad - self.shift[i]).ceil() as i64;
        let hi = (centre + rad - self.shift[i]).floor() as i64;
        (lo, hi)
    }

    fn contribution(&self, i: usize, x: &[f64]) -> f64 {
        let s = x[i] + (i + 1..self.d).map(|j| self.mu[i][j] * x[j]).sum::<f64>();
        self.diag[i] * s * s
    }

    /// Admissible integer values of the last coordinate.
    fn top_values(&self) -> Vec<i64> {
        let x = vec![0.0; self.d];
        let (lo, hi) = self.range(self.d - 1, &x, 0.0);
        (lo..=hi).collect()
    }

    /// Visits every point whose last coordinate is `top + shift`, passing
    /// the point and its value of the form.
    fn walk(&self, top: i64, visit: &mut dyn FnMut(&[f64], f64)) {
        let d = self.d;
        let mut x = vec![0.0; d];
        let mut used = vec![0.0; d + 1];
        x[d - 1] = top as f64 + self.shift[d - 1];
        used[d - 1] = self.contribution(d - 1, &x);
        if used[d - 1] > self.bound {
            return;
        }
        if d == 1 {
            visit(&x, used[0]);
            return;
        }
        let mut z = vec![0i64; d];
        let mut hi = vec![0i64; d];
        let mut level = d - 2;
        let (l0, h0) = self.range(level, &x, used[level + 1]);
        z[level] = l0;
        hi[level] = h0;
        loop {
            if z[level] > hi[level] {
                if level == d - 2 {
                    return;
                }
                level += 1;
                z[level] += 1;
                continue;
            }
            x[level] = z[level] as f64 + self.shift[level];
            let u = used[level + 1] + self.contribution(level, &x);
            if u > self.bound * (1.0 + 1e-12) {
                z[level] += 1;
                continue;
            }
            used[level] = u;
            if level == 0 {
                visit(&x, u);
                z[0] += 1;
            } else {
                level -= 1;
                let (lo, h) = self.range(level, &x, used[level + 1]);
                z[level] = lo;
                hi[level] = h;
            }
        }
    }
}

/// `ln Γ(s)` for `s` a positive multiple of ½.
fn ln_gamma_half(s: f64) -> f64 {
    let mut acc = 0.0;
    let mut v = s;
    while v > 1.0 + 1e-12 {
        v -= 1.0;
        acc += v.ln();
    }
    if (v - 0.5).abs() < 1e-12 {
        acc + 0.5 * std::f64::consts::PI.ln()
    } else {
        acc
    }
}

/// Estimated mass of terms beyond `bound`, from the ball-volume count
/// `N(k) ≈ ρ ω_d k^{d/2}` of tuples with form value at most `k`.
fn tail_estimate(ln_rho: f64, d: usize, bound: f64) -> f64 {
    let half = d as f64 / 2.0;
    let ln_omega = half * std::f64::consts::PI.ln() - ln_gamma_half(half + 1.0);
    // ∫_B^∞ ρ ω_d (d/2) k^{d/2 − 1} e^{−πk} dk by the trapezoid rule.
    let steps = 4000;
    let width = 60.0;
    let h = width / steps as f64;
    let f = |k: f64| (ln_rho + ln_omega + half.ln() + (half - 1.0) * k.ln() - std::f64::consts::PI * k).exp();
    let mut s = 0.5 * (f(bound) + f(bound + width));
    for i in 1..steps {
        s += f(bound + i as f64 * h);
    }
    s * h
}

/// `Σ exp(πi Σ_pq ⟨x_p, x_q⟩ T_pq)` over `g`-tuples of lattice vectors,
/// truncated by `Σ_pq ⟨x_p, x_q⟩ Im(T)_pq ≤ bound`.
pub fn lattice_theta(spec: &LatticeSpec, t: &SiegelPoint, opts: LatticeThetaOptions) -> Result<LatticeTheta> {
    spec.validate()?;
    let g = t.degree();
    let r = spec.rank();
    let d = r * g;
    if d > 32 && !opts.allow_large_degree {
        return Err(Error::Argument(format!(
            "lattice theta in degree {g} for rank {r} is too expensive; set allow_large_degree"
        )));
    }
    let gram = spec.gram_f64();
    let tm = t.matrix();
    let y = tm.map(|z| z.im);
    let q = y.kronecker(&gram);
    let cosets = spec.cosets();
    let ln_rho = g as f64 * ((cosets.len() as f64).ln() - 0.5 * gram.determinant().ln())
        - 0.5 * r as f64 * y.determinant().ln();
    let half = d as f64 / 2.0;
    let ln_omega = half * std::f64::consts::PI.ln() - ln_gamma_half(half + 1.0);
    let bound = match opts.bound {
        Some(b) => b,
        None => {
            let mut b = 1.0;
            while tail_estimate(ln_rho, d, b) >= opts.tol {
                b += 0.25;
            }
            b
        }
    };
    let predicted = (ln_rho + ln_omega + half * bound.ln()).exp();
    if predicted > opts.max_points {
        return Err(Error::Truncation(format!(
            "bound {bound} needs about {predicted:.3e} tuples (limit {:.3e})",
            opts.max_points
        )));
    }
    let tail = tail_estimate(ln_rho, d, bound);
    let warning = (tail >= opts.tol)
        .then(|| format!("bound {bound} leaves an estimated tail of {tail:.3e}"));

    // Embedded coordinates e = M x with Gram = Mᵀ M.
    let m = gram.clone().cholesky().expect("validated").l().transpose();
    let x_re = tm.map(|z| z.re);

    let mut value = Complex64::new(0.0, 0.0);
    let mut points = 0u64;
    let combos = cosets.len().pow(g as u32);
    for combo in 0..combos {
        let mut shift = Vec::with_capacity(d);
        let mut rest = combo;
        for _ in 0..g {
            shift.extend_from_slice(&cosets[rest % cosets.len()]);
            rest /= cosets.len();
        }
        let e = Enumerator::new(&q, &shift, bound);
        let tops = e.top_values();
        let partial = par::map_slice(&tops, |&top| {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut count = 0u64;
            let mut emb = vec![0.0; d];
            e.walk(top, &mut |x, form| {
                for p in 0..g {
                    for a in 0..r {
                        let mut s = 0.0;
                        for b in a..r {
                            s += m[(a, b)] * x[p * r + b];
                        }
                        emb[p * r + a] = s;
                    }
                }
                let mut phase = 0.0;
                for p in 0..g {
                    for qq in 0..g {
                        let dot: f64 = (0..r).map(|a| emb[p * r + a] * emb[qq * r + a]).sum();
                        phase += x_re[(p, qq)] * dot;
                    }
                }
                let pi = std::f64::consts::PI;
                sum += Complex64::from_polar((-pi * form).exp(), pi * phase);
                count += 1;
            });
            (sum, count)
        });
        for (s, c) in partial {
            value += s;
            points += c;
        }
    }
    Ok(LatticeTheta { value, bound, points, tail_estimate: tail, warning })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_lattices_are_even_unimodular() {
        for l in [LatticeSpec::e8(), LatticeSpec::d16_plus()] {
            l.validate().unwrap();
            assert!(l.is_unimodular(), "{}", l.name);
        }
        assert!((LatticeSpec::e8().determinant() - 1.0).abs() < 1e-9);
        // The glue vector (½, …, ½) has norm 16/4 = 4.
        let d = LatticeSpec::d16_plus();
        let c = nalgebra::DVector::from_column_slice(&d.glue[0]);
        assert!((c.dot(&(d.gram_f64() * &c)) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn root_counts() {
        assert_eq!(LatticeSpec::e8().shell_counts(4), vec![1, 240, 2160]);
        assert_eq!(LatticeSpec::d16_plus().shell_counts(2), vec![1, 480]);
    }

    #[test]
    fn odd_gram_is_rejected() {
        assert!(LatticeSpec::custom("Z", vec![vec![1]], vec![]).is_err());
        assert!(LatticeSpec::custom("A1", vec![vec![2]], vec![]).is_ok());
    }

    #[test]
    fn fixed_small_bound_warns() {
        let t = SiegelPoint::scalar(Complex64::new(0.0, 1.0)).unwrap();
        let opts = LatticeThetaOptions { bound: Some(2.5), ..Default::default() };
        let v = lattice_theta(&LatticeSpec::e8(), &t, opts).unwrap();
        assert_eq!(v.points, 241);
        assert!(v.warning.is_some());
    }
}
