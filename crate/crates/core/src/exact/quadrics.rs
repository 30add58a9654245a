use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::linalg::rational_kernel;
use super::tensor::{sym2_dim, SymMatrix};
use crate::error::{Error, Result};

pub type Quadric = SymMatrix<BigRational>;

/// Basis of the quadrics vanishing at every given point.
#[derive(Clone, Debug)]
pub struct QuadricBasis {
    pub g: usize,
    pub quadrics: Vec<Quadric>,
}

impl QuadricBasis {
    pub fn dim(&self) -> usize {
        self.quadrics.len()
    }
}

fn upper_pairs(g: usize) -> Vec<(usize, usize)> {
    (0..g).flat_map(|p| (p..g).map(move |q| (p, q))).collect()
}

fn common_dimension<T>(points: &[Vec<T>]) -> Result<usize> {
    let g = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::Argument("need at least one point".into()))?;
    if g == 0 || points.iter().any(|p| p.len() != g) {
        return Err(Error::Argument("points must share one positive dimension".into()));
    }
    Ok(g)
}

/// Exact basis of `{Q symmetric : vᵀ Q v = 0 for all points v}`.
pub fn quadrics_through(points: &[Vec<BigRational>]) -> Result<QuadricBasis> {
    let g = common_dimension(points)?;
    let pairs = upper_pairs(g);
    let two = BigRational::from_integer(2.into());
    let rows: Vec<Vec<BigRational>> = points
        .iter()
        .map(|v| {
            pairs
                .iter()
                .map(|&(p, q)| {
                    let c = &v[p] * &v[q];
                    if p == q {
                        c
                    } else {
                        c * &two
                    }
                })
                .collect()
        })
        .collect();
    let kernel = rational_kernel(&rows, sym2_dim(g));
    let quadrics = kernel
        .into_iter()
        .map(|coords| {
            let mut full = vec![vec![BigRational::zero(); g]; g];
            for (c, &(p, q)) in coords.into_iter().zip(&pairs) {
                full[p][q] = c.clone();
                full[q][p] = c;
            }
            SymMatrix::from_rows(full).expect("symmetric by construction")
        })
        .collect();
    Ok(QuadricBasis { g, quadrics })
}

/// Floating-point variant: the null space is read off the SVD, with singular
/// values below `rel_threshold × σ_max` treated as zero.
pub fn quadrics_through_float(
    points: &[Vec<Complex64>],
    rel_threshold: f64,
) -> Result<Vec<SymMatrix<Complex64>>> {
    let g = common_dimension(points)?;
    let pairs = upper_pairs(g);
    let width = pairs.len();
    // Pad to a square-or-tall matrix so the SVD exposes the whole null space.
    let height = points.len().max(width);
    let a = DMatrix::from_fn(height, width, |i, j| {
        if i >= points.len() {
            return Complex64::zero();
        }
        let (p, q) = pairs[j];
        let c = points[i][p] * points[i][q];
        if p == q {
            c
        } else {
            c * 2.0
        }
    });
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Diagnostic("SVD did not return V".into()))?;
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if top == 0.0 || s <= rel_threshold * top {
            let row = v_t.row(i);
            let mut full = vec![vec![Complex64::zero(); g]; g];
            for (j, &(p, q)) in pairs.iter().enumerate() {
                // Rows of Vᴴ; conjugate to get the null vector itself.
                let c = row[j].conj();
                full[p][q] = c;
                full[q][p] = c;
            }
            out.push(SymMatrix::from_rows(full)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, random_rational_vectors};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generic_points_cut_out_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_rational_vectors(&mut rng, 20, 4, false);
        assert_eq!(quadrics_through(&pts).unwrap().dim(), 0);
    }

    #[test]
    fn twisted_cubic_lies_on_three_quadrics() {
        let pts: Vec<Vec<BigRational>> = (-6..=6)
            .map(|t| {
                let t = q(t, 3);
                vec![q(1, 1), t.clone(), &t * &t, &t * &t * &t]
            })
            .collect();
        let basis = quadrics_through(&pts).unwrap();
        assert_eq!(basis.dim(), 3);
        for quad in &basis.quadrics {
            for p in &pts {
                assert!(quad.quadratic_form(p).is_zero());
            }
        }
    }

    #[test]
    fn single_point_imposes_one_condition() {
        for g in 1..6 {
            let mut v = vec![q(0, 1); g];
            v[0] = q(1, 1);
            assert_eq!(quadrics_through(&[v]).unwrap().dim(), g * (g + 1) / 2 - 1);
        }
    }

    #[test]
    fn float_variant_matches_exact_dimension() {
        let pts: Vec<Vec<Complex64>> = (-6..=6)
            .map(|t| {
                let t = t as f64 / 3.0;
                vec![1.0, t, t * t, t * t * t].into_iter().map(|x| Complex64::new(x, 0.0)).collect()
            })
            .collect();
        let qs = quadrics_through_float(&pts, 1e-10).unwrap();
        assert_eq!(qs.len(), 3);
        for quad in &qs {
            for p in &pts {
                let mut acc = Complex64::zero();
                for i in 0..4 {
                    for j in 0..4 {
                        acc += quad.get(i, j) * p[i] * p[j];
                    }
                }
                assert!(acc.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn mixed_dimensions_rejected() {
        assert!(quadrics_through(&[vec![q(1, 1)], vec![q(1, 1), q(0, 1)]]).is_err());
        assert!(quadrics_through(&[]).is_err());
    }
}
