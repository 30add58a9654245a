use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Primes below 2^62 used for the modular rank bound.
const PRIMES: [u64; 3] = [4_611_686_018_427_387_847, 4_611_686_018_427_387_817, 4_611_686_018_427_387_787];

/// Rank of a list of rational row vectors.
///
/// The rank modulo a prime never exceeds the rank over Q, so when an
/// elimination over F_p already reaches the number of rows (or columns) the
/// answer is certified. Otherwise rows are scaled to integers and reduced by
/// fraction-free (Bareiss) elimination.
pub fn exact_rank(rows: &[Vec<BigRational>]) -> usize {
    let Some(width) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let nonzero = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).count();
    let ceiling = nonzero.min(width);
    for p in PRIMES {
        if modular_rank(rows, p) == Some(ceiling) {
            return ceiling;
        }
    }
    bareiss_rank(rows, width)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.iter_u64_digits().next().unwrap_or(0)
}

/// Rank over F_p, or `None` when some denominator vanishes mod `p`.
fn modular_rank(rows: &[Vec<BigRational>], p: u64) -> Option<usize> {
    let mut m = Vec::with_capacity(rows.len());
    for r in rows {
        let mut out = Vec::with_capacity(r.len());
        for x in r {
            let d = reduce(x.denom(), p);
            if d == 0 {
                return None;
            }
            out.push(mul_mod(reduce(x.numer(), p), pow_mod(d, p - 2, p), p));
        }
        m.push(out);
    }
    let (height, width) = (m.len(), rows[0].len());
    let mut rank = 0;
    for col in 0..width {
        if rank == height {
            break;
        }
        let Some(pr) = (rank..height).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for r in (rank + 1)..height {
            if m[r][col] == 0 {
                continue;
            }
            let f = mul_mod(m[r][col], inv, p);
            for c in col..width {
                let sub = mul_mod(f, m[rank][c], p);
                m[r][c] = (m[r][c] + p - sub) % p;
            }
        }
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank(rows: &[Vec<BigRational>], width: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    let height = m.len();
    let mut rank = 0;
    let mut prev_pivot = BigInt::one();
    for col in 0..width {
        if rank == height {
            break;
        }
        let Some(pivot_row) = (rank..height)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].abs())
        else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col].clone();
        for r in (rank + 1)..height {
            let factor = m[r][col].clone();
            for c in (col + 1)..width {
                let v = &pivot * &m[r][c] - &factor * &m[rank][c];
                m[r][c] = v / &prev_pivot;
            }
            m[r][col] = BigInt::zero();
        }
        prev_pivot = pivot;
        rank += 1;
    }
    rank
}

fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Basis of `{x : A x = 0}` for the rational matrix with the given rows,
/// via reduced row echelon form.
pub fn rational_kernel(rows: &[Vec<BigRational>], width: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let height = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r == height {
            break;
        }
        let Some(p) = (r..height).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for c in col..width {
            m[r][c] = &m[r][c] * &inv;
        }
        for i in 0..height {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in col..width {
                    let v = &m[r][c] * &f;
                    m[i][c] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); width];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Numerical rank: singular values at or below `rel_threshold × σ_max`
/// count as zero.
pub fn float_rank(rows: &[Vec<Complex64>], rel_threshold: f64) -> usize {
    singular_values(rows).map_or(0, |s| {
        let top = s.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            0
        } else {
            s.iter().filter(|&&x| x > rel_threshold * top).count()
        }
    })
}

/// Singular values in decreasing order, `None` for an empty input.
pub(crate) fn singular_values(rows: &[Vec<Complex64>]) -> Option<Vec<f64>> {
    let height = rows.len();
    let width = rows.first()?.len();
    if width == 0 {
        return None;
    }
    let m = DMatrix::from_fn(height, width, |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Some(s)
}
