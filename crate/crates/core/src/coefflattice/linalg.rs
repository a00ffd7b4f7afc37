//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use super::rational::Rational;

/// Solves `A X = B` for square `A`; `None` when `A` is singular.
///
/// `a` is row-major `n x n`, `b` is row-major `n x k`.
pub fn solve(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n));
    debug_assert_eq!(b.len(), n);
    let k = b.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect())
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..n + k {
                if m[col][c].is_zero() {
                    continue;
                }
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    let mut x = vec![vec![Rational::zero(); k]; n];
    for row in (0..n).rev() {
        for j in 0..k {
            let mut acc = m[row][n + j].clone();
            for c in row + 1..n {
                if !m[row][c].is_zero() && !x[c][j].is_zero() {
                    acc -= &m[row][c] * &x[c][j];
                }
            }
            x[row][j] = acc / &m[row][row];
        }
    }
    Some(x)
}

/// Inverse of a square rational matrix.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let id: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    solve(a, &id)
}

/// Writes `target` as a rational combination of `generators` (all the same
/// length), if possible. Generators may be linearly dependent; the returned
/// coefficients then use only a pivot subset.
pub fn express(generators: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let g = generators.len();
    let dim = target.len();
    // Columns are generators; augmented with the target.
    let mut m: Vec<Vec<Rational>> = (0..dim)
        .map(|row| {
            generators
                .iter()
                .map(|v| v[row].clone())
                .chain(std::iter::once(target[row].clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..g {
        let Some(p) = (r..dim).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..dim {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..=g {
                if m[r][j].is_zero() {
                    continue;
                }
                let delta = &factor * &m[r][j];
                m[i][j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
        if r == dim {
            break;
        }
    }
    if (r..dim).any(|i| !m[i][g].is_zero()) {
        return None;
    }
    let mut coeffs = vec![Rational::zero(); g];
    for (row, &c) in pivots.iter().enumerate() {
        coeffs[c] = m[row][g].clone();
    }
    Some(coeffs)
}

/// Rank of a set of rational vectors.
pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for v in vectors {
        if express(&basis, v).is_none() {
            basis.push(v.clone());
        }
    }
    basis.len()
}
