use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::graph::WeightedDualGraph;
use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

/// Weights on the diagonal, 1 for each edge, 0 elsewhere; rows follow the
/// graph's id order.
pub fn intersection_matrix(g: &WeightedDualGraph) -> IntMatrix {
    let n = g.len();
    let mut m = vec![vec![0i64; n]; n];
    for (i, v) in g.vertices().iter().enumerate() {
        m[i][i] = v.weight;
    }
    for (a, b) in g.edges() {
        let (i, j) = (g.index_of(a).unwrap(), g.index_of(b).unwrap());
        m[i][j] = 1;
        m[j][i] = 1;
    }
    m
}

fn check_square(m: &IntMatrix) -> Result<()> {
    if m.iter().any(|r| r.len() != m.len()) {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    Ok(())
}

/// Leading principal minors via fraction-free elimination without pivoting.
/// Stops after the first zero minor, since later pivots are undefined.
pub fn leading_minors(m: &IntMatrix) -> Result<Vec<BigInt>> {
    check_square(m)?;
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&pivot * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = pivot;
    }
    Ok(minors)
}

/// Sylvester's criterion: minors alternate in sign starting negative.
pub fn is_negative_definite(m: &IntMatrix) -> Result<bool> {
    check_square(m)?;
    let n = m.len();
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let minors = leading_minors(m)?;
    Ok(minors.len() == n
        && minors
            .iter()
            .enumerate()
            .all(|(k, d)| if k % 2 == 0 { d.is_negative() } else { d.is_positive() }))
}

/// Exact determinant (Bareiss with row pivoting). The empty matrix has
/// determinant 1.
pub fn det(m: &IntMatrix) -> Result<BigInt> {
    check_square(m)?;
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(BigInt::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(if n == 0 { BigInt::from(1) } else { prev * sign })
}
