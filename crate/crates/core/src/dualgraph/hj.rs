use num_integer::Integer;

use super::graph::WeightedDualGraph;
use crate::error::{Error, Result};

/// Minus continued fraction `n/q = b_1 - 1/(b_2 - ...)` with every `b_i >= 2`.
pub fn hj_expansion(n: i64, q: i64) -> Result<Vec<i64>> {
    if n < 2 || q < 1 || q >= n || n.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2, 1 <= q < n, gcd(n, q) = 1; got ({n}, {q})"
        )));
    }
    let (mut a, mut b) = (n, q);
    let mut out = Vec::new();
    while b != 0 {
        let c = Integer::div_ceil(&a, &b);
        out.push(c);
        (a, b) = (b, c * b - a);
    }
    Ok(out)
}

/// Minimal resolution chain of the cyclic quotient singularity `1/n(1, q)`.
pub fn hj_graph(n: i64, q: i64) -> Result<WeightedDualGraph> {
    let bs = hj_expansion(n, q)?;
    WeightedDualGraph::chain(&bs.iter().map(|b| -b).collect::<Vec<_>>())
}
