use std::cmp::Ordering;

use super::model::SurfaceGermModel;
use super::profile::{solve_discrepancies, Mld};
use crate::coefflattice::{compare, Rational, SpanElement};
use crate::error::{Error, Result};

/// Brute-force mld: enumerates every tower of point blow-ups of length at
/// most `depth` over the germ fibre of the resolution.
///
/// A point is described by the boundary coefficients of the components
/// through it. Blowing it up creates a divisor with log discrepancy
/// `2 - Σ e` and boundary coefficient `Σ e - 1`; the nef part pulls back
/// crepantly and contributes nothing further. The result is minus infinity
/// when some enumerated value, or some codimension-one value `1 - b`, is
/// negative.
pub fn mld_oracle(m: &SurfaceGermModel, depth: u32) -> Result<Mld> {
    if depth == 0 {
        return Err(Error::InvalidArgument("oracle depth must be positive".into()));
    }
    let basis = m.basis();
    let one = SpanElement::one(basis);
    for b in m.branches() {
        if (&one - &b.coeff).signum()? == Ordering::Less {
            return Ok(Mld::NegInfinity);
        }
    }
    let a = solve_discrepancies(m)?;
    let g = m.graph();
    let coeff = |i: usize| &one - &a[i].1;
    let mut best: Option<SpanElement> = None;
    for (_, x) in &a {
        consider(&mut best, x.clone())?;
    }
    let mut points: Vec<Vec<SpanElement>> = Vec::new();
    if g.is_empty() {
        points.push(m.branches().iter().map(|b| b.coeff.clone()).collect());
    } else {
        points.extend((0..a.len()).map(|i| vec![coeff(i)]));
        points.extend(g.edges().map(|(p, q)| {
            vec![coeff(g.index_of(p).unwrap()), coeff(g.index_of(q).unwrap())]
        }));
        points.extend(m.branches().iter().map(|b| {
            vec![coeff(g.index_of(b.vertex.unwrap()).unwrap()), b.coeff.clone()]
        }));
    }
    let two = SpanElement::rational(basis, Rational::from_integer(2.into()));
    for p in points {
        blow_up(&p, depth, &one, &two, &mut best)?;
    }
    let best = best.expect("at least one blow-up is enumerated");
    Ok(if best.signum()? == Ordering::Less {
        Mld::NegInfinity
    } else {
        Mld::Value(best)
    })
}

fn consider(best: &mut Option<SpanElement>, x: SpanElement) -> Result<()> {
    let replace = match best {
        None => true,
        Some(b) => compare(&x, b)? == Ordering::Less,
    };
    if replace {
        *best = Some(x);
    }
    Ok(())
}

fn blow_up(
    point: &[SpanElement],
    depth: u32,
    one: &SpanElement,
    two: &SpanElement,
    best: &mut Option<SpanElement>,
) -> Result<()> {
    let total = point
        .iter()
        .fold(SpanElement::zero(one.basis()), |acc, e| &acc + e);
    consider(best, two - &total)?;
    if depth > 1 {
        let e_new = &total - one;
        blow_up(std::slice::from_ref(&e_new), depth - 1, one, two, best)?;
        for c in point {
            blow_up(&[e_new.clone(), c.clone()], depth - 1, one, two, best)?;
        }
    }
    Ok(())
}
