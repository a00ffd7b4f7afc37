use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::model::SurfaceGermModel;
use super::oracle::mld_oracle;
use super::profile::{profile, smooth_point_mld, solve_discrepancies, DiscrepancyProfile, Mld};
use crate::coefflattice::{compare, linalg, Rational, SpanElement};
use crate::dualgraph::{det, intersection_matrix, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
}

impl Violation {
    fn new(check: &str, detail: String) -> Self {
        Violation {
            check: check.into(),
            detail,
        }
    }
}

fn lt(x: &SpanElement, y: &SpanElement) -> Result<bool> {
    Ok(compare(x, y)? == Ordering::Less)
}

fn rational(m: &SurfaceGermModel, q: Rational) -> SpanElement {
    SpanElement::rational(m.basis(), q)
}

/// Midpoint convexity along interior vertices, the `2 / (-E^2)` bound, and
/// the gap inequality at curves of weight at most -3.
///
/// Returns `None` when the hypotheses fail: the germ is not lc or some log
/// discrepancy exceeds 1.
pub fn check_convexity(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
) -> Result<Option<Vec<Violation>>> {
    let Mld::Value(mld) = &p.mld else {
        return Ok(None);
    };
    let one = SpanElement::one(m.basis());
    for (_, a) in &p.discrepancies {
        if compare(a, &one)? == Ordering::Greater {
            return Ok(None);
        }
    }
    let g = m.graph();
    let a = |v: VertexId| p.discrepancy(v).expect("profile covers every vertex");
    let mut out = Vec::new();
    for vert in g.vertices() {
        let v = vert.id;
        let av = a(v);
        let bound = rational(m, Rational::new(2.into(), (-vert.weight).into()));
        if lt(&bound, av)? {
            out.push(Violation::new(
                "convexity-bound",
                format!("vertex {v}: a = {av} > {bound}"),
            ));
        }
        if vert.weight > -2 {
            continue;
        }
        let nbrs: Vec<VertexId> = g.neighbors(v).collect();
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                let twice = av + av;
                let sum = a(u) + a(w);
                if lt(&sum, &twice)? {
                    out.push(Violation::new(
                        "convexity-midpoint",
                        format!("{u}-{v}-{w}: 2 a_{v} = {twice} > {sum}"),
                    ));
                }
            }
        }
        if vert.weight > -3 {
            continue;
        }
        for &u in &nbrs {
            for &w in &nbrs {
                if u == w {
                    continue;
                }
                let lhs = a(w) - av;
                let rhs = &(av - a(u)) + mld;
                if lt(&lhs, &rhs)? {
                    out.push(Violation::new(
                        "convexity-gap",
                        format!("{u}-{v}-{w}: a_{w} - a_{v} = {lhs} < {rhs}"),
                    ));
                }
            }
        }
    }
    Ok(Some(out))
}

/// A singular germ (nonempty minimal resolution) never has mld above 1.
/// Returns `None` when the model is not a minimal resolution or not lc.
pub fn check_singular_bound(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
) -> Result<Option<Vec<Violation>>> {
    let g = m.graph();
    if g.is_empty() || g.vertices().iter().any(|v| v.weight > -2) {
        return Ok(None);
    }
    let Mld::Value(mld) = &p.mld else {
        return Ok(None);
    };
    let mut out = Vec::new();
    if compare(mld, &SpanElement::one(m.basis()))? == Ordering::Greater {
        out.push(Violation::new(
            "singular-mld-above-one",
            format!("mld {mld} > 1 on a nonempty minimal resolution"),
        ));
    }
    Ok(Some(out))
}

/// On a smooth germ with boundary multiplicity at most 1, the mld is
/// `2 - mult`, and the depth-`depth` oracle agrees.
pub fn check_smooth_point(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
    depth: u32,
) -> Result<Option<Vec<Violation>>> {
    if !m.graph().is_empty() {
        return Ok(None);
    }
    let mult = m.branch_sum(None);
    if compare(&mult, &SpanElement::one(m.basis()))? == Ordering::Greater {
        return Ok(None);
    }
    let expected = smooth_point_mld(&mult)?;
    let mut out = Vec::new();
    if p.mld != Mld::Value(expected.clone()) {
        out.push(Violation::new(
            "smooth-point",
            format!("mld {} != 2 - mult = {expected}", p.mld),
        ));
    }
    let oracle = mld_oracle(m, depth)?;
    if oracle != Mld::Value(expected.clone()) {
        out.push(Violation::new(
            "smooth-point-oracle",
            format!("depth-{depth} oracle {oracle} != {expected}"),
        ));
    }
    Ok(Some(out))
}

/// No lc germ on a minimal resolution with all weights at most -2 and every
/// nonzero branch and load at least `δ` has `max{2/3, 1 - δ/2} < mld < 1`
/// attained at a vertex. `δ` is the least nonzero branch or load.
pub fn check_near_one_window(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
) -> Result<Option<Vec<Violation>>> {
    let g = m.graph();
    if g.is_empty() || g.vertices().iter().any(|v| v.weight > -2) {
        return Ok(None);
    }
    let Mld::Value(mld) = &p.mld else {
        return Ok(None);
    };
    let mut delta: Option<SpanElement> = None;
    for x in m.branches().iter().map(|b| &b.coeff).chain(m.loads().values()) {
        if x.is_zero() {
            continue;
        }
        if delta.as_ref().map_or(Ok(true), |d| lt(x, d))? {
            delta = Some(x.clone());
        }
    }
    let two_thirds = rational(m, Rational::new(2.into(), 3.into()));
    let lower = match delta {
        None => two_thirds,
        Some(d) => {
            let alt = &SpanElement::one(m.basis()) - &d.scale(&Rational::new(1.into(), 2.into()));
            if lt(&two_thirds, &alt)? {
                alt
            } else {
                two_thirds
            }
        }
    };
    let mut out = Vec::new();
    if lt(&lower, mld)? && lt(mld, &SpanElement::one(m.basis()))? {
        for v in p.computing_vertices() {
            out.push(Violation::new(
                "near-one-window",
                format!("mld {mld} in ({lower}, 1) computed at vertex {v}"),
            ));
        }
    }
    Ok(Some(out))
}

/// Coefficient of the different on a boundary curve `S` of coefficient 1,
/// with its integral decomposition
/// `ℓ (coeff - 1) + 1 = c0 + Σ α_k b_k + Σ β_j μ_j`, `ℓ = |det|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdjunctionDecomposition {
    pub coefficient: SpanElement,
    #[serde(serialize_with = "ser_big")]
    pub ell: BigInt,
    /// Constant term, carried by the coefficient 1 of `S` itself.
    #[serde(serialize_with = "ser_big")]
    pub c0: BigInt,
    /// Per other branch (index into the model's branches).
    #[serde(serialize_with = "ser_pairs")]
    pub alpha: Vec<(usize, BigInt)>,
    #[serde(serialize_with = "ser_pairs")]
    pub beta: Vec<(VertexId, BigInt)>,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_pairs<S: serde::Serializer, K: Serialize>(
    xs: &[(K, BigInt)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for (k, v) in xs {
        seq.serialize_element(&(k, v.to_string()))?;
    }
    seq.end()
}

impl AdjunctionDecomposition {
    /// Verifies nonnegativity of every integer and the identity exactly.
    pub fn verify(&self, m: &SurfaceGermModel) -> Vec<Violation> {
        let mut out = Vec::new();
        let ints = std::iter::once(&self.c0)
            .chain(self.alpha.iter().map(|(_, x)| x))
            .chain(self.beta.iter().map(|(_, x)| x));
        if ints.clone().any(|x| x.is_negative()) {
            out.push(Violation::new(
                "adjunction-form",
                format!("negative integer in decomposition: c0 = {}", self.c0),
            ));
        }
        let r = |x: &BigInt| Rational::from_integer(x.clone());
        let mut rhs = rational(m, r(&self.c0));
        for (k, x) in &self.alpha {
            rhs = &rhs + &m.branches()[*k].coeff.scale(&r(x));
        }
        for (v, x) in &self.beta {
            rhs = &rhs + &m.load(*v).scale(&r(x));
        }
        let one = SpanElement::one(m.basis());
        let lhs = &(&self.coefficient - &one).scale(&r(&self.ell)) + &one;
        if lhs != rhs {
            out.push(Violation::new(
                "adjunction-form",
                format!("l (coeff - 1) + 1 = {lhs} but decomposition gives {rhs}"),
            ));
        }
        out
    }
}

/// Adjunction to the boundary branch `s`, which must have coefficient 1.
pub fn adjunction_coefficient(m: &SurfaceGermModel, s: usize) -> Result<AdjunctionDecomposition> {
    let branch = m
        .branches()
        .get(s)
        .ok_or_else(|| Error::InvalidArgument(format!("no branch {s}")))?;
    if branch.coeff != SpanElement::one(m.basis()) {
        return Err(Error::InvalidArgument(format!(
            "branch {s} has coefficient {} != 1",
            branch.coeff
        )));
    }
    if !profile(m)?.classification.is_lc() {
        return Err(Error::NotLc);
    }
    let g = m.graph();
    let others = || m.branches().iter().enumerate().filter(move |(k, _)| *k != s);
    let Some(vs) = branch.vertex else {
        // Smooth germ: S meets each other branch once at the point.
        let coefficient = others().fold(SpanElement::zero(m.basis()), |acc, (_, b)| &acc + &b.coeff);
        return Ok(AdjunctionDecomposition {
            coefficient,
            ell: BigInt::from(1),
            c0: BigInt::zero(),
            alpha: others().map(|(k, _)| (k, BigInt::from(1))).collect(),
            beta: Vec::new(),
        });
    };
    let im = intersection_matrix(g);
    let ell = det(&im)?.abs();
    let a: Vec<Vec<Rational>> = im
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let inv = linalg::inverse(&a).ok_or(Error::NotNegativeDefinite)?;
    let i = g.index_of(vs).unwrap();
    let ell_r = Rational::from_integer(ell.clone());
    // ℓ N with N = -A^{-1}; integral because ℓ A^{-1} is the adjugate up to sign.
    let ln = |j: usize| -(&ell_r * &inv[i][j]);
    let as_int = |q: Rational| -> BigInt {
        debug_assert!(q.is_integer());
        q.to_integer()
    };
    let mut c0 = Rational::from_integer(1.into()) - &ell_r + ln(i);
    for (j, v) in g.vertices().iter().enumerate() {
        c0 -= ln(j) * Rational::from_integer((v.weight + 2).into());
    }
    let alpha = others()
        .map(|(k, b)| (k, as_int(ln(g.index_of(b.vertex.unwrap()).unwrap()))))
        .collect();
    let beta = m
        .loads()
        .keys()
        .map(|v| (*v, as_int(ln(g.index_of(*v).unwrap()))))
        .collect();
    let a_s = solve_discrepancies(m)?
        .into_iter()
        .find(|(v, _)| *v == vs)
        .map(|(_, x)| x)
        .unwrap();
    Ok(AdjunctionDecomposition {
        coefficient: &SpanElement::one(m.basis()) - &a_s,
        ell,
        c0: as_int(c0),
        alpha,
        beta,
    })
}
