use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use super::model::SurfaceGermModel;
use crate::coefflattice::{compare, linalg, Rational, SpanElement};
use crate::dualgraph::{intersection_matrix, VertexId};
use crate::error::{Error, Result};

/// A minimal log discrepancy: a value in the span, or minus infinity for
/// germs that are not lc.
#[derive(Clone, Debug, PartialEq)]
pub enum Mld {
    NegInfinity,
    Value(SpanElement),
}

impl Mld {
    pub fn value(&self) -> Option<&SpanElement> {
        match self {
            Mld::NegInfinity => None,
            Mld::Value(v) => Some(v),
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Mld::NegInfinity)
    }
}

impl fmt::Display for Mld {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mld::NegInfinity => f.write_str("-inf"),
            Mld::Value(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Mld {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mld::NegInfinity => s.serialize_str("-inf"),
            Mld::Value(v) => v.serialize(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    NotLc,
    Lc,
    Klt,
    EpsilonLc(SpanElement),
}

impl Classification {
    pub fn is_lc(&self) -> bool {
        !matches!(self, Classification::NotLc)
    }

    pub fn label(&self) -> String {
        match self {
            Classification::NotLc => "not-lc".into(),
            Classification::Lc => "lc".into(),
            Classification::Klt => "klt".into(),
            Classification::EpsilonLc(e) => format!("eps-lc({e})"),
        }
    }
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Where a minimal log discrepancy is attained on the resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Locus {
    /// An exceptional curve.
    Vertex { id: VertexId },
    /// The blow-up of the node `E_a ∩ E_b`.
    Edge { a: VertexId, b: VertexId },
    /// The blow-up of the point where branch `branch` meets `vertex`.
    BranchPoint { vertex: VertexId, branch: usize },
    /// The blow-up of the germ point of a smooth germ.
    GermPoint,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Vertex { id } => write!(f, "vertex {id}"),
            Locus::Edge { a, b } => write!(f, "edge {a}-{b}"),
            Locus::BranchPoint { vertex, branch } => write!(f, "branch {branch} at {vertex}"),
            Locus::GermPoint => f.write_str("germ point"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyProfile {
    /// Log discrepancies in vertex id order.
    pub discrepancies: Vec<(VertexId, SpanElement)>,
    pub mld: Mld,
    pub classification: Classification,
    pub locus: Option<Locus>,
}

impl DiscrepancyProfile {
    pub fn discrepancy(&self, v: VertexId) -> Option<&SpanElement> {
        self.discrepancies
            .iter()
            .find(|(id, _)| *id == v)
            .map(|(_, a)| a)
    }

    /// Vertices whose log discrepancy equals the mld.
    pub fn computing_vertices(&self) -> Vec<VertexId> {
        match &self.mld {
            Mld::NegInfinity => Vec::new(),
            Mld::Value(m) => self
                .discrepancies
                .iter()
                .filter(|(_, a)| a == m)
                .map(|(v, _)| *v)
                .collect(),
        }
    }
}

/// Solves `Σ_i (1 - a_i)(E_i . E_j) = e_j + 2 - β_j - μ_j` for the log
/// discrepancies `a_i`, one basis coordinate at a time.
pub fn solve_discrepancies(m: &SurfaceGermModel) -> Result<Vec<(VertexId, SpanElement)>> {
    let g = m.graph();
    if g.is_empty() {
        return Ok(Vec::new());
    }
    let basis = m.basis();
    let a: Vec<Vec<Rational>> = intersection_matrix(g)
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let rhs: Vec<Vec<Rational>> = g
        .vertices()
        .iter()
        .map(|v| {
            let r = &(&SpanElement::rational(basis, Rational::from_integer((v.weight + 2).into()))
                - &m.branch_sum(Some(v.id)))
                - &m.load(v.id);
            r.coords().to_vec()
        })
        .collect();
    let x = linalg::solve(&a, &rhs).ok_or(Error::NotNegativeDefinite)?;
    g.vertices()
        .iter()
        .zip(x)
        .map(|(v, xi)| {
            let one_minus = SpanElement::new(basis, xi)?;
            Ok((v.id, &SpanElement::one(basis) - &one_minus))
        })
        .collect()
}

/// Candidate log discrepancies over the germ point on the resolution, in
/// tie-break order: vertices, then nodes, then branch points. A smooth germ
/// contributes the single blow-up of the point.
pub fn candidates(
    m: &SurfaceGermModel,
    a: &[(VertexId, SpanElement)],
) -> Vec<(Locus, SpanElement)> {
    let basis = m.basis();
    let one = SpanElement::one(basis);
    let g = m.graph();
    if g.is_empty() {
        let two = SpanElement::rational(basis, Rational::from_integer(2.into()));
        return vec![(Locus::GermPoint, &two - &m.branch_sum(None))];
    }
    let disc = |v: VertexId| &a[g.index_of(v).unwrap()].1;
    let mut out: Vec<(Locus, SpanElement)> = a
        .iter()
        .map(|(v, x)| (Locus::Vertex { id: *v }, x.clone()))
        .collect();
    out.extend(g.edges().map(|(p, q)| (Locus::Edge { a: p, b: q }, disc(p) + disc(q))));
    out.extend(m.branches().iter().enumerate().filter_map(|(k, b)| {
        let v = b.vertex?;
        Some((
            Locus::BranchPoint { vertex: v, branch: k },
            &(&one + disc(v)) - &b.coeff,
        ))
    }));
    out
}

/// First minimum under `compare`; earlier entries win ties.
pub(crate) fn first_min<T>(items: Vec<(T, SpanElement)>) -> Result<Option<(T, SpanElement)>> {
    let mut best: Option<(T, SpanElement)> = None;
    for (t, x) in items {
        let replace = match &best {
            None => true,
            Some((_, b)) => compare(&x, b)? == Ordering::Less,
        };
        if replace {
            best = Some((t, x));
        }
    }
    Ok(best)
}

pub fn classify(mld: &Mld, epsilon: Option<&SpanElement>) -> Result<Classification> {
    let Mld::Value(v) = mld else {
        return Ok(Classification::NotLc);
    };
    if let Some(e) = epsilon {
        if e.is_positive()? && compare(v, e)? != Ordering::Less {
            return Ok(Classification::EpsilonLc(e.clone()));
        }
    }
    Ok(if v.is_positive()? {
        Classification::Klt
    } else {
        Classification::Lc
    })
}

/// Log discrepancies, mld over the germ point, its locus and the
/// lc / klt / ε-lc classification.
pub fn profile(m: &SurfaceGermModel) -> Result<DiscrepancyProfile> {
    let a = solve_discrepancies(m)?;
    let one = SpanElement::one(m.basis());
    let mut not_lc = false;
    for b in m.branches() {
        not_lc |= compare(&b.coeff, &one)? == Ordering::Greater;
    }
    for (_, x) in &a {
        not_lc |= x.signum()? == Ordering::Less;
    }
    let (mld, locus) = if not_lc {
        (Mld::NegInfinity, None)
    } else {
        let (locus, value) = first_min(candidates(m, &a))?.expect("candidate set is never empty");
        if value.signum()? == Ordering::Less {
            (Mld::NegInfinity, None)
        } else {
            (Mld::Value(value), Some(locus))
        }
    };
    let classification = classify(&mld, m.epsilon())?;
    Ok(DiscrepancyProfile {
        discrepancies: a,
        mld,
        classification,
        locus,
    })
}

pub fn mld_point(m: &SurfaceGermModel) -> Result<(Mld, Option<Locus>)> {
    let p = profile(m)?;
    Ok((p.mld, p.locus))
}

/// `2 - mult`, the mld at a smooth point whose boundary has multiplicity
/// `mult ≤ 1` there; attained by the first blow-up.
pub fn smooth_point_mld(mult: &SpanElement) -> Result<SpanElement> {
    let basis = mult.basis();
    if mult.signum()? == Ordering::Less {
        return Err(Error::InvalidArgument("multiplicity must be nonnegative".into()));
    }
    if compare(mult, &SpanElement::one(basis))? == Ordering::Greater {
        return Err(Error::HypothesesUnmet(
            "multiplicity exceeds 1; use the full model".into(),
        ));
    }
    Ok(&SpanElement::rational(basis, Rational::from_integer(2.into())) - mult)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenericTarget {
    Vertex(VertexId),
    Branch(usize),
}

/// mld at the generic point of a curve with boundary coefficient `c`, which
/// is `1 - c`, together with the value `2 - c` at a general closed point.
pub fn generic_point_mld(
    m: &SurfaceGermModel,
    target: GenericTarget,
) -> Result<(SpanElement, SpanElement)> {
    let one = SpanElement::one(m.basis());
    let generic = match target {
        GenericTarget::Branch(k) => {
            let b = m
                .branches()
                .get(k)
                .ok_or_else(|| Error::InvalidArgument(format!("no branch {k}")))?;
            &one - &b.coeff
        }
        GenericTarget::Vertex(v) => {
            let a = solve_discrepancies(m)?;
            a.into_iter()
                .find(|(id, _)| *id == v)
                .map(|(_, x)| x)
                .ok_or_else(|| Error::InvalidArgument(format!("no vertex {v}")))?
        }
    };
    let closed = &generic + &one;
    Ok((generic, closed))
}
