use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use serde::Serialize;

use super::checks::Violation;
use super::model::{Branch, SurfaceGermModel};
use super::profile::{profile, DiscrepancyProfile, Locus, Mld};
use crate::coefflattice::{compare, Rational, SpanElement};
use crate::dualgraph::{find_chain, MarkedVertexPath, Vertex, VertexId, WeightedDualGraph};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolutionCase {
    /// The mld is computed on the given resolution.
    Minimal,
    /// One blow-up was needed; its exceptional curve is the unique
    /// computing divisor and the unique (-1)-curve it created.
    BlownUp,
}

#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub model: SurfaceGermModel,
    pub profile: DiscrepancyProfile,
    pub case: ResolutionCase,
    pub computing: VertexId,
}

/// A resolution on which some exceptional curve computes the mld. Since
/// higher discrepancies are combinations of SNC data, at most one blow-up
/// of the realizing node or branch point is ever needed.
pub fn resolution_model(m: &SurfaceGermModel) -> Result<ResolvedModel> {
    let p = profile(m)?;
    let locus = p.locus.clone().ok_or(Error::NotLc)?;
    if let Locus::Vertex { id } = locus {
        return Ok(ResolvedModel {
            model: m.clone(),
            profile: p,
            case: ResolutionCase::Minimal,
            computing: id,
        });
    }
    let (blown, new) = blow_up(m, &locus)?;
    let q = profile(&blown)?;
    Ok(ResolvedModel {
        model: blown,
        profile: q,
        case: ResolutionCase::BlownUp,
        computing: new,
    })
}

/// Blows up the point named by `locus` (a node, a branch point or the germ
/// point of a smooth germ). Returns the new model and the new vertex.
pub fn blow_up(m: &SurfaceGermModel, locus: &Locus) -> Result<(SurfaceGermModel, VertexId)> {
    let g = m.graph();
    let new = g.max_id().map_or(VertexId(0), |v| VertexId(v.0 + 1));
    let mut vertices: Vec<Vertex> = g.vertices().to_vec();
    let mut edges: Vec<(VertexId, VertexId)> = g.edges().collect();
    let mut branches = m.branches().to_vec();
    let lower = |ids: &[VertexId], vs: &mut Vec<Vertex>| {
        for v in vs.iter_mut().filter(|v| ids.contains(&v.id)) {
            v.weight -= 1;
        }
    };
    match *locus {
        Locus::Vertex { .. } => {
            return Err(Error::InvalidArgument("cannot blow up a curve".into()));
        }
        Locus::Edge { a, b } => {
            if !g.has_edge(a, b) {
                return Err(Error::InvalidArgument(format!("{a}-{b} is not an edge")));
            }
            lower(&[a, b], &mut vertices);
            edges.retain(|&e| e != (a, b) && e != (b, a));
            edges.push((a, new));
            edges.push((new, b));
        }
        Locus::BranchPoint { vertex, branch } => {
            let br = branches
                .get_mut(branch)
                .filter(|br| br.vertex == Some(vertex))
                .ok_or_else(|| Error::InvalidArgument(format!("no branch {branch} at {vertex}")))?;
            br.vertex = Some(new);
            lower(&[vertex], &mut vertices);
            edges.push((vertex, new));
        }
        Locus::GermPoint => {
            if !g.is_empty() {
                return Err(Error::InvalidArgument("germ point of a nonempty graph".into()));
            }
            branches = branches
                .into_iter()
                .map(|b| Branch {
                    vertex: Some(new),
                    coeff: b.coeff,
                })
                .collect();
        }
    }
    vertices.push(Vertex { id: new, weight: -1 });
    let graph = WeightedDualGraph::new(vertices, edges)?;
    let model = SurfaceGermModel::new(
        m.basis(),
        graph,
        branches,
        m.loads().clone(),
        m.epsilon().cloned(),
    )?;
    Ok((model, new))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathCase {
    /// `E_1` does not compute the mld.
    Separated,
    /// `E_1..E_m` all compute it, and the side of `E_0` away from `E_1`
    /// is fork-free with no other computing curve.
    Plateau,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathConditions {
    /// `3^(2m+1) >= 2n+1`, i.e. `m >= n'/2`.
    pub long_enough: bool,
    /// `E_0` computes the mld.
    pub starts_computing: bool,
    pub case: Option<PathCase>,
    /// `0 <= a_1 - a_0 <= 1/m`.
    pub gap: bool,
}

impl PathConditions {
    pub fn all(&self) -> bool {
        self.long_enough && self.starts_computing && self.case.is_some() && self.gap
    }
}

/// Extra conditions that apply once `min{ε, δ} > 16/n'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtraConditions {
    /// `E_i` is a (-2)-curve for `1 <= i <= m/2`.
    pub minus_two_prefix: bool,
    /// `|Γ_{E_0,E_1}| <= 16/min{ε,δ} + 1`, checked when `δ <= 2/3`.
    pub small_side: Option<bool>,
    /// `E_0` alone on its side, checked when `E_0` is a (-1)-curve.
    pub minus_one_alone: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComputingPath {
    pub path: MarkedVertexPath,
    pub vertex_count: usize,
    /// Length of the auxiliary chain, the least `l` with `3^(l+1) >= 2n+1`.
    pub chain_length: u32,
    pub conditions: PathConditions,
    /// `None` when the `16/n'` hypothesis fails.
    pub extras: Option<ExtraConditions>,
}

fn pow3(k: u32) -> BigInt {
    Pow::pow(BigInt::from(3), k)
}

/// Side of the tree at `e` after deleting the edge `e - f`.
fn side(g: &WeightedDualGraph, e: VertexId, f: VertexId) -> BTreeSet<VertexId> {
    g.components_without(&BTreeSet::from([f]))
        .into_iter()
        .find(|c| c.contains(&e))
        .unwrap_or_default()
}

fn fork_free(g: &WeightedDualGraph, ids: &BTreeSet<VertexId>) -> bool {
    ids.iter()
        .all(|&v| g.neighbors(v).filter(|w| ids.contains(w)).count() <= 2)
}

/// Evaluates the path conditions exactly for a candidate path.
pub fn path_conditions(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
    path: &MarkedVertexPath,
) -> Result<PathConditions> {
    let g = m.graph();
    path.validate(g)?;
    let ids = path.ids();
    let len = path.len();
    let n = g.len();
    let computing: BTreeSet<VertexId> = p.computing_vertices().into_iter().collect();
    let long_enough = len >= 1 && pow3(2 * len as u32 + 1) >= BigInt::from(2 * n + 1);
    let starts_computing = computing.contains(&ids[0]);
    let mut case = None;
    let mut gap = false;
    if len >= 1 {
        if !computing.contains(&ids[1]) {
            case = Some(PathCase::Separated);
        } else if ids[1..].iter().all(|v| computing.contains(v)) {
            let s = side(g, ids[0], ids[1]);
            if s.iter().all(|v| *v == ids[0] || !computing.contains(v)) && fork_free(g, &s) {
                case = Some(PathCase::Plateau);
            }
        }
        let a0 = p.discrepancy(ids[0]).unwrap();
        let a1 = p.discrepancy(ids[1]).unwrap();
        let d = a1 - a0;
        let bound = SpanElement::rational(m.basis(), Rational::new(1.into(), (len as i64).into()));
        gap = d.signum()? != Ordering::Less && compare(&d, &bound)? != Ordering::Greater;
    }
    Ok(PathConditions {
        long_enough,
        starts_computing,
        case,
        gap,
    })
}

/// Every simple path satisfying the path conditions; the brute-force
/// counterpart of [`find_computing_path`].
pub fn all_computing_paths(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
) -> Result<Vec<MarkedVertexPath>> {
    let g = m.graph();
    let mut out = Vec::new();
    for v in p.computing_vertices() {
        for len in 1..g.len() {
            for path in crate::dualgraph::simple_paths_from(g, v, len) {
                if path_conditions(m, p, &path)?.all() {
                    out.push(path);
                }
            }
        }
    }
    Ok(out)
}

/// Finds an edge path `E_0 - ... - E_m` from a computing curve with
/// `m >= n'/2`, `n' = log_3(2n+1) - 1`, in the separated or plateau case,
/// and with `0 <= a_1 - a_0 <= 1/m`.
///
/// Needs `0 < mld < 1` attained at a vertex (see [`resolution_model`]) and
/// `n' >= 1`, i.e. at least 4 curves.
pub fn find_computing_path(m: &SurfaceGermModel, p: &DiscrepancyProfile) -> Result<ComputingPath> {
    let g = m.graph();
    let Mld::Value(mld) = &p.mld else {
        return Err(Error::HypothesesUnmet("germ is not lc".into()));
    };
    if mld.signum()? != Ordering::Greater
        || compare(mld, &SpanElement::one(m.basis()))? != Ordering::Less
    {
        return Err(Error::HypothesesUnmet(format!("mld {mld} not in (0, 1)")));
    }
    if !matches!(p.locus, Some(Locus::Vertex { .. })) {
        return Err(Error::HypothesesUnmet(
            "mld not attained at a vertex; blow up first".into(),
        ));
    }
    let n = g.len();
    let target = BigInt::from(2 * n + 1);
    if pow3(2) > target {
        return Err(Error::HypothesesUnmet(format!(
            "{n} curves give n' < 1; need at least 4"
        )));
    }
    if !g.is_tree() {
        return Err(Error::HypothesesUnmet("dual graph is not a tree".into()));
    }
    let chain_length = (1..).find(|&k| pow3(k + 1) >= target).unwrap();
    let computing: BTreeSet<VertexId> = p.computing_vertices().into_iter().collect();
    let f0 = *computing
        .iter()
        .find(|&&v| g.degree(v) <= 3)
        .ok_or_else(|| Error::HypothesesUnmet("every computing curve has degree > 3".into()))?;
    let f = find_chain(g, f0, chain_length)?;
    let fs = f.ids();
    let j = (0..fs.len()).rev().find(|&i| computing.contains(&fs[i])).unwrap();
    let path = if pow3(2 * j as u32 + 1) < target {
        fs[j..].to_vec()
    } else {
        plateau_path(g, &computing, &fs[..=j])?
    };
    let path = MarkedVertexPath(path);
    let conditions = path_conditions(m, p, &path)?;
    let extras = extra_conditions(m, mld, &path)?;
    Ok(ComputingPath {
        path,
        vertex_count: n,
        chain_length,
        conditions,
        extras,
    })
}

/// `fs` is a run of computing curves `F_0..F_j`. Extends it through the
/// fork-free end at `F_0` (or else at `F_j`) to the farthest computing
/// curve there, which becomes `E_0`.
fn plateau_path(
    g: &WeightedDualGraph,
    computing: &BTreeSet<VertexId>,
    fs: &[VertexId],
) -> Result<Vec<VertexId>> {
    let reversed: Vec<VertexId> = fs.iter().rev().copied().collect();
    for run in [fs, reversed.as_slice()] {
        let (start, next) = (run[0], run[1]);
        let s = side(g, start, next);
        let inner = |v: VertexId| g.neighbors(v).filter(|w| s.contains(w)).count();
        if !fork_free(g, &s) || inner(start) > 1 {
            continue;
        }
        let mut walk = vec![start];
        let mut prev = None;
        let mut cur = start;
        while let Some(w) = g.neighbors(cur).find(|w| s.contains(w) && Some(*w) != prev) {
            walk.push(w);
            prev = Some(cur);
            cur = w;
        }
        let k = (0..walk.len()).rev().find(|&i| computing.contains(&walk[i])).unwrap();
        let mut path: Vec<VertexId> = walk[..=k].iter().rev().copied().collect();
        path.extend_from_slice(&run[1..]);
        return Ok(path);
    }
    Err(Error::HypothesesUnmet(
        "neither end of the computing run is fork-free".into(),
    ))
}

/// Decides `t > 16 / n'` for `n' = log_3(2n+1) - 1`, i.e.
/// `2n+1 > 3^(1 + 16/t)`, by bracketing `t` with its enclosures.
pub fn exceeds_sixteen_over(t: &SpanElement, n: usize) -> Result<bool> {
    if t.signum()? != Ordering::Greater {
        return Ok(false);
    }
    let base = 2 * n as u64 + 1;
    let holds_at = |r: &Rational| -> Option<bool> {
        // base^p > 3^(p + 16 q) for r = p/q > 0.
        let p = r.numer().to_u32()?;
        let q = r.denom().to_u32()?;
        let lhs = p as f64 * (base as f64).ln();
        let rhs = (p as f64 + 16.0 * q as f64) * 3f64.ln();
        if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
            return Some(lhs > rhs);
        }
        if p > 4096 {
            return None;
        }
        Some(Pow::pow(BigInt::from(base), p) > pow3(p + 16 * q))
    };
    if let Some(q) = t.as_rational() {
        return holds_at(q).ok_or(Error::RefinementExhausted { steps: 0 });
    }
    for iv in t.enclosures().take(t.basis().budget() + 1) {
        if iv.lo > Rational::from_integer(0.into()) && holds_at(&iv.lo) == Some(true) {
            return Ok(true);
        }
        if holds_at(&iv.hi) == Some(false) {
            return Ok(false);
        }
    }
    Err(Error::RefinementExhausted {
        steps: t.basis().budget(),
    })
}

fn extra_conditions(
    m: &SurfaceGermModel,
    mld: &SpanElement,
    path: &MarkedVertexPath,
) -> Result<Option<ExtraConditions>> {
    let g = m.graph();
    let mut t = mld.clone();
    let mut delta: Option<SpanElement> = None;
    for x in m.branches().iter().map(|b| &b.coeff).chain(m.loads().values()) {
        if x.is_zero() {
            continue;
        }
        if delta.as_ref().map_or(Ok(true), |d| compare(x, d).map(|o| o == Ordering::Less))? {
            delta = Some(x.clone());
        }
    }
    if let Some(d) = &delta {
        if compare(d, &t)? == Ordering::Less {
            t = d.clone();
        }
    }
    if !exceeds_sixteen_over(&t, g.len())? {
        return Ok(None);
    }
    let ids = path.ids();
    let mlen = path.len();
    let minus_two_prefix = (1..=mlen / 2).all(|i| g.weight(ids[i]) == Some(-2));
    let s = side(g, ids[0], ids[1]);
    let two_thirds = SpanElement::rational(m.basis(), Rational::new(2.into(), 3.into()));
    let small_side = match &delta {
        Some(d) if compare(d, &two_thirds)? == Ordering::Greater => None,
        _ => {
            let lhs = t.scale(&Rational::from_integer((s.len() as i64 - 1).into()));
            let sixteen = SpanElement::rational(m.basis(), Rational::from_integer(16.into()));
            Some(compare(&lhs, &sixteen)? != Ordering::Greater)
        }
    };
    let minus_one_alone = (g.weight(ids[0]) == Some(-1)).then_some(s.len() == 1);
    Ok(Some(ExtraConditions {
        minus_two_prefix,
        small_side,
        minus_one_alone,
    }))
}

/// Violations of the path conditions for a resolved lc germ, or `None`
/// when the finder's hypotheses are unmet.
pub fn check_computing_path(m: &SurfaceGermModel) -> Result<Option<Vec<Violation>>> {
    let r = match resolution_model(m) {
        Ok(r) => r,
        Err(Error::NotLc) => return Ok(None),
        Err(e) => return Err(e),
    };
    let found = match find_computing_path(&r.model, &r.profile) {
        Ok(c) => c,
        Err(Error::HypothesesUnmet(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    if !found.conditions.all() {
        out.push(Violation {
            check: "computing-path".into(),
            detail: format!("path {:?} fails {:?}", found.path.ids(), found.conditions),
        });
    }
    if let Some(x) = &found.extras {
        if !x.minus_two_prefix || x.small_side == Some(false) || x.minus_one_alone == Some(false) {
            out.push(Violation {
                check: "computing-path-extra".into(),
                detail: format!("path {:?} fails {:?}", found.path.ids(), x),
            });
        }
    }
    Ok(Some(out))
}
