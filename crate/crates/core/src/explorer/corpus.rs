//! Seeded model families shared by scans, tests and benchmarks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_integer::Integer;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefflattice::basis::sqrt2_source;
use crate::coefflattice::rational::rat;
use crate::coefflattice::{BasisDescriptor, Rational, SpanElement, Symbol};
use crate::discrepancy::{Branch, SurfaceGermModel};
use crate::dualgraph::{hj_graph, intersection_matrix, is_negative_definite, Vertex, VertexId, WeightedDualGraph};
use crate::error::Result;

pub const MAX_HJ_N: i64 = 30;
pub const MAX_TREE_VERTICES: u32 = 8;

/// The basis `(1, sqrt2)` used by the random corpus.
pub fn corpus_basis() -> Arc<BasisDescriptor> {
    BasisDescriptor::new(
        vec![Symbol {
            name: "sqrt2".into(),
            source: sqrt2_source(),
        }],
        true,
    )
    .expect("sqrt2 enclosure is valid")
}

/// `{0, 1/3, 1/2, 2/3, 5/6, 1, sqrt2/2}` over `basis`, which must contain a
/// symbol named `sqrt2` for the last entry.
pub fn coefficient_set(basis: &Arc<BasisDescriptor>) -> Vec<SpanElement> {
    let mut out: Vec<SpanElement> = [(0, 1), (1, 3), (1, 2), (2, 3), (5, 6), (1, 1)]
        .iter()
        .map(|&(n, d)| SpanElement::rational(basis, rat(n, d)))
        .collect();
    if let Some(i) = basis.index_of("sqrt2") {
        out.push(SpanElement::symbol(basis, i).scale(&rat(1, 2)));
    }
    out
}

fn bare(graph: WeightedDualGraph) -> Result<SurfaceGermModel> {
    SurfaceGermModel::new(&BasisDescriptor::rationals(), graph, vec![], BTreeMap::new(), None)
}

/// Cyclic quotient chains `1/n(1, q)` for `n_min ≤ n ≤ n_max`; every
/// `q` coprime to `n` when `q` is `None`.
pub fn hj_family(n_min: i64, n_max: i64, q: Option<i64>) -> Result<Vec<SurfaceGermModel>> {
    let mut out = Vec::new();
    for n in n_min.max(2)..=n_max {
        let qs: Vec<i64> = match q {
            Some(q) => vec![q],
            None => (1..n).filter(|q| q.gcd(&n) == 1).collect(),
        };
        for q in qs {
            out.push(bare(hj_graph(n, q)?)?);
        }
    }
    Ok(out)
}

/// `A_n`: chains of `n` curves of weight -2, `1 ≤ n ≤ n_max`.
pub fn a_family(n_max: usize) -> Result<Vec<SurfaceGermModel>> {
    (1..=n_max)
        .map(|n| bare(WeightedDualGraph::chain(&vec![-2; n])?))
        .collect()
}

/// `1/n(1, 1)`: a single curve of weight `-n`, `2 ≤ n ≤ n_max`.
pub fn cone_family(n_max: i64) -> Result<Vec<SurfaceGermModel>> {
    (2..=n_max)
        .map(|n| bare(WeightedDualGraph::chain(&[-n])?))
        .collect()
}

fn coprime_q(rng: &mut ChaCha8Rng, n: i64) -> i64 {
    loop {
        let q = rng.random_range(1..n);
        if q.gcd(&n) == 1 {
            return q;
        }
    }
}

/// Random recursive tree with weights in `[-5, -2]`, redrawn until the
/// intersection matrix is negative definite.
fn random_tree(rng: &mut ChaCha8Rng) -> Result<WeightedDualGraph> {
    loop {
        let n = rng.random_range(1..=MAX_TREE_VERTICES);
        let vertices = (0..n)
            .map(|i| Vertex {
                id: VertexId(i),
                weight: rng.random_range(-5..=-2),
            })
            .collect();
        let edges = (1..n)
            .map(|i| (VertexId(rng.random_range(0..i)), VertexId(i)))
            .collect();
        let g = WeightedDualGraph::new(vertices, edges)?;
        if is_negative_definite(&intersection_matrix(&g))? {
            return Ok(g);
        }
    }
}

fn decorate(
    rng: &mut ChaCha8Rng,
    basis: &Arc<BasisDescriptor>,
    graph: WeightedDualGraph,
    set: &[SpanElement],
) -> Result<SurfaceGermModel> {
    let ids: Vec<VertexId> = graph.ids().collect();
    let branches = (0..rng.random_range(0..=2))
        .map(|_| Branch {
            vertex: Some(*ids.choose(rng).expect("nonempty graph")),
            coeff: set.choose(rng).expect("nonempty set").clone(),
        })
        .collect();
    let mut loads = BTreeMap::new();
    for &v in &ids {
        if rng.random_bool(0.25) {
            loads.insert(v, set.choose(rng).expect("nonempty set").clone());
        }
    }
    SurfaceGermModel::new(basis, graph, branches, loads, None)
}

/// Seeded mix of Hirzebruch-Jung chains (`n ≤ 30`) and random trees
/// (at most 8 vertices), each with up to two branches and random loads
/// drawn from [`coefficient_set`] over [`corpus_basis`].
pub fn random_corpus(seed: u64, count: usize) -> Result<Vec<SurfaceGermModel>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = corpus_basis();
    let set = coefficient_set(&basis);
    (0..count)
        .map(|k| {
            let graph = if k % 2 == 0 {
                let n = rng.random_range(2..=MAX_HJ_N);
                hj_graph(n, coprime_q(&mut rng, n))?
            } else {
                random_tree(&mut rng)?
            };
            decorate(&mut rng, &basis, graph, &set)
        })
        .collect()
}

/// Seeded smooth germs: empty graph with one to three branches from the
/// coefficient set.
pub fn smooth_family(seed: u64, count: usize) -> Result<Vec<SurfaceGermModel>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = corpus_basis();
    let set = coefficient_set(&basis);
    (0..count)
        .map(|_| {
            let branches = (0..rng.random_range(1..=3))
                .map(|_| Branch {
                    vertex: None,
                    coeff: set.choose(&mut rng).expect("nonempty set").clone(),
                })
                .collect();
            SurfaceGermModel::new(&basis, WeightedDualGraph::empty(), branches, BTreeMap::new(), None)
        })
        .collect()
}

/// Every Hirzebruch-Jung chain with `n ≤ n_max`, a transverse coefficient-1
/// curve at each end in turn, and an optional second branch `b` at the
/// other end.
pub fn transverse_family(n_max: i64, extra: &[Rational]) -> Result<Vec<SurfaceGermModel>> {
    let q = BasisDescriptor::rationals();
    let mut out = Vec::new();
    for g in hj_family(2, n_max, None)? {
        let ends: BTreeSet<VertexId> = [g.graph().ids().next(), g.graph().ids().last()]
            .into_iter()
            .flatten()
            .collect();
        for &s in &ends {
            let other = *ends.iter().find(|&&e| e != s).unwrap_or(&s);
            let one = Branch {
                vertex: Some(s),
                coeff: SpanElement::one(&q),
            };
            out.push(g.with_branches(vec![one.clone()])?);
            for b in extra {
                let second = Branch {
                    vertex: Some(other),
                    coeff: SpanElement::rational(&q, b.clone()),
                };
                out.push(g.with_branches(vec![one.clone(), second])?);
            }
        }
    }
    Ok(out)
}
