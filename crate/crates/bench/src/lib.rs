//! Shared fixtures for the criterion benches.

use gmld_core::coefflattice::rational::rat;
use gmld_core::coefflattice::SpanElement;
use gmld_core::discrepancy::{Branch, SurfaceGermModel};
use gmld_core::dualgraph::VertexId;
use gmld_core::explorer::{corpus_basis, hj_family, random_corpus};

pub const SEED: u64 = 17;

/// `1/n(1, q)` with no boundary.
pub fn hj(n: i64, q: i64) -> SurfaceGermModel {
    hj_family(n, n, Some(q)).unwrap().remove(0)
}

/// `A_n` chain of length `len` carrying a `sqrt2 / 2` branch at its first curve.
pub fn irrational_chain(len: usize) -> SurfaceGermModel {
    let b = corpus_basis();
    let base = hj((len + 1) as i64, len as i64);
    let half_root = SpanElement::new(&b, vec![rat(0, 1), rat(1, 2)]).unwrap();
    SurfaceGermModel::new(
        &b,
        base.graph().clone(),
        vec![Branch { vertex: Some(VertexId(0)), coeff: half_root }],
        Default::default(),
        None,
    )
    .unwrap()
}

pub fn corpus(count: usize) -> Vec<SurfaceGermModel> {
    random_corpus(SEED, count).unwrap()
}
