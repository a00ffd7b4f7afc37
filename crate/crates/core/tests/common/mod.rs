#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use gmld_core::coefflattice::basis::sqrt2_source;
use gmld_core::coefflattice::rational::rat;
use gmld_core::coefflattice::{BasisDescriptor, Rational, SpanElement, Symbol};
use gmld_core::discrepancy::{Branch, SurfaceGermModel};
use gmld_core::dualgraph::{VertexId, WeightedDualGraph};

pub fn q() -> Arc<BasisDescriptor> {
    BasisDescriptor::rationals()
}

pub fn sqrt2_basis() -> Arc<BasisDescriptor> {
    BasisDescriptor::new(
        vec![Symbol {
            name: "sqrt2".into(),
            source: sqrt2_source(),
        }],
        true,
    )
    .unwrap()
}

pub fn r(b: &Arc<BasisDescriptor>, n: i64, d: i64) -> SpanElement {
    SpanElement::rational(b, rat(n, d))
}

pub fn val(b: &Arc<BasisDescriptor>, x: Rational) -> SpanElement {
    SpanElement::rational(b, x)
}

/// Chain model with branches `(vertex, coeff)` and loads `(vertex, load)`.
pub fn chain_model(
    basis: &Arc<BasisDescriptor>,
    weights: &[i64],
    branches: &[(u32, SpanElement)],
    loads: &[(u32, SpanElement)],
) -> SurfaceGermModel {
    let g = WeightedDualGraph::chain(weights).unwrap();
    model_on(basis, g, branches, loads)
}

pub fn model_on(
    basis: &Arc<BasisDescriptor>,
    g: WeightedDualGraph,
    branches: &[(u32, SpanElement)],
    loads: &[(u32, SpanElement)],
) -> SurfaceGermModel {
    let branches = branches
        .iter()
        .map(|(v, c)| Branch {
            vertex: Some(VertexId(*v)),
            coeff: c.clone(),
        })
        .collect();
    let loads: BTreeMap<_, _> = loads.iter().map(|(v, c)| (VertexId(*v), c.clone())).collect();
    SurfaceGermModel::new(basis, g, branches, loads, None).unwrap()
}

pub fn smooth_germ(basis: &Arc<BasisDescriptor>, coeffs: &[SpanElement]) -> SurfaceGermModel {
    let branches = coeffs
        .iter()
        .map(|c| Branch {
            vertex: None,
            coeff: c.clone(),
        })
        .collect();
    SurfaceGermModel::new(basis, WeightedDualGraph::empty(), branches, BTreeMap::new(), None)
        .unwrap()
}
