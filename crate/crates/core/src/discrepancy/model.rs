use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::coefflattice::span::same_basis;
use crate::coefflattice::{apply_map, BasisDescriptor, QLinearMap, SpanElement};
use crate::dualgraph::{intersection_matrix, is_negative_definite, VertexId, WeightedDualGraph};
use crate::error::{Error, Result};

/// Strict transform of a boundary component through the germ point. On a
/// nonempty resolution it meets exactly the exceptional curve `vertex`; on
/// the empty graph (a smooth germ) `vertex` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub vertex: Option<VertexId>,
    pub coeff: SpanElement,
}

/// A generalized surface germ on a fixed log resolution: dual graph,
/// boundary branches, and the intersection numbers `M_Y . E_i` of the nef
/// part with each exceptional curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGermModel {
    basis: Arc<BasisDescriptor>,
    graph: WeightedDualGraph,
    branches: Vec<Branch>,
    loads: BTreeMap<VertexId, SpanElement>,
    epsilon: Option<SpanElement>,
}

impl SurfaceGermModel {
    pub fn new(
        basis: &Arc<BasisDescriptor>,
        graph: WeightedDualGraph,
        branches: Vec<Branch>,
        loads: BTreeMap<VertexId, SpanElement>,
        epsilon: Option<SpanElement>,
    ) -> Result<Self> {
        if !graph.is_empty() && !is_negative_definite(&intersection_matrix(&graph))? {
            return Err(Error::NotNegativeDefinite);
        }
        for (k, b) in branches.iter().enumerate() {
            match (graph.is_empty(), b.vertex) {
                (true, Some(v)) => {
                    return Err(Error::InvalidModel(format!(
                        "branch {k} attached to vertex {v} of an empty graph"
                    )))
                }
                (false, None) => {
                    return Err(Error::InvalidModel(format!("branch {k} has no vertex")))
                }
                (false, Some(v)) if !graph.contains(v) => {
                    return Err(Error::InvalidModel(format!(
                        "branch {k} attached to unknown vertex {v}"
                    )))
                }
                _ => {}
            }
            check_nonnegative(basis, &b.coeff, &format!("branch {k} coefficient"))?;
        }
        for (v, mu) in &loads {
            if !graph.contains(*v) {
                return Err(Error::InvalidModel(format!("load on unknown vertex {v}")));
            }
            check_nonnegative(basis, mu, &format!("load on vertex {v}"))?;
        }
        if let Some(e) = &epsilon {
            check_nonnegative(basis, e, "epsilon")?;
        }
        let loads = loads.into_iter().filter(|(_, mu)| !mu.is_zero()).collect();
        Ok(SurfaceGermModel {
            basis: basis.clone(),
            graph,
            branches,
            loads,
            epsilon,
        })
    }

    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        &self.basis
    }

    pub fn graph(&self) -> &WeightedDualGraph {
        &self.graph
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Nonzero loads only.
    pub fn loads(&self) -> &BTreeMap<VertexId, SpanElement> {
        &self.loads
    }

    pub fn load(&self, v: VertexId) -> SpanElement {
        self.loads
            .get(&v)
            .cloned()
            .unwrap_or_else(|| SpanElement::zero(&self.basis))
    }

    pub fn epsilon(&self) -> Option<&SpanElement> {
        self.epsilon.as_ref()
    }

    pub fn with_epsilon(&self, epsilon: Option<SpanElement>) -> Result<Self> {
        SurfaceGermModel::new(
            &self.basis,
            self.graph.clone(),
            self.branches.clone(),
            self.loads.clone(),
            epsilon,
        )
    }

    pub fn with_branches(&self, branches: Vec<Branch>) -> Result<Self> {
        SurfaceGermModel::new(
            &self.basis,
            self.graph.clone(),
            branches,
            self.loads.clone(),
            self.epsilon.clone(),
        )
    }

    pub fn with_loads(&self, loads: BTreeMap<VertexId, SpanElement>) -> Result<Self> {
        SurfaceGermModel::new(
            &self.basis,
            self.graph.clone(),
            self.branches.clone(),
            loads,
            self.epsilon.clone(),
        )
    }

    /// Sum of branch coefficients meeting `v`.
    pub fn branch_sum(&self, v: Option<VertexId>) -> SpanElement {
        self.branches
            .iter()
            .filter(|b| b.vertex == v)
            .fold(SpanElement::zero(&self.basis), |acc, b| &acc + &b.coeff)
    }

    /// Every coefficient of the model: branches, then loads, then epsilon.
    pub fn coefficients(&self) -> Vec<SpanElement> {
        self.branches
            .iter()
            .map(|b| b.coeff.clone())
            .chain(self.loads.values().cloned())
            .chain(self.epsilon.clone())
            .collect()
    }

    /// Applies `f` to every coefficient. The result lives over `f`'s target
    /// basis and is validated again.
    pub fn perturbed(&self, f: &QLinearMap) -> Result<SurfaceGermModel> {
        if !same_basis(f.source(), &self.basis) {
            return Err(Error::BasisMismatch);
        }
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    vertex: b.vertex,
                    coeff: apply_map(f, &b.coeff)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let loads = self
            .loads
            .iter()
            .map(|(v, mu)| Ok((*v, apply_map(f, mu)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let epsilon = self.epsilon.as_ref().map(|e| apply_map(f, e)).transpose()?;
        SurfaceGermModel::new(f.target(), self.graph.clone(), branches, loads, epsilon)
    }
}

fn check_nonnegative(basis: &Arc<BasisDescriptor>, x: &SpanElement, what: &str) -> Result<()> {
    if !same_basis(x.basis(), basis) {
        return Err(Error::BasisMismatch);
    }
    if x.signum()? == Ordering::Less {
        return Err(Error::InvalidModel(format!("{what} is negative: {x}")));
    }
    Ok(())
}
