use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub weight: i64,
}

/// Dual graph of the exceptional curves of a resolution. Vertices are kept
/// sorted by id; that order indexes the intersection matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDualGraph {
    vertices: Vec<Vertex>,
    edges: BTreeSet<(VertexId, VertexId)>,
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

fn ordered(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl WeightedDualGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let mut vertices = vertices;
        vertices.sort_by_key(|v| v.id);
        let mut adjacency: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for v in &vertices {
            if v.weight > -1 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {} has self-intersection {} > -1",
                    v.id, v.weight
                )));
            }
            if adjacency.insert(v.id, BTreeSet::new()).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex {a}")));
            }
            for x in [a, b] {
                if !adjacency.contains_key(&x) {
                    return Err(Error::InvalidGraph(format!("edge references unknown vertex {x}")));
                }
            }
            if !edge_set.insert(ordered(a, b)) {
                return Err(Error::InvalidGraph(format!("multiple edges between {a} and {b}")));
            }
            adjacency.get_mut(&a).unwrap().insert(b);
            adjacency.get_mut(&b).unwrap().insert(a);
        }
        let g = WeightedDualGraph {
            vertices,
            edges: edge_set,
            adjacency,
        };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn empty() -> Self {
        WeightedDualGraph {
            vertices: Vec::new(),
            edges: BTreeSet::new(),
            adjacency: BTreeMap::new(),
        }
    }

    /// Chain with ids `0..weights.len()` in order.
    pub fn chain(weights: &[i64]) -> Result<Self> {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Vertex {
                id: VertexId(i as u32),
                weight: w,
            })
            .collect();
        let edges = (1..weights.len())
            .map(|i| (VertexId(i as u32 - 1), VertexId(i as u32)))
            .collect();
        WeightedDualGraph::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().map(|v| v.id)
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.adjacency.contains_key(&id)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok()
    }

    pub fn weight(&self, id: VertexId) -> Option<i64> {
        self.index_of(id).map(|i| self.vertices[i].weight)
    }

    pub fn neighbors(&self, id: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.get(&id).into_iter().flatten().copied()
    }

    pub fn degree(&self, id: VertexId) -> usize {
        self.adjacency.get(&id).map_or(0, BTreeSet::len)
    }

    pub fn max_id(&self) -> Option<VertexId> {
        self.vertices.last().map(|v| v.id)
    }

    pub fn is_tree(&self) -> bool {
        self.is_empty() || self.edges.len() + 1 == self.vertices.len()
    }

    fn is_connected(&self) -> bool {
        match self.vertices.first() {
            None => true,
            Some(v) => self.reach(v.id, &BTreeSet::new()).len() == self.vertices.len(),
        }
    }

    /// Vertices reachable from `start` avoiding `removed`.
    pub(crate) fn reach(&self, start: VertexId, removed: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if !removed.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Connected components of the graph with `removed` deleted.
    pub fn components_without(&self, removed: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
        let mut left: BTreeSet<VertexId> = self.ids().filter(|v| !removed.contains(v)).collect();
        let mut out = Vec::new();
        while let Some(&s) = left.iter().next() {
            let comp = self.reach(s, removed);
            left.retain(|v| !comp.contains(v));
            out.push(comp);
        }
        out
    }

    /// Induced subgraph on `ids`, which must be connected.
    pub fn induced(&self, ids: &BTreeSet<VertexId>) -> Result<Self> {
        let vertices = self
            .vertices
            .iter()
            .filter(|v| ids.contains(&v.id))
            .copied()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| ids.contains(a) && ids.contains(b))
            .copied()
            .collect();
        WeightedDualGraph::new(vertices, edges)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<Vertex>,
    edges: Vec<(VertexId, VertexId)>,
}

impl Serialize for WeightedDualGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedDualGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GraphRepr::deserialize(d)?;
        WeightedDualGraph::new(r.vertices, r.edges).map_err(serde::de::Error::custom)
    }
}
