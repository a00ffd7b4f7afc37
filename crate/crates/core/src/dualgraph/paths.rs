use std::collections::BTreeSet;

use serde::Serialize;

use super::graph::{Vertex, VertexId, WeightedDualGraph};
use crate::error::{Error, Result};

/// A simple edge path in a dual graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MarkedVertexPath(pub Vec<VertexId>);

impl MarkedVertexPath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.0
    }

    pub fn validate(&self, g: &WeightedDualGraph) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &v in &self.0 {
            if !g.contains(v) {
                return Err(Error::InvalidGraph(format!("path vertex {v} not in graph")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidGraph(format!("path repeats vertex {v}")));
            }
        }
        for w in self.0.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(Error::InvalidGraph(format!("{} - {} is not an edge", w[0], w[1])));
            }
        }
        Ok(())
    }
}

/// `(3^l - 1) / 2`, saturating.
pub fn chain_bound(l: u32) -> u64 {
    3u64.checked_pow(l).map_or(u64::MAX, |p| (p - 1) / 2)
}

/// A path of `l` edges starting at `v`, found by repeatedly deleting the
/// current vertex and stepping into the largest remaining component
/// (ties: smallest vertex id), through its smallest-id neighbour there.
pub fn find_chain(g: &WeightedDualGraph, v: VertexId, l: u32) -> Result<MarkedVertexPath> {
    if l == 0 {
        return Err(Error::HypothesesUnmet("chain length must be positive".into()));
    }
    if !g.contains(v) {
        return Err(Error::HypothesesUnmet(format!("vertex {v} not in graph")));
    }
    if let Some(x) = g.ids().find(|&x| g.degree(x) > 4) {
        return Err(Error::HypothesesUnmet(format!("vertex {x} has degree > 4")));
    }
    if g.degree(v) > 3 {
        return Err(Error::HypothesesUnmet(format!("vertex {v} has degree > 3")));
    }
    if (g.len() as u64) <= chain_bound(l) {
        return Err(Error::HypothesesUnmet(format!(
            "need more than {} vertices for a chain of length {l}, have {}",
            chain_bound(l),
            g.len()
        )));
    }
    let mut path = vec![v];
    let mut removed = BTreeSet::new();
    let mut cur = v;
    for _ in 0..l {
        removed.insert(cur);
        let comps = g.components_without(&removed);
        let best = comps
            .iter()
            .filter(|c| g.neighbors(cur).any(|w| c.contains(&w)))
            .max_by(|a, b| {
                a.len()
                    .cmp(&b.len())
                    .then_with(|| b.iter().next().cmp(&a.iter().next()))
            })
            .ok_or_else(|| Error::HypothesesUnmet(format!("vertex {cur} has no onward neighbour")))?;
        let next = g.neighbors(cur).find(|w| best.contains(w)).unwrap();
        // Only the chosen component is kept from here on.
        removed.extend(g.ids().filter(|x| !best.contains(x)));
        path.push(next);
        cur = next;
    }
    Ok(MarkedVertexPath(path))
}

/// Every simple path with exactly `len` edges starting at `v`.
pub fn simple_paths_from(g: &WeightedDualGraph, v: VertexId, len: usize) -> Vec<MarkedVertexPath> {
    fn go(
        g: &WeightedDualGraph,
        path: &mut Vec<VertexId>,
        len: usize,
        out: &mut Vec<MarkedVertexPath>,
    ) {
        if path.len() == len + 1 {
            out.push(MarkedVertexPath(path.clone()));
            return;
        }
        let last = *path.last().unwrap();
        let next: Vec<_> = g.neighbors(last).filter(|w| !path.contains(w)).collect();
        for w in next {
            path.push(w);
            go(g, path, len, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    if g.contains(v) {
        go(g, &mut vec![v], len, &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForkCensus {
    pub is_tree: bool,
    /// Vertices of degree at least 3 with their number of branches.
    pub forks: Vec<(VertexId, usize)>,
}

pub fn fork_census(g: &WeightedDualGraph) -> ForkCensus {
    ForkCensus {
        is_tree: g.is_tree(),
        forks: g
            .ids()
            .filter(|&v| g.degree(v) >= 3)
            .map(|v| (v, g.degree(v)))
            .collect(),
    }
}

/// The two components of a tree with the edge `(e, f)` removed; the first
/// contains `e`.
pub fn split_at_edge(
    g: &WeightedDualGraph,
    e: VertexId,
    f: VertexId,
) -> Result<(WeightedDualGraph, WeightedDualGraph)> {
    if !g.is_tree() {
        return Err(Error::InvalidGraph("split_at_edge needs a tree".into()));
    }
    if !g.has_edge(e, f) {
        return Err(Error::InvalidGraph(format!("{e} - {f} is not an edge")));
    }
    let side_e = g.reach(e, &BTreeSet::from([f]));
    let side_f: BTreeSet<_> = g.ids().filter(|v| !side_e.contains(v)).collect();
    Ok((g.induced(&side_e)?, g.induced(&side_f)?))
}

/// All trees on `n` vertices up to isomorphism with maximum degree at most
/// `max_degree`, each with ids `0..n` and every weight `weight`.
pub fn enumerate_trees(n: usize, max_degree: usize, weight: i64) -> Vec<WeightedDualGraph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
    let mut seen_size = 1;
    while seen_size < n {
        let mut next = Vec::new();
        let mut canon = BTreeSet::new();
        for edges in &level {
            let size = seen_size as u32;
            for p in 0..size {
                let deg = edges.iter().filter(|(a, b)| *a == p || *b == p).count();
                if deg >= max_degree {
                    continue;
                }
                let mut e = edges.clone();
                e.push((p, size));
                if canon.insert(canonical_form(seen_size + 1, &e)) {
                    next.push(e);
                }
            }
        }
        level = next;
        seen_size += 1;
    }
    level
        .into_iter()
        .map(|edges| {
            let vertices = (0..n as u32)
                .map(|i| Vertex { id: VertexId(i), weight })
                .collect();
            let edges = edges.into_iter().map(|(a, b)| (VertexId(a), VertexId(b))).collect();
            WeightedDualGraph::new(vertices, edges).expect("generated tree is valid")
        })
        .collect()
}

/// Rooted-at-centre canonical string of an unlabelled tree.
fn canonical_form(n: usize, edges: &[(u32, u32)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in &adj[leaf] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| encode(adj, w, v))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    layer
        .iter()
        .map(|&c| encode(&adj, c, usize::MAX))
        .min()
        .unwrap_or_default()
}
