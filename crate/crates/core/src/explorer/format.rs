//! JSON interchange format for germ models and complement data.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coefflattice::basis::Interval;
use crate::coefflattice::rational::{format_rational, parse_rational};
use crate::coefflattice::{BasisDescriptor, EnclosureSource, Rational, SpanElement, Symbol};
use crate::complements::{ComplementDatum, Decomposition};
use crate::discrepancy::{Branch, SurfaceGermModel};
use crate::dualgraph::{Vertex, VertexId, WeightedDualGraph};
use crate::error::{Error, Result};

/// A rational literal: an integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Str(String),
}

/// A coefficient: a rational literal or a coordinate vector over the basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Scalar(Scalar),
    Coords(Vec<Scalar>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnclosureDoc {
    ContinuedFraction {
        cf: Vec<i64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        period: Vec<i64>,
    },
    Intervals {
        intervals: Vec<(Scalar, Scalar)>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: u32,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<u32>,
    pub coeff: CoeffDoc,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub basis: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub enclosures: BTreeMap<String, EnclosureDoc>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub independent: bool,
    pub graph: GraphDoc,
    #[serde(default)]
    pub branches: Vec<BranchDoc>,
    #[serde(default)]
    pub nefloads: BTreeMap<String, CoeffDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<CoeffDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub weights: Vec<CoeffDoc>,
    pub parts: Vec<Vec<CoeffDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplementDocument {
    #[serde(default = "rationals_only")]
    pub basis: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub enclosures: BTreeMap<String, EnclosureDoc>,
    pub n: u32,
    pub b: Vec<CoeffDoc>,
    pub b_plus: Vec<CoeffDoc>,
    #[serde(default)]
    pub m: Vec<CoeffDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDoc>,
}

fn rationals_only() -> Vec<String> {
    vec!["1".into()]
}

fn deserialize_doc<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(path, e.into_inner().to_string())
    })
}

fn scalar(s: &Scalar, path: &str) -> Result<Rational> {
    match s {
        Scalar::Int(n) => Ok(Rational::from_integer((*n).into())),
        Scalar::Str(t) => parse_rational(t).map_err(|e| Error::parse(path, e.to_string())),
    }
}

fn coefficient(basis: &Arc<BasisDescriptor>, c: &CoeffDoc, path: &str) -> Result<SpanElement> {
    match c {
        CoeffDoc::Scalar(s) => Ok(SpanElement::rational(basis, scalar(s, path)?)),
        CoeffDoc::Coords(v) => {
            if v.len() != basis.dim() {
                return Err(Error::parse(
                    path,
                    format!("expected {} coordinates, got {}", basis.dim(), v.len()),
                ));
            }
            let coords = v
                .iter()
                .enumerate()
                .map(|(i, s)| scalar(s, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            SpanElement::new(basis, coords)
        }
    }
}

fn nonnegative(basis: &Arc<BasisDescriptor>, c: &CoeffDoc, path: &str) -> Result<SpanElement> {
    let x = coefficient(basis, c, path)?;
    match x.signum() {
        Ok(Ordering::Less) => Err(Error::parse(path, format!("coefficient {x} is negative"))),
        Ok(_) => Ok(x),
        Err(e) => Err(Error::parse(path, e.to_string())),
    }
}

fn parse_basis(
    names: &[String],
    enclosures: &BTreeMap<String, EnclosureDoc>,
    independent: bool,
    budget: Option<usize>,
) -> Result<Arc<BasisDescriptor>> {
    if names.first().map(String::as_str) != Some("1") {
        return Err(Error::parse("basis[0]", "the first basis symbol must be \"1\""));
    }
    let mut seen = BTreeSet::new();
    let mut symbols = Vec::new();
    for (i, name) in names.iter().enumerate().skip(1) {
        let path = format!("basis[{i}]");
        if name.is_empty() || name == "1" || !seen.insert(name.clone()) {
            return Err(Error::parse(path, format!("invalid or repeated symbol {name:?}")));
        }
        let epath = format!("enclosures.{name}");
        let doc = enclosures
            .get(name)
            .ok_or_else(|| Error::parse(&epath, "missing enclosure for basis symbol"))?;
        let source = match doc {
            EnclosureDoc::ContinuedFraction { cf, period } => EnclosureSource::ContinuedFraction {
                prefix: cf.iter().map(|&a| BigInt::from(a)).collect(),
                period: period.iter().map(|&a| BigInt::from(a)).collect(),
            },
            EnclosureDoc::Intervals { intervals } => EnclosureSource::Intervals(
                intervals
                    .iter()
                    .enumerate()
                    .map(|(k, (lo, hi))| {
                        let p = format!("{epath}.intervals[{k}]");
                        let (lo, hi) = (scalar(lo, &p)?, scalar(hi, &p)?);
                        if lo > hi {
                            return Err(Error::parse(p, "interval endpoints out of order"));
                        }
                        Ok(Interval::new(lo, hi))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let symbol = Symbol {
            name: name.clone(),
            source,
        };
        BasisDescriptor::new(vec![symbol.clone()], true)
            .map_err(|e| Error::parse(&epath, e.to_string()))?;
        symbols.push(symbol);
    }
    if let Some(extra) = enclosures.keys().find(|k| !seen.contains(*k)) {
        return Err(Error::parse(
            format!("enclosures.{extra}"),
            "enclosure for a symbol not in the basis",
        ));
    }
    let basis = BasisDescriptor::new(symbols, independent)?;
    Ok(match budget {
        Some(b) => basis.with_budget(b),
        None => basis,
    })
}

fn parse_graph(doc: &GraphDoc) -> Result<WeightedDualGraph> {
    let mut ids = BTreeSet::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        if v.weight > -1 {
            return Err(Error::parse(
                format!("graph.vertices[{i}].weight"),
                format!("self-intersection {} must be at most -1", v.weight),
            ));
        }
        if !ids.insert(v.id) {
            return Err(Error::parse(
                format!("graph.vertices[{i}].id"),
                format!("duplicate vertex id {}", v.id),
            ));
        }
    }
    let mut edges = BTreeSet::new();
    for (i, &(a, b)) in doc.edges.iter().enumerate() {
        let path = format!("graph.edges[{i}]");
        if a == b {
            return Err(Error::parse(path, format!("loop at vertex {a}")));
        }
        if !ids.contains(&a) || !ids.contains(&b) {
            return Err(Error::parse(path, "edge references an unknown vertex"));
        }
        if !edges.insert((a.min(b), a.max(b))) {
            return Err(Error::parse(path, format!("multiple edges between {a} and {b}")));
        }
    }
    WeightedDualGraph::new(
        doc.vertices
            .iter()
            .map(|v| Vertex {
                id: VertexId(v.id),
                weight: v.weight,
            })
            .collect(),
        doc.edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect(),
    )
    .map_err(|e| Error::parse("graph", e.to_string()))
}

/// Parses and validates a germ model. `budget` overrides the refinement
/// budget of the declared basis.
pub fn parse_model(text: &str, budget: Option<usize>) -> Result<SurfaceGermModel> {
    let doc: ModelDocument = deserialize_doc(text)?;
    model_from_document(&doc, budget)
}

pub fn model_from_document(doc: &ModelDocument, budget: Option<usize>) -> Result<SurfaceGermModel> {
    let basis = parse_basis(&doc.basis, &doc.enclosures, doc.independent, budget)?;
    let graph = parse_graph(&doc.graph)?;
    let mut branches = Vec::with_capacity(doc.branches.len());
    for (i, b) in doc.branches.iter().enumerate() {
        let vertex = b.vertex.map(VertexId);
        match vertex {
            Some(v) if !graph.contains(v) => {
                return Err(Error::parse(
                    format!("branches[{i}].vertex"),
                    format!("unknown vertex {v}"),
                ))
            }
            None if !graph.is_empty() => {
                return Err(Error::parse(
                    format!("branches[{i}].vertex"),
                    "a branch must name the curve it meets",
                ))
            }
            Some(_) if graph.is_empty() => {
                return Err(Error::parse(
                    format!("branches[{i}].vertex"),
                    "branches of a smooth germ take no vertex",
                ))
            }
            _ => {}
        }
        let coeff = nonnegative(&basis, &b.coeff, &format!("branches[{i}].coeff"))?;
        branches.push(Branch { vertex, coeff });
    }
    let mut loads = BTreeMap::new();
    for (key, c) in &doc.nefloads {
        let path = format!("nefloads.{key}");
        let id: u32 = key
            .parse()
            .map_err(|_| Error::parse(&path, "load keys must be vertex ids"))?;
        if !graph.contains(VertexId(id)) {
            return Err(Error::parse(&path, format!("unknown vertex {id}")));
        }
        loads.insert(VertexId(id), nonnegative(&basis, c, &path)?);
    }
    let epsilon = doc
        .epsilon
        .as_ref()
        .map(|c| nonnegative(&basis, c, "epsilon"))
        .transpose()?;
    SurfaceGermModel::new(&basis, graph, branches, loads, epsilon).map_err(|e| match e {
        Error::NotNegativeDefinite => Error::parse("graph", e.to_string()),
        other => Error::parse("$", other.to_string()),
    })
}

fn scalar_doc(q: &Rational) -> Scalar {
    if q.is_integer() {
        if let Some(n) = q.to_integer().to_i64() {
            return Scalar::Int(n);
        }
    }
    Scalar::Str(format_rational(q))
}

/// Canonical document form: rationals as integers or `"p/q"`, irrational
/// values as full coordinate vectors.
pub fn coefficient_doc(x: &SpanElement) -> CoeffDoc {
    match x.as_rational() {
        Some(q) => CoeffDoc::Scalar(scalar_doc(q)),
        None => CoeffDoc::Coords(x.coords().iter().map(scalar_doc).collect()),
    }
}

fn basis_docs(basis: &BasisDescriptor) -> Result<(Vec<String>, BTreeMap<String, EnclosureDoc>)> {
    let names = basis.symbols().iter().map(|s| s.name.clone()).collect();
    let mut enclosures = BTreeMap::new();
    for s in &basis.symbols()[1..] {
        let doc = match &s.source {
            EnclosureSource::One => continue,
            EnclosureSource::ContinuedFraction { prefix, period } => {
                let conv = |v: &[BigInt]| -> Result<Vec<i64>> {
                    v.iter()
                        .map(|a| {
                            a.to_i64().ok_or_else(|| {
                                Error::InvalidBasis(format!("{}: partial quotient too large", s.name))
                            })
                        })
                        .collect()
                };
                EnclosureDoc::ContinuedFraction {
                    cf: conv(prefix)?,
                    period: conv(period)?,
                }
            }
            EnclosureSource::Intervals(list) => EnclosureDoc::Intervals {
                intervals: list
                    .iter()
                    .map(|iv| (scalar_doc(&iv.lo), scalar_doc(&iv.hi)))
                    .collect(),
            },
        };
        enclosures.insert(s.name.clone(), doc);
    }
    Ok((names, enclosures))
}

pub fn model_to_document(m: &SurfaceGermModel) -> Result<ModelDocument> {
    let (basis, enclosures) = basis_docs(m.basis())?;
    let g = m.graph();
    Ok(ModelDocument {
        basis,
        enclosures,
        independent: m.basis().independent(),
        graph: GraphDoc {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexDoc {
                    id: v.id.0,
                    weight: v.weight,
                })
                .collect(),
            edges: g.edges().map(|(a, b)| (a.0, b.0)).collect(),
        },
        branches: m
            .branches()
            .iter()
            .map(|b| BranchDoc {
                vertex: b.vertex.map(|v| v.0),
                coeff: coefficient_doc(&b.coeff),
            })
            .collect(),
        nefloads: m
            .loads()
            .iter()
            .map(|(v, mu)| (v.0.to_string(), coefficient_doc(mu)))
            .collect(),
        epsilon: m.epsilon().map(coefficient_doc),
    })
}

/// Compact canonical JSON of a model.
pub fn canonical_json(m: &SurfaceGermModel) -> Result<String> {
    Ok(serde_json::to_string(&model_to_document(m)?)?)
}

/// Hex SHA-256 of the canonical JSON.
pub fn model_digest(m: &SurfaceGermModel) -> Result<String> {
    Ok(hex::encode(Sha256::digest(canonical_json(m)?.as_bytes())))
}

pub fn parse_complement(text: &str, budget: Option<usize>) -> Result<ComplementDatum> {
    let doc: ComplementDocument = deserialize_doc(text)?;
    let basis = parse_basis(&doc.basis, &doc.enclosures, true, budget)?;
    let list = |xs: &[CoeffDoc], name: &str| -> Result<Vec<SpanElement>> {
        xs.iter()
            .enumerate()
            .map(|(i, c)| coefficient(&basis, c, &format!("{name}[{i}]")))
            .collect()
    };
    let decomposition = doc
        .decomposition
        .as_ref()
        .map(|d| -> Result<Decomposition> {
            Ok(Decomposition {
                weights: list(&d.weights, "decomposition.weights")?,
                parts: d
                    .parts
                    .iter()
                    .enumerate()
                    .map(|(k, p)| list(p, &format!("decomposition.parts[{k}]")))
                    .collect::<Result<_>>()?,
            })
        })
        .transpose()?;
    ComplementDatum::new(
        doc.n,
        list(&doc.b, "b")?,
        list(&doc.b_plus, "b_plus")?,
        list(&doc.m, "m")?,
        decomposition,
    )
    .map_err(|e| Error::parse("$", e.to_string()))
}
