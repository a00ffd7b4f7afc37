//! Family scans: exact profiles, oracle cross-checks and the structural
//! check suites, merged deterministically by model digest.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use super::corpus::{a_family, cone_family, hj_family, random_corpus, smooth_family};
use super::format::model_digest;
use crate::coefflattice::{compare, linalg, Rational, SpanElement};
use crate::discrepancy::{
    adjunction_coefficient, check_computing_path, check_convexity, check_near_one_window,
    check_singular_bound, check_smooth_point, mld_oracle, profile, DiscrepancyProfile, Mld,
    SurfaceGermModel, Violation,
};
use crate::error::{Error, Result};

pub const DECIMAL_PLACES: u32 = 12;
pub const SMOOTH_ORACLE_DEPTH: u32 = 4;

#[derive(Clone, Debug)]
pub enum Family {
    /// `1/n(1, q)` for `n_min ≤ n ≤ n_max`; all coprime `q` when `None`.
    HjRange { n_min: i64, n_max: i64, q: Option<i64> },
    /// `A_n` for `n ≤ n_max`.
    Chain { n_max: usize },
    /// `1/n(1, 1)` for `n ≤ n_max`.
    Cone { n_max: i64 },
    Random { seed: u64, count: usize },
    Smooth { seed: u64, count: usize },
    Models(Vec<SurfaceGermModel>),
}

impl Family {
    pub fn models(&self) -> Result<Vec<SurfaceGermModel>> {
        match self {
            Family::HjRange { n_min, n_max, q } => hj_family(*n_min, *n_max, *q),
            Family::Chain { n_max } => a_family(*n_max),
            Family::Cone { n_max } => cone_family(*n_max),
            Family::Random { seed, count } => random_corpus(*seed, *count),
            Family::Smooth { seed, count } => smooth_family(*seed, *count),
            Family::Models(ms) => Ok(ms.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub family: Family,
    /// Coefficient set `I`; when `None`, the coefficients occurring in the
    /// family.
    pub coefficients: Option<Vec<SpanElement>>,
    /// Applied to every instance when present.
    pub epsilon: Option<Rational>,
    pub oracle_depth: u32,
}

impl ScanConfig {
    pub fn new(family: Family) -> Self {
        ScanConfig {
            family,
            coefficients: None,
            epsilon: None,
            oracle_depth: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactValue {
    pub exact: SpanElement,
    pub decimal: String,
}

impl ExactValue {
    pub fn new(x: &SpanElement) -> Result<Self> {
        Ok(ExactValue {
            exact: x.clone(),
            decimal: x.decimal(DECIMAL_PLACES)?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceRecord {
    pub digest: String,
    pub n_vertices: usize,
    pub profile: DiscrepancyProfile,
    pub mld_decimal: String,
    pub span_closed: bool,
    pub checks: Vec<String>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub instance_count: usize,
    pub not_lc_count: usize,
    pub values: Vec<ExactValue>,
    pub min_gap: Option<ExactValue>,
    pub span_closed: bool,
    /// Recorded for completeness: a finite set has no infinite ascending chain.
    pub ascending_chains_finite: bool,
    pub violation_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub instances: Vec<InstanceRecord>,
    pub aggregate: Aggregate,
}

impl ScanReport {
    pub fn violations(&self) -> impl Iterator<Item = (&str, &Violation)> {
        self.instances
            .iter()
            .flat_map(|r| r.violations.iter().map(move |v| (r.digest.as_str(), v)))
    }
}

fn push_suite(
    name: &str,
    outcome: Option<Vec<Violation>>,
    checks: &mut Vec<String>,
    out: &mut Vec<Violation>,
) {
    if let Some(v) = outcome {
        checks.push(name.into());
        out.extend(v);
    }
}

/// Runs every check suite whose hypotheses hold on `m`.
pub fn check_instance(
    m: &SurfaceGermModel,
    p: &DiscrepancyProfile,
    depth: u32,
) -> Result<(Vec<String>, Vec<Violation>)> {
    let mut checks = Vec::new();
    let mut out = Vec::new();
    push_suite("convexity", check_convexity(m, p)?, &mut checks, &mut out);
    push_suite("singular-bound", check_singular_bound(m, p)?, &mut checks, &mut out);
    push_suite(
        "smooth-point",
        check_smooth_point(m, p, SMOOTH_ORACLE_DEPTH)?,
        &mut checks,
        &mut out,
    );
    push_suite("near-one-window", check_near_one_window(m, p)?, &mut checks, &mut out);
    push_suite("computing-path", check_computing_path(m)?, &mut checks, &mut out);

    let one = SpanElement::one(m.basis());
    let mut adjunction = None;
    for (s, b) in m.branches().iter().enumerate() {
        if b.vertex.is_none() || b.coeff != one {
            continue;
        }
        match adjunction_coefficient(m, s) {
            Ok(d) => adjunction.get_or_insert_with(Vec::new).extend(d.verify(m)),
            Err(Error::NotLc) => {}
            Err(e) => return Err(e),
        }
    }
    push_suite("adjunction", adjunction, &mut checks, &mut out);

    checks.push("oracle".into());
    for d in 1..=depth {
        let o = mld_oracle(m, d)?;
        if o != p.mld {
            out.push(Violation {
                check: "oracle".into(),
                detail: format!("depth-{d} oracle {o} != {}", p.mld),
            });
        }
    }
    Ok((checks, out))
}

/// True when every vector lies in the rational span of `generators`.
fn span_closed(generators: &[Vec<Rational>], values: &[&SpanElement]) -> bool {
    values
        .iter()
        .all(|x| linalg::express(generators, x.coords()).is_some())
}

fn scan_one(m: &SurfaceGermModel, config: &ScanConfig) -> Result<InstanceRecord> {
    let m = match &config.epsilon {
        Some(e) => m.with_epsilon(Some(SpanElement::rational(m.basis(), e.clone())))?,
        None => m.clone(),
    };
    let p = profile(&m)?;
    let (checks, violations) = check_instance(&m, &p, config.oracle_depth)?;
    let mld_decimal = match &p.mld {
        Mld::NegInfinity => "-inf".into(),
        Mld::Value(x) => x.decimal(DECIMAL_PLACES)?,
    };
    let mut generators = vec![SpanElement::one(m.basis()).coords().to_vec()];
    match &config.coefficients {
        Some(set) => {
            for c in set {
                if c.coords().len() != m.basis().dim() {
                    return Err(Error::BasisMismatch);
                }
                generators.push(c.coords().to_vec());
            }
        }
        None => generators.extend(m.coefficients().iter().map(|c| c.coords().to_vec())),
    }
    let mut values: Vec<&SpanElement> = p.discrepancies.iter().map(|(_, a)| a).collect();
    values.extend(p.mld.value());
    let closed = span_closed(&generators, &values);
    Ok(InstanceRecord {
        digest: model_digest(&m)?,
        span_closed: closed,
        n_vertices: m.graph().len(),
        profile: p,
        mld_decimal,
        checks,
        violations,
    })
}

pub fn run_scan(config: &ScanConfig) -> Result<ScanReport> {
    let models = config.family.models()?;
    let mut instances = models
        .par_iter()
        .map(|m| {
            scan_one(m, config).map_err(|e| Error::Instance {
                digest: model_digest(m).unwrap_or_else(|_| "?".into()),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    instances.sort_by(|a, b| a.digest.cmp(&b.digest));

    let mut values: Vec<SpanElement> = Vec::new();
    for r in &instances {
        if let Some(x) = r.profile.mld.value() {
            values.push(x.clone());
        }
    }
    let mut err = None;
    values.sort_by(|x, y| {
        compare(x, y).unwrap_or_else(|e| {
            err.get_or_insert(e);
            Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    values.dedup();
    let mut min_gap: Option<SpanElement> = None;
    for w in values.windows(2) {
        let gap = &w[1] - &w[0];
        if min_gap.as_ref().map_or(Ok(true), |g| compare(&gap, g).map(|o| o == Ordering::Less))? {
            min_gap = Some(gap);
        }
    }
    let aggregate = Aggregate {
        instance_count: instances.len(),
        not_lc_count: instances.iter().filter(|r| r.profile.mld.is_neg_infinity()).count(),
        values: values.iter().map(ExactValue::new).collect::<Result<_>>()?,
        min_gap: min_gap.as_ref().map(ExactValue::new).transpose()?,
        span_closed: instances.iter().all(|r| r.span_closed),
        ascending_chains_finite: true,
        violation_count: instances.iter().map(|r| r.violations.len()).sum(),
    };
    Ok(ScanReport {
        instances,
        aggregate,
    })
}
