//! Rational perturbations of lc germs through a partition of one.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::Serialize;

use super::format::model_digest;
use super::scan::DECIMAL_PLACES;
use crate::coefflattice::rational::format_rational;
use crate::coefflattice::{
    apply_map, compare, partition_of_one, BasisDescriptor, PartitionOfOne, Rational, SpanElement,
};
use crate::discrepancy::{profile, solve_discrepancies, Mld, SurfaceGermModel};
use crate::error::Result;

pub const DISCLAIMER: &str = "instance-level check only: each sampled (instance, map) pair is \
re-solved exactly; no uniform perturbation radius is certified";

#[derive(Clone, Debug)]
pub struct PerturbConfig {
    pub models: Vec<SurfaceGermModel>,
    pub delta: Rational,
    /// When present, instances with `mld ≥ ε` must keep `mld ≥ f(ε)`.
    pub epsilon: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbRecord {
    pub digest: String,
    pub sigma: Vec<u8>,
    pub mld: Mld,
    pub mld_decimal: String,
    pub lc: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbViolation {
    pub digest: String,
    pub sigma: Vec<u8>,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbReport {
    pub disclaimer: String,
    pub delta: String,
    /// No instance had an irrational basis symbol and an lc profile.
    pub vacuous: bool,
    pub instances_checked: usize,
    pub skipped: usize,
    pub records: Vec<PerturbRecord>,
    pub violations: Vec<PerturbViolation>,
}

fn partition_for<'a>(
    cache: &'a mut Vec<(Arc<BasisDescriptor>, PartitionOfOne)>,
    basis: &Arc<BasisDescriptor>,
    delta: &Rational,
) -> Result<&'a PartitionOfOne> {
    let pos = match cache.iter().position(|(b, _)| **b == **basis) {
        Some(i) => i,
        None => {
            cache.push((basis.clone(), partition_of_one(basis, delta)?));
            cache.len() - 1
        }
    };
    Ok(&cache[pos].1)
}

pub fn run_perturb_harness(config: &PerturbConfig) -> Result<PerturbReport> {
    let mut cache = Vec::new();
    let mut report = PerturbReport {
        disclaimer: DISCLAIMER.into(),
        delta: format_rational(&config.delta),
        vacuous: true,
        instances_checked: 0,
        skipped: 0,
        records: Vec::new(),
        violations: Vec::new(),
    };
    let mut models: Vec<(String, &SurfaceGermModel)> = config
        .models
        .iter()
        .map(|m| Ok((model_digest(m)?, m)))
        .collect::<Result<_>>()?;
    models.sort_by(|a, b| a.0.cmp(&b.0));
    for (digest, m) in models {
        let p = profile(m)?;
        let Mld::Value(mld) = &p.mld else {
            report.skipped += 1;
            continue;
        };
        if m.basis().irrational_count() == 0 {
            report.skipped += 1;
            continue;
        }
        report.vacuous = false;
        report.instances_checked += 1;
        let eps = config
            .epsilon
            .as_ref()
            .map(|e| SpanElement::rational(m.basis(), e.clone()));
        let eps_lc = match &eps {
            Some(e) => compare(mld, e)? != Ordering::Less,
            None => false,
        };
        let a = solve_discrepancies(m)?;
        let part = partition_for(&mut cache, m.basis(), &config.delta)?;
        for entry in &part.entries {
            let mut fail = |check: &str, detail: String| {
                report.violations.push(PerturbViolation {
                    digest: digest.clone(),
                    sigma: entry.sigma.clone(),
                    check: check.into(),
                    detail,
                })
            };
            let pm = match m.perturbed(&entry.map) {
                Ok(pm) => pm,
                Err(e) => {
                    fail("perturbed-model", e.to_string());
                    continue;
                }
            };
            let pp = profile(&pm)?;
            let lc = pp.mld.value().is_some();
            if !lc {
                fail("lc", "perturbed model is not lc".into());
            }
            for ((v, ai), (w, bi)) in a.iter().zip(&pp.discrepancies) {
                let image = apply_map(&entry.map, ai)?;
                if v != w || image != *bi {
                    fail(
                        "dual-route",
                        format!("vertex {v}: f(a) = {image} but a(f) = {bi}"),
                    );
                }
            }
            if let (true, Some(e), Mld::Value(after)) = (eps_lc, &eps, &pp.mld) {
                let fe = apply_map(&entry.map, e)?;
                if compare(after, &fe)? == Ordering::Less {
                    fail("epsilon", format!("mld {after} < f(eps) = {fe}"));
                }
            }
            let mld_decimal = match &pp.mld {
                Mld::NegInfinity => "-inf".into(),
                Mld::Value(x) => x.decimal(DECIMAL_PLACES)?,
            };
            report.records.push(PerturbRecord {
                digest: digest.clone(),
                sigma: entry.sigma.clone(),
                mld: pp.mld,
                mld_decimal,
                lc,
            });
        }
    }
    Ok(report)
}

impl PerturbReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}
