//! Partitions of one into rational-valued Q-linear maps, and the tolerance
//! shrinking that transfers a bound on generators to a bound on their span.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::basis::BasisDescriptor;
use super::linalg;
use super::map::{apply_map, QLinearMap};
use super::rational::{format_rational, Rational};
use super::span::{compare, same_basis, SpanElement};
use crate::error::{Error, Result};

/// A polynomial in the irrational basis symbols of degree at most one in
/// each symbol. Monomials are keyed by a bit mask over `r_1..r_l`.
///
/// Products of affine forms in distinct symbols (the partition weights)
/// live here; they generally leave the linear span.
#[derive(Clone, Debug, PartialEq)]
pub struct Multilinear {
    basis: Arc<BasisDescriptor>,
    terms: BTreeMap<u64, Rational>,
}

impl Multilinear {
    pub fn constant(basis: &Arc<BasisDescriptor>, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        Multilinear {
            basis: basis.clone(),
            terms,
        }
    }

    pub fn from_span(x: &SpanElement) -> Self {
        let terms = x
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (if i == 0 { 0 } else { 1u64 << (i - 1) }, c.clone()))
            .collect();
        Multilinear {
            basis: x.basis().clone(),
            terms,
        }
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn is_constant(&self, c: &Rational) -> bool {
        match self.terms.len() {
            0 => c.is_zero(),
            1 => self.terms.get(&0) == Some(c),
            _ => false,
        }
    }

    /// Degree-one part as a span element, if there are no higher monomials.
    pub fn as_span(&self) -> Option<SpanElement> {
        let mut coords = vec![Rational::zero(); self.basis.dim()];
        for (mask, c) in &self.terms {
            if *mask == 0 {
                coords[0] = c.clone();
            } else if mask.count_ones() == 1 {
                coords[mask.trailing_zeros() as usize + 1] = c.clone();
            } else {
                return None;
            }
        }
        SpanElement::new(&self.basis, coords).ok()
    }

    pub fn add(&self, other: &Multilinear) -> Multilinear {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(*m).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Multilinear {
            basis: self.basis.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &Rational) -> Multilinear {
        Multilinear {
            basis: self.basis.clone(),
            terms: if c.is_zero() {
                BTreeMap::new()
            } else {
                self.terms.iter().map(|(m, x)| (*m, x * c)).collect()
            },
        }
    }

    /// Product; fails if a symbol would appear squared.
    pub fn mul(&self, other: &Multilinear) -> Result<Multilinear> {
        let mut terms: BTreeMap<u64, Rational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1 & m2 != 0 {
                    return Err(Error::InvalidArgument(
                        "product squares a basis symbol".into(),
                    ));
                }
                *terms.entry(m1 | m2).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Multilinear {
            basis: self.basis.clone(),
            terms,
        })
    }
}

impl Serialize for Multilinear {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let names = self.basis.symbols();
        let map: BTreeMap<String, String> = self
            .terms
            .iter()
            .map(|(mask, c)| {
                let mono = if *mask == 0 {
                    "1".to_string()
                } else {
                    (0..64)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| names[b + 1].name.clone())
                        .collect::<Vec<_>>()
                        .join("*")
                };
                (mono, format_rational(c))
            })
            .collect();
        map.serialize(s)
    }
}

/// The two rational neighbours chosen for one irrational symbol.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolSplit {
    pub symbol: String,
    #[serde(serialize_with = "ser_rat")]
    pub lower: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub upper: Rational,
    /// `(upper - r) / (upper - lower)`.
    pub u_lower: SpanElement,
    /// `(r - lower) / (upper - lower)`.
    pub u_upper: SpanElement,
    /// Enclosure level at which both neighbours were certified.
    pub level: usize,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// One summand `a_σ f_σ`.
#[derive(Clone, Debug)]
pub struct PartitionEntry {
    /// `σ(i) ∈ {1, 2}` for each irrational symbol.
    pub sigma: Vec<u8>,
    /// The factors `u_{i, σ(i)}` whose product is the weight.
    pub factors: Vec<SpanElement>,
    pub weight: Multilinear,
    pub map: QLinearMap,
}

#[derive(Clone, Debug)]
pub struct PartitionOfOne {
    pub basis: Arc<BasisDescriptor>,
    pub delta: Rational,
    pub splits: Vec<SymbolSplit>,
    pub entries: Vec<PartitionEntry>,
}

impl PartitionOfOne {
    /// Re-verifies every invariant exactly: positive weights summing to one,
    /// `Σ a_σ f_σ = id` as an identity of multilinear matrices, every `f_σ`
    /// fixing Q, and `|f_σ(r_i) - r_i| ≤ δ` certified by comparison.
    pub fn verify(&self) -> Result<Vec<String>> {
        let mut failures = Vec::new();
        let b = &self.basis;
        let mut total = Multilinear::constant(b, Rational::zero());
        let mut sums: Vec<Multilinear> = (0..b.dim())
            .map(|_| Multilinear::constant(b, Rational::zero()))
            .collect();
        let delta = SpanElement::rational(b, self.delta.clone());
        for e in &self.entries {
            for f in &e.factors {
                if !f.is_positive()? {
                    failures.push(format!("sigma {:?}: nonpositive factor {f}", e.sigma));
                }
            }
            if !e.map.fixes_q() {
                failures.push(format!("sigma {:?}: map does not fix Q", e.sigma));
            }
            if !e.map.is_rational_valued() {
                failures.push(format!("sigma {:?}: map is not rational valued", e.sigma));
            }
            total = total.add(&e.weight);
            for (j, s) in sums.iter_mut().enumerate() {
                let img = e.map.image_of_symbol(j);
                let q = img.as_rational().cloned().unwrap_or_else(Rational::zero);
                *s = s.add(&e.weight.scale(&q));
            }
            for i in 1..b.dim() {
                let img = apply_map(&e.map, &SpanElement::symbol(b, i))?;
                let q = img.as_rational().cloned().unwrap_or_else(Rational::zero);
                let dev = &SpanElement::rational(b, q) - &SpanElement::symbol(b, i);
                let abs = if dev.signum()? == Ordering::Less { -&dev } else { dev };
                if compare(&abs, &delta)? == Ordering::Greater {
                    failures.push(format!("sigma {:?}: |f(r_{i}) - r_{i}| > delta", e.sigma));
                }
            }
        }
        if !total.is_constant(&Rational::one()) {
            failures.push("weights do not sum to 1".into());
        }
        for (j, s) in sums.iter().enumerate() {
            let expected = Multilinear::from_span(&SpanElement::symbol(b, j));
            if *s != expected {
                failures.push(format!("(Σ a f)(r_{j}) != r_{j}"));
            }
        }
        Ok(failures)
    }
}

/// Builds the partition of one for `basis` at tolerance `delta`.
///
/// For each irrational `r_i` the enclosure is refined until both endpoints
/// are certified to lie within `delta` on either side of `r_i`; those
/// endpoints become `q_{i1} < r_i < q_{i2}`. Entries are indexed by
/// `σ ∈ {1,2}^n` with weight `Π u_{i,σ(i)}` and map `r_i ↦ q_{i,σ(i)}`.
pub fn partition_of_one(basis: &Arc<BasisDescriptor>, delta: &Rational) -> Result<PartitionOfOne> {
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let n = basis.irrational_count();
    if n > 16 {
        return Err(Error::InvalidArgument("too many irrational symbols".into()));
    }
    let d = SpanElement::rational(basis, delta.clone());
    let mut splits = Vec::with_capacity(n);
    for i in 1..=n {
        let r = SpanElement::symbol(basis, i);
        let mut found = None;
        for (level, iv) in basis.enclosures(i).enumerate().take(basis.budget() + 1) {
            let lo = SpanElement::rational(basis, iv.lo.clone());
            let hi = SpanElement::rational(basis, iv.hi.clone());
            let below = compare(&lo, &r)? == Ordering::Less;
            let above = compare(&r, &hi)? == Ordering::Less;
            let close_lo = compare(&(&r - &lo), &d)? != Ordering::Greater;
            let close_hi = compare(&(&hi - &r), &d)? != Ordering::Greater;
            if below && above && close_lo && close_hi {
                found = Some((level, iv));
                break;
            }
        }
        let (level, iv) = found.ok_or(Error::RefinementExhausted {
            steps: basis.budget(),
        })?;
        let width = &iv.hi - &iv.lo;
        let inv = Rational::one() / &width;
        let mut u1 = vec![Rational::zero(); basis.dim()];
        u1[0] = &iv.hi * &inv;
        u1[i] = -inv.clone();
        let mut u2 = vec![Rational::zero(); basis.dim()];
        u2[0] = -(&iv.lo * &inv);
        u2[i] = inv;
        splits.push(SymbolSplit {
            symbol: basis.symbols()[i].name.clone(),
            lower: iv.lo,
            upper: iv.hi,
            u_lower: SpanElement::new(basis, u1)?,
            u_upper: SpanElement::new(basis, u2)?,
            level,
        });
    }

    let mut entries = Vec::with_capacity(1 << n);
    for code in 0..(1usize << n) {
        // σ(i) = 1 + bit (n - i) so entries are in lexicographic order.
        let sigma: Vec<u8> = (0..n).map(|i| 1 + ((code >> (n - 1 - i)) & 1) as u8).collect();
        let mut weight = Multilinear::constant(basis, Rational::one());
        let mut factors = Vec::with_capacity(n);
        let mut images = Vec::with_capacity(n);
        for (split, &s) in splits.iter().zip(&sigma) {
            let (u, q) = if s == 1 {
                (&split.u_lower, &split.lower)
            } else {
                (&split.u_upper, &split.upper)
            };
            weight = weight.mul(&Multilinear::from_span(u))?;
            factors.push(u.clone());
            images.push(q.clone());
        }
        entries.push(PartitionEntry {
            sigma,
            factors,
            weight,
            map: QLinearMap::to_rationals(basis, images)?,
        });
    }
    Ok(PartitionOfOne {
        basis: basis.clone(),
        delta: delta.clone(),
        splits,
        entries,
    })
}

/// Outcome of [`shrink_delta`].
#[derive(Clone, Debug)]
pub struct ShrunkDelta {
    pub delta: Rational,
    /// Indices into `I` of the generators used.
    pub generators: Vec<usize>,
    /// For each element of `I'`, its coefficients on the generators.
    pub expansions: Vec<Vec<Rational>>,
}

/// Given finite `I`, `I' ⊂ Span_Q(I ∪ {1})` and `delta > 0`, returns
/// `delta' = delta / max(1, max_{a ∈ I'} Σ |c_j(a)|)` where `a = c_0 + Σ c_j s_j`
/// over a maximal Q-independent (mod Q) subset `s_j` of `I`. Any Q-linear `g`
/// fixing Q with `|g(s) - s| ≤ delta'` on `I` then moves each `a ∈ I'` by at
/// most `delta`.
pub fn shrink_delta(
    generators: &[SpanElement],
    targets: &[SpanElement],
    delta: &Rational,
) -> Result<ShrunkDelta> {
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let basis = generators
        .first()
        .or(targets.first())
        .map(|x| x.basis().clone());
    let Some(basis) = basis else {
        return Ok(ShrunkDelta {
            delta: delta.clone(),
            generators: Vec::new(),
            expansions: Vec::new(),
        });
    };
    for x in generators.iter().chain(targets) {
        if !same_basis(x.basis(), &basis) {
            return Err(Error::BasisMismatch);
        }
    }
    let irr = |x: &SpanElement| x.coords()[1..].to_vec();
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_vecs: Vec<Vec<Rational>> = Vec::new();
    for (k, g) in generators.iter().enumerate() {
        let v = irr(g);
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        if linalg::express(&chosen_vecs, &v).is_none() {
            chosen.push(k);
            chosen_vecs.push(v);
        }
    }
    let mut worst = Rational::one();
    let mut expansions = Vec::with_capacity(targets.len());
    for a in targets {
        let v = irr(a);
        let c = if v.iter().all(Zero::is_zero) {
            vec![Rational::zero(); chosen.len()]
        } else {
            linalg::express(&chosen_vecs, &v).ok_or(Error::NotInSpan)?
        };
        let total = c.iter().fold(Rational::zero(), |acc, x| acc + x.abs());
        if total > worst {
            worst = total;
        }
        expansions.push(c);
    }
    Ok(ShrunkDelta {
        delta: delta / worst,
        generators: chosen,
        expansions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefflattice::basis::{sqrt2_source, EnclosureSource, Symbol};
    use crate::coefflattice::rational::{int, rat};

    fn sqrt2() -> Arc<BasisDescriptor> {
        BasisDescriptor::new(
            vec![Symbol {
                name: "sqrt2".into(),
                source: sqrt2_source(),
            }],
            true,
        )
        .unwrap()
    }

    #[test]
    fn rationals_only_gives_single_identity_entry() {
        let b = BasisDescriptor::rationals();
        let p = partition_of_one(&b, &rat(1, 10)).unwrap();
        assert_eq!(p.entries.len(), 1);
        assert!(p.entries[0].weight.is_constant(&int(1)));
        assert_eq!(p.entries[0].map.matrix(), &[vec![int(1)]]);
        assert!(p.verify().unwrap().is_empty());
    }

    #[test]
    fn sqrt2_at_one_tenth() {
        let b = sqrt2();
        let p = partition_of_one(&b, &rat(1, 10)).unwrap();
        let s = &p.splits[0];
        assert_eq!(s.lower, rat(7, 5));
        assert_eq!(s.upper, rat(3, 2));
        assert_eq!(s.u_lower.coords(), &[int(15), int(-10)]);
        assert_eq!(s.u_upper.coords(), &[int(-14), int(10)]);
        let sum = &s.u_lower + &s.u_upper;
        assert_eq!(sum.as_rational(), Some(&int(1)));
        let mix = &s.u_lower.scale(&rat(7, 5)) + &s.u_upper.scale(&rat(3, 2));
        assert_eq!(mix, SpanElement::symbol(&b, 1));
        assert_eq!(p.entries.len(), 2);
        assert!(p.verify().unwrap().is_empty());
    }

    #[test]
    fn two_symbols_four_entries() {
        let b = BasisDescriptor::new(
            vec![
                Symbol { name: "sqrt2".into(), source: sqrt2_source() },
                Symbol {
                    name: "sqrt3".into(),
                    source: EnclosureSource::ContinuedFraction {
                        prefix: vec![1.into()],
                        period: vec![1.into(), 2.into()],
                    },
                },
            ],
            true,
        )
        .unwrap();
        let p = partition_of_one(&b, &rat(1, 1000)).unwrap();
        assert_eq!(p.entries.len(), 4);
        assert_eq!(
            p.entries.iter().map(|e| e.sigma.clone()).collect::<Vec<_>>(),
            vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]
        );
        assert!(p.verify().unwrap().is_empty());
        // Weights carry the sqrt2*sqrt3 monomial.
        assert!(p.entries[0].weight.terms().contains_key(&0b11));
    }

    #[test]
    fn nonpositive_delta_rejected() {
        assert!(partition_of_one(&sqrt2(), &int(0)).is_err());
        assert!(shrink_delta(&[], &[], &rat(-1, 2)).is_err());
    }

    #[test]
    fn shrink_examples() {
        let b = sqrt2();
        let r = SpanElement::symbol(&b, 1);
        let d = rat(1, 10);
        let rational = SpanElement::rational(&b, rat(3, 7));
        assert_eq!(shrink_delta(std::slice::from_ref(&r), &[rational], &d).unwrap().delta, d);
        assert_eq!(
            shrink_delta(std::slice::from_ref(&r), &[r.scale(&int(3))], &d).unwrap().delta,
            rat(1, 30)
        );
        let shifted = &r + &SpanElement::rational(&b, rat(1, 2));
        assert_eq!(shrink_delta(&[r], &[shifted], &d).unwrap().delta, rat(1, 10));
    }

    #[test]
    fn shrink_rejects_outside_span() {
        let b = sqrt2();
        let r = SpanElement::symbol(&b, 1);
        let q = SpanElement::rational(&b, int(2));
        assert!(matches!(
            shrink_delta(&[q], &[r], &rat(1, 10)),
            Err(Error::NotInSpan)
        ));
    }
}
