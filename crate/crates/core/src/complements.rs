//! Coefficient arithmetic of generalized n-complements.

use std::cmp::Ordering;

use num_traits::One;
use serde::Serialize;

use crate::coefflattice::span::same_basis;
use crate::coefflattice::{compare, Rational, SpanElement};
use crate::discrepancy::{profile, Classification, SurfaceGermModel};
use crate::error::{Error, Result};

/// Convex decomposition `B⁺ = Σ a_i B_i⁺`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub weights: Vec<SpanElement>,
    pub parts: Vec<Vec<SpanElement>>,
}

/// Coefficients of a boundary `B`, a candidate complement `B⁺` (aligned by
/// divisor), and the nef part's coefficients `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementDatum {
    pub n: u32,
    pub b: Vec<SpanElement>,
    pub b_plus: Vec<SpanElement>,
    pub m: Vec<SpanElement>,
    pub decomposition: Option<Decomposition>,
}

impl ComplementDatum {
    pub fn new(
        n: u32,
        b: Vec<SpanElement>,
        b_plus: Vec<SpanElement>,
        m: Vec<SpanElement>,
        decomposition: Option<Decomposition>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if b.len() != b_plus.len() {
            return Err(Error::InvalidArgument(format!(
                "B has {} coefficients but B+ has {}",
                b.len(),
                b_plus.len()
            )));
        }
        for (k, x) in b.iter().enumerate() {
            if x.signum()? == Ordering::Less {
                return Err(Error::InvalidArgument(format!("B[{k}] = {x} is negative")));
            }
        }
        if let Some(d) = &decomposition {
            if d.weights.len() != d.parts.len() {
                return Err(Error::InvalidArgument(
                    "decomposition weights and parts differ in number".into(),
                ));
            }
            if let Some(p) = d.parts.iter().find(|p| p.len() != b_plus.len()) {
                return Err(Error::InvalidArgument(format!(
                    "decomposition part has {} coefficients, expected {}",
                    p.len(),
                    b_plus.len()
                )));
            }
        }
        let all = b.iter().chain(&b_plus).chain(&m);
        let mut bases = all.map(SpanElement::basis);
        if let Some(first) = bases.next() {
            if bases.any(|x| !same_basis(x, first)) {
                return Err(Error::BasisMismatch);
            }
        }
        Ok(ComplementDatum {
            n,
            b,
            b_plus,
            m,
            decomposition,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub index: usize,
    /// `(n⌊b⌋ + ⌊(n+1){b}⌋) / n`, the least admissible `b⁺`.
    #[serde(serialize_with = "ser_rat")]
    pub threshold: Rational,
    pub inequality: bool,
    pub integral: bool,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::coefflattice::rational::format_rational(r))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplementReport {
    pub ok: bool,
    pub entries: Vec<IndexReport>,
    /// Every `n m` is an integer.
    pub nef_integral: bool,
}

fn integral_multiple(n: u32, x: &SpanElement) -> bool {
    x.as_rational()
        .is_some_and(|q| (q * Rational::from_integer(n.into())).is_integer())
}

/// The rounding inequality `n b⁺ ≥ n⌊b⌋ + ⌊(n+1){b}⌋` at every index,
/// integrality of `n b⁺`, and integrality of `n m`.
pub fn check_n_complement_coeffs(d: &ComplementDatum) -> Result<ComplementReport> {
    let n = Rational::from_integer(d.n.into());
    let mut entries = Vec::with_capacity(d.b.len());
    for (index, (b, bp)) in d.b.iter().zip(&d.b_plus).enumerate() {
        let fl = b.floor()?;
        let frac = b - &SpanElement::rational(b.basis(), fl.clone());
        let scaled = frac.scale(&(&n + Rational::one())).floor()?;
        let threshold = (&n * &fl + scaled) / &n;
        let inequality =
            compare(bp, &SpanElement::rational(b.basis(), threshold.clone()))? != Ordering::Less;
        entries.push(IndexReport {
            index,
            threshold,
            inequality,
            integral: integral_multiple(d.n, bp),
        });
    }
    let nef_integral = d.m.iter().all(|x| integral_multiple(d.n, x));
    let ok = nef_integral && entries.iter().all(|e| e.inequality && e.integral);
    Ok(ComplementReport {
        ok,
        entries,
        nef_integral,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongAutoOutcome {
    /// `B⁺ ≥ B`, `n B⁺` integral and `n m` integral.
    pub hypothesis: bool,
    /// The rounding inequality held (only meaningful under the hypothesis).
    pub inequality: bool,
}

impl StrongAutoOutcome {
    pub fn is_counterexample(&self) -> bool {
        self.hypothesis && !self.inequality
    }
}

/// If `B⁺ ≥ B` with `n B⁺` and `n m` integral, the rounding inequality holds
/// automatically; this evaluates both sides of that implication.
pub fn check_strong_auto(d: &ComplementDatum) -> Result<StrongAutoOutcome> {
    let mut hypothesis = d.m.iter().all(|x| integral_multiple(d.n, x));
    for (b, bp) in d.b.iter().zip(&d.b_plus) {
        hypothesis &= integral_multiple(d.n, bp) && compare(bp, b)? != Ordering::Less;
    }
    let report = check_n_complement_coeffs(d)?;
    Ok(StrongAutoOutcome {
        hypothesis,
        inequality: report.entries.iter().all(|e| e.inequality),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub ok: bool,
    pub weights_positive: bool,
    pub weights_sum_to_one: bool,
    pub recombines: bool,
    /// Each part passes the coefficient check against itself.
    pub parts: Vec<bool>,
}

/// Checks `Γ` (positive weights summing to 1), `Σ a_i B_i⁺ = B⁺`, and that
/// each part is an n-complement of itself at the coefficient level.
pub fn check_decomposable(d: &ComplementDatum) -> Result<DecompositionReport> {
    let dec = d
        .decomposition
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("no decomposition given".into()))?;
    let Some(basis) = dec.weights.first().map(|w| w.basis().clone()) else {
        return Err(Error::InvalidArgument("empty decomposition".into()));
    };
    let mut weights_positive = true;
    let mut total = SpanElement::zero(&basis);
    for w in &dec.weights {
        weights_positive &= w.is_positive()?;
        total = total.try_add(w)?;
    }
    let weights_sum_to_one = total == SpanElement::one(&basis);
    let mut recombines = weights_positive;
    for (k, bp) in d.b_plus.iter().enumerate() {
        let mut acc = SpanElement::zero(&basis);
        for (w, part) in dec.weights.iter().zip(&dec.parts) {
            acc = acc.try_add(&mul(w, &part[k])?)?;
        }
        recombines &= acc == *bp;
    }
    let parts = dec
        .parts
        .iter()
        .map(|p| {
            let own = ComplementDatum::new(d.n, p.clone(), p.clone(), d.m.clone(), None)?;
            Ok(check_n_complement_coeffs(&own)?.ok)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(DecompositionReport {
        ok: weights_positive && weights_sum_to_one && recombines && parts.iter().all(|&p| p),
        weights_positive,
        weights_sum_to_one,
        recombines,
        parts,
    })
}

/// Product of span elements where at least one factor is rational.
fn mul(x: &SpanElement, y: &SpanElement) -> Result<SpanElement> {
    match (x.as_rational(), y.as_rational()) {
        (Some(q), _) => Ok(y.scale(q)),
        (_, Some(q)) => Ok(x.scale(q)),
        _ if x.is_zero() || y.is_zero() => Ok(SpanElement::zero(x.basis())),
        _ => Err(Error::InvalidArgument(
            "product of two irrational coefficients leaves the span".into(),
        )),
    }
}

/// Classification of the germ whose boundary already carries the `B⁺`
/// coefficients, against `ε`.
pub fn epsilon_tag(germ: &SurfaceGermModel, epsilon: &SpanElement) -> Result<Classification> {
    let tagged = germ.with_epsilon(Some(epsilon.clone()))?;
    Ok(profile(&tagged)?.classification)
}
