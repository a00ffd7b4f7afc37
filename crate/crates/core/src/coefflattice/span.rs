use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::basis::{BasisDescriptor, Enclosures, Interval};
use super::rational::{self, format_rational, Rational};
use crate::error::{Error, Result};

/// An exact real number `q_0 + q_1 r_1 + ... + q_l r_l` over a declared basis.
#[derive(Clone, Debug)]
pub struct SpanElement {
    basis: Arc<BasisDescriptor>,
    coords: Vec<Rational>,
}

pub(crate) fn same_basis(a: &Arc<BasisDescriptor>, b: &Arc<BasisDescriptor>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SpanElement {
    pub fn new(basis: &Arc<BasisDescriptor>, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != basis.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                basis.dim(),
                coords.len()
            )));
        }
        Ok(SpanElement {
            basis: basis.clone(),
            coords,
        })
    }

    pub fn rational(basis: &Arc<BasisDescriptor>, q: Rational) -> Self {
        let mut coords = vec![Rational::zero(); basis.dim()];
        coords[0] = q;
        SpanElement {
            basis: basis.clone(),
            coords,
        }
    }

    pub fn zero(basis: &Arc<BasisDescriptor>) -> Self {
        Self::rational(basis, Rational::zero())
    }

    pub fn one(basis: &Arc<BasisDescriptor>) -> Self {
        Self::rational(basis, Rational::one())
    }

    /// The basis symbol `r_i` itself.
    pub fn symbol(basis: &Arc<BasisDescriptor>, i: usize) -> Self {
        let mut coords = vec![Rational::zero(); basis.dim()];
        coords[i] = Rational::one();
        SpanElement {
            basis: basis.clone(),
            coords,
        }
    }

    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        &self.basis
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.coords[0])
    }

    /// Re-expresses the element over another basis with the same symbols
    /// (for instance one carrying a different refinement budget).
    pub fn rebased(&self, basis: &Arc<BasisDescriptor>) -> Result<Self> {
        if !same_basis(&self.basis, basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(SpanElement {
            basis: basis.clone(),
            coords: self.coords.clone(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SpanElement {
            basis: self.basis.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(SpanElement {
            basis: self.basis.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(SpanElement {
            basis: self.basis.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        })
    }

    /// Cursor of nested enclosures of the real value. `None` once any
    /// contributing symbol runs out of refinements.
    pub fn enclosures(&self) -> ValueEnclosures<'_> {
        let cursors = self
            .coords
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c, self.basis.enclosures(i)))
            .collect();
        ValueEnclosures {
            constant: &self.coords[0],
            cursors,
        }
    }

    /// Sign of the value, deciding by enclosure refinement.
    pub fn signum(&self) -> Result<Ordering> {
        if self.is_rational() {
            return Ok(self.coords[0].cmp(&Rational::zero()));
        }
        let budget = self.basis.budget();
        let mut it = self.enclosures();
        for _ in 0..=budget {
            let Some(iv) = it.next() else { break };
            if iv.lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if iv.hi.is_negative() {
                return Ok(Ordering::Less);
            }
        }
        Err(Error::RefinementExhausted { steps: budget })
    }

    pub fn is_positive(&self) -> Result<bool> {
        Ok(self.signum()? == Ordering::Greater)
    }

    pub fn is_nonnegative(&self) -> Result<bool> {
        Ok(self.signum()? != Ordering::Less)
    }

    /// Floor, decided exactly for rationals and by refinement otherwise.
    pub fn floor(&self) -> Result<Rational> {
        if let Some(q) = self.as_rational() {
            return Ok(q.floor());
        }
        let budget = self.basis.budget();
        let mut it = self.enclosures();
        for _ in 0..=budget {
            let Some(iv) = it.next() else { break };
            let lo = iv.lo.floor();
            let hi = iv.hi.floor();
            if lo == hi {
                return Ok(lo);
            }
        }
        Err(Error::FloorUndecidable)
    }

    /// Decimal rendering to `places` digits, round-half-even. Irrational
    /// values are refined until both enclosure ends round alike.
    pub fn decimal(&self, places: u32) -> Result<String> {
        if let Some(q) = self.as_rational() {
            return Ok(rational::decimal(q, places));
        }
        let budget = self.basis.budget().max(256);
        let mut it = self.enclosures();
        for _ in 0..=budget {
            let Some(iv) = it.next() else { break };
            let lo = rational::decimal_key(&iv.lo, places);
            let hi = rational::decimal_key(&iv.hi, places);
            if lo == hi {
                return Ok(rational::render_scaled(&lo, places));
            }
        }
        Err(Error::RefinementExhausted { steps: budget })
    }

    /// Rough floating value from a moderately refined enclosure.
    pub fn approx(&self) -> f64 {
        let mut last = None;
        for iv in self.enclosures().take(40) {
            last = Some(iv);
        }
        last.map_or(f64::NAN, |iv| {
            rational::to_f64(&((&iv.lo + &iv.hi) / Rational::from_integer(2.into())))
        })
    }

    /// Exact coordinates as strings; a rational renders as a single `"p/q"`.
    pub fn exact_string(&self) -> String {
        self.to_string()
    }
}

/// Three-way comparison of two span elements.
///
/// Equal exactly when the coordinate vectors agree; otherwise the enclosure
/// of `x - y` is refined until it excludes zero or the budget runs out.
pub fn compare(x: &SpanElement, y: &SpanElement) -> Result<Ordering> {
    x.try_sub(y)?.signum()
}

/// Nested enclosures of a span element's value.
pub struct ValueEnclosures<'a> {
    constant: &'a Rational,
    cursors: Vec<(&'a Rational, Enclosures<'a>)>,
}

impl Iterator for ValueEnclosures<'_> {
    type Item = Interval;

    fn next(&mut self) -> Option<Interval> {
        let mut acc = Interval::point(self.constant.clone());
        for (c, cur) in &mut self.cursors {
            let iv = cur.next()?;
            acc = acc.add(&iv.scale(c));
        }
        Some(acc)
    }
}

impl PartialEq for SpanElement {
    fn eq(&self, other: &Self) -> bool {
        same_basis(&self.basis, &other.basis) && self.coords == other.coords
    }
}

impl Eq for SpanElement {}

impl fmt::Display for SpanElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", format_rational(q));
        }
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for SpanElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(q) = self.as_rational() {
            return s.serialize_str(&format_rational(q));
        }
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

// Operator impls panic on a basis mismatch; the checked forms are
// `try_add` / `try_sub`.

impl Add for &SpanElement {
    type Output = SpanElement;
    fn add(self, rhs: &SpanElement) -> SpanElement {
        self.try_add(rhs).expect("basis mismatch in span addition")
    }
}

impl Sub for &SpanElement {
    type Output = SpanElement;
    fn sub(self, rhs: &SpanElement) -> SpanElement {
        self.try_sub(rhs).expect("basis mismatch in span subtraction")
    }
}

impl Neg for &SpanElement {
    type Output = SpanElement;
    fn neg(self) -> SpanElement {
        SpanElement {
            basis: self.basis.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&Rational> for &SpanElement {
    type Output = SpanElement;
    fn mul(self, rhs: &Rational) -> SpanElement {
        self.scale(rhs)
    }
}
