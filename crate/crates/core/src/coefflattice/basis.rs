//! Declared bases `(1, r_1, ..., r_l)` of a finitely generated Q-linear span
//! and the nested rational enclosures that locate each real symbol.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Default number of refinement steps a comparison may spend.
pub const DEFAULT_REFINE_BUDGET: usize = 64;

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        if c.is_negative() {
            Interval::new(&self.hi * c, &self.lo * c)
        } else {
            Interval::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }
}

/// Where the enclosures of a basis symbol come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnclosureSource {
    /// The symbol `r_0 = 1`.
    One,
    /// Simple continued fraction `[a_0; a_1, a_2, ...]` given as a finite
    /// prefix and an optional repeating block. Level `k` is the interval
    /// spanned by the convergents `c_k` and `c_{k+1}`.
    ContinuedFraction { prefix: Vec<BigInt>, period: Vec<BigInt> },
    /// Explicit nested intervals, coarsest first.
    Intervals(Vec<Interval>),
}

impl EnclosureSource {
    fn validate(&self, name: &str) -> Result<()> {
        match self {
            EnclosureSource::One => Ok(()),
            EnclosureSource::ContinuedFraction { prefix, period } => {
                if prefix.is_empty() {
                    return Err(Error::InvalidBasis(format!(
                        "{name}: continued fraction needs at least the integer part"
                    )));
                }
                if prefix.iter().skip(1).chain(period).any(|a| !a.is_positive()) {
                    return Err(Error::InvalidBasis(format!(
                        "{name}: partial quotients after the first must be positive"
                    )));
                }
                if period.is_empty() && prefix.len() < 2 {
                    return Err(Error::InvalidBasis(format!(
                        "{name}: a finite continued fraction needs at least two terms"
                    )));
                }
                Ok(())
            }
            EnclosureSource::Intervals(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidBasis(format!("{name}: empty interval list")));
                }
                for (i, iv) in list.iter().enumerate() {
                    if iv.lo >= iv.hi {
                        return Err(Error::InvalidBasis(format!(
                            "{name}: interval {i} is empty or a single point"
                        )));
                    }
                    if i > 0 {
                        let prev = &list[i - 1];
                        if !prev.contains(iv) {
                            return Err(Error::InvalidBasis(format!(
                                "{name}: interval {i} is not nested in its predecessor"
                            )));
                        }
                        if iv.width() >= prev.width() {
                            return Err(Error::InvalidBasis(format!(
                                "{name}: interval {i} does not shrink"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// A named real number with its enclosure source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub source: EnclosureSource,
}

/// The ordered basis `(r_0 = 1, r_1, ..., r_l)`.
///
/// Q-linear independence is declared, not proven; comparisons trust it.
#[derive(Clone, Debug)]
pub struct BasisDescriptor {
    symbols: Vec<Symbol>,
    independent: bool,
    budget: usize,
}

impl PartialEq for BasisDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols && self.independent == other.independent
    }
}

impl Eq for BasisDescriptor {}

impl BasisDescriptor {
    /// Builds a basis from the irrational symbols `r_1..r_l`; `r_0 = 1` is
    /// prepended.
    pub fn new(symbols: Vec<Symbol>, independent: bool) -> Result<Arc<Self>> {
        let mut all = vec![Symbol {
            name: "1".to_string(),
            source: EnclosureSource::One,
        }];
        for s in symbols {
            if s.name == "1" || all.iter().any(|t| t.name == s.name) {
                return Err(Error::InvalidBasis(format!("duplicate symbol {:?}", s.name)));
            }
            if s.source == EnclosureSource::One {
                return Err(Error::InvalidBasis(format!(
                    "{}: only r0 may be the constant 1",
                    s.name
                )));
            }
            s.source.validate(&s.name)?;
            all.push(s);
        }
        Ok(Arc::new(BasisDescriptor {
            symbols: all,
            independent,
            budget: DEFAULT_REFINE_BUDGET,
        }))
    }

    /// The basis `(1)` of the rationals.
    pub fn rationals() -> Arc<Self> {
        Self::new(Vec::new(), true).expect("empty basis is valid")
    }

    /// Copy of this basis with a different refinement budget.
    pub fn with_budget(&self, budget: usize) -> Arc<Self> {
        Arc::new(BasisDescriptor {
            budget,
            ..self.clone()
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn independent(&self) -> bool {
        self.independent
    }

    /// Number of symbols including `r_0`.
    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    /// Number of irrational symbols `l`.
    pub fn irrational_count(&self) -> usize {
        self.symbols.len() - 1
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// A fresh cursor over the enclosures of symbol `i`.
    pub fn enclosures(&self, i: usize) -> Enclosures<'_> {
        Enclosures::new(&self.symbols[i].source)
    }

    /// The `level`-th enclosure of symbol `i`, if the source reaches it.
    pub fn enclosure(&self, i: usize, level: usize) -> Option<Interval> {
        self.enclosures(i).nth(level)
    }

    /// Numerical sanity check for the declared independence: evaluates every
    /// integer relation with coefficients in `[-max_coeff, max_coeff]` and
    /// reports those that vanish to within `tolerance`. Warnings only.
    pub fn independence_warnings(&self, max_coeff: i64, tolerance: f64) -> Vec<String> {
        let l = self.dim();
        if l <= 1 || l > 5 {
            return Vec::new();
        }
        let values: Vec<f64> = (0..l)
            .map(|i| {
                let mut cur = self.enclosures(i);
                let mut last = cur.next();
                for _ in 0..40 {
                    match cur.next() {
                        Some(iv) => last = Some(iv),
                        None => break,
                    }
                }
                last.map_or(f64::NAN, |iv| {
                    super::rational::to_f64(&((&iv.lo + &iv.hi) / Rational::from_integer(2.into())))
                })
            })
            .collect();
        let mut warnings = Vec::new();
        let span = (2 * max_coeff + 1) as usize;
        let total = span.pow(l as u32);
        for code in 0..total {
            let mut c = code;
            let coeffs: Vec<i64> = (0..l)
                .map(|_| {
                    let d = (c % span) as i64 - max_coeff;
                    c /= span;
                    d
                })
                .collect();
            // Only relations that involve an irrational symbol, normalized so
            // the last nonzero coefficient is positive.
            let Some(last) = coeffs.iter().rposition(|&x| x != 0) else {
                continue;
            };
            if last == 0 || coeffs[last] < 0 {
                continue;
            }
            let v: f64 = coeffs.iter().zip(&values).map(|(&c, &x)| c as f64 * x).sum();
            if v.abs() < tolerance {
                let terms: Vec<String> = coeffs
                    .iter()
                    .zip(&self.symbols)
                    .filter(|(c, _)| **c != 0)
                    .map(|(c, s)| format!("{c}*{}", s.name))
                    .collect();
                warnings.push(format!("near relation {} ~ 0 ({v:e})", terms.join(" + ")));
            }
        }
        warnings
    }
}

/// Cursor over the nested enclosures of one symbol. Each call to `next`
/// yields a refinement of the previous interval.
pub struct Enclosures<'a> {
    kind: Cursor<'a>,
}

enum Cursor<'a> {
    One,
    Cf {
        prefix: &'a [BigInt],
        period: &'a [BigInt],
        index: usize,
        // Convergents p_{k-1}/q_{k-1}, p_k/q_k for the last consumed term.
        prev: (BigInt, BigInt),
        cur: (BigInt, BigInt),
    },
    List(std::slice::Iter<'a, Interval>),
}

impl<'a> Enclosures<'a> {
    fn new(source: &'a EnclosureSource) -> Self {
        let kind = match source {
            EnclosureSource::One => Cursor::One,
            EnclosureSource::ContinuedFraction { prefix, period } => {
                let a0 = prefix[0].clone();
                Cursor::Cf {
                    prefix,
                    period,
                    index: 1,
                    prev: (BigInt::one(), BigInt::zero()),
                    cur: (a0, BigInt::one()),
                }
            }
            EnclosureSource::Intervals(list) => Cursor::List(list.iter()),
        };
        Enclosures { kind }
    }
}

impl Iterator for Enclosures<'_> {
    type Item = Interval;

    fn next(&mut self) -> Option<Interval> {
        match &mut self.kind {
            Cursor::One => Some(Interval::point(Rational::one())),
            Cursor::List(it) => it.next().cloned(),
            Cursor::Cf {
                prefix,
                period,
                index,
                prev,
                cur,
            } => {
                let term = if *index < prefix.len() {
                    prefix[*index].clone()
                } else if !period.is_empty() {
                    period[(*index - prefix.len()) % period.len()].clone()
                } else {
                    return None;
                };
                *index += 1;
                let next = (&term * &cur.0 + &prev.0, &term * &cur.1 + &prev.1);
                let a = Rational::new(cur.0.clone(), cur.1.clone());
                let b = Rational::new(next.0.clone(), next.1.clone());
                *prev = std::mem::replace(cur, next);
                Some(if a < b {
                    Interval::new(a, b)
                } else {
                    Interval::new(b, a)
                })
            }
        }
    }
}

/// Render an enclosure source back to a short human form.
pub fn describe_source(source: &EnclosureSource) -> String {
    match source {
        EnclosureSource::One => "1".into(),
        EnclosureSource::ContinuedFraction { prefix, period } => {
            let p: Vec<String> = prefix.iter().map(ToString::to_string).collect();
            let q: Vec<String> = period.iter().map(ToString::to_string).collect();
            if q.is_empty() {
                format!("cf[{}]", p.join(","))
            } else {
                format!("cf[{}; ({})]", p.join(","), q.join(","))
            }
        }
        EnclosureSource::Intervals(list) => format!(
            "intervals x{} (finest [{}, {}])",
            list.len(),
            format_rational(&list.last().unwrap().lo),
            format_rational(&list.last().unwrap().hi)
        ),
    }
}

/// Continued fraction of `sqrt(2) = [1; (2)]`.
pub fn sqrt2_source() -> EnclosureSource {
    EnclosureSource::ContinuedFraction {
        prefix: vec![BigInt::from(1)],
        period: vec![BigInt::from(2)],
    }
}
