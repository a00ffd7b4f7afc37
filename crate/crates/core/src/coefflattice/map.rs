use std::sync::Arc;

use num_traits::{One, Zero};

use super::basis::BasisDescriptor;
use super::rational::Rational;
use super::span::{same_basis, SpanElement};
use crate::error::{Error, Result};

/// A Q-linear map between spans, stored as a rational matrix with one row
/// per target symbol and one column per source symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct QLinearMap {
    source: Arc<BasisDescriptor>,
    target: Arc<BasisDescriptor>,
    matrix: Vec<Vec<Rational>>,
}

impl QLinearMap {
    pub fn new(
        source: &Arc<BasisDescriptor>,
        target: &Arc<BasisDescriptor>,
        matrix: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if matrix.len() != target.dim() || matrix.iter().any(|r| r.len() != source.dim()) {
            return Err(Error::InvalidArgument(format!(
                "map matrix must be {}x{}",
                target.dim(),
                source.dim()
            )));
        }
        Ok(QLinearMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    pub fn identity(basis: &Arc<BasisDescriptor>) -> Self {
        let n = basis.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        QLinearMap {
            source: basis.clone(),
            target: basis.clone(),
            matrix,
        }
    }

    /// Rational-valued map fixing Q with `f(r_i) = values[i - 1]`.
    pub fn to_rationals(source: &Arc<BasisDescriptor>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != source.irrational_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} symbol images, got {}",
                source.irrational_count(),
                values.len()
            )));
        }
        let row = std::iter::once(Rational::one()).chain(values).collect();
        Ok(QLinearMap {
            source: source.clone(),
            target: BasisDescriptor::rationals(),
            matrix: vec![row],
        })
    }

    pub fn source(&self) -> &Arc<BasisDescriptor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BasisDescriptor> {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    /// True when the image of `r_0 = 1` is exactly `1`.
    pub fn fixes_q(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(i, row)| if i == 0 { row[0].is_one() } else { row[0].is_zero() })
    }

    pub fn is_rational_valued(&self) -> bool {
        self.target.dim() == 1
    }

    /// Image of a rational-valued map on symbol `i`.
    pub fn image_of_symbol(&self, i: usize) -> SpanElement {
        let coords = self.matrix.iter().map(|row| row[i].clone()).collect();
        SpanElement::new(&self.target, coords).expect("matrix shape checked")
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &QLinearMap) -> Result<QLinearMap> {
        if !same_basis(&self.target, &g.source) {
            return Err(Error::BasisMismatch);
        }
        let rows = g.target.dim();
        let cols = self.source.dim();
        let inner = self.target.dim();
        let matrix = (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        (0..inner).fold(Rational::zero(), |acc, k| {
                            acc + &g.matrix[i][k] * &self.matrix[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        QLinearMap::new(&self.source, &g.target, matrix)
    }

    /// `Σ w_k f_k` for rational weights over maps sharing source and target.
    pub fn combination(terms: &[(Rational, QLinearMap)]) -> Result<QLinearMap> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        let mut matrix =
            vec![vec![Rational::zero(); first.source.dim()]; first.target.dim()];
        for (w, f) in terms {
            if !same_basis(&f.source, &first.source) || !same_basis(&f.target, &first.target) {
                return Err(Error::BasisMismatch);
            }
            for (row, frow) in matrix.iter_mut().zip(&f.matrix) {
                for (x, y) in row.iter_mut().zip(frow) {
                    *x += w * y;
                }
            }
        }
        QLinearMap::new(&first.source, &first.target, matrix)
    }
}

/// Applies `f` to `x`: coordinates of the result are `matrix · coords(x)`.
pub fn apply_map(f: &QLinearMap, x: &SpanElement) -> Result<SpanElement> {
    if !same_basis(&f.source, x.basis()) {
        return Err(Error::BasisMismatch);
    }
    let coords = f
        .matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(x.coords())
                .fold(Rational::zero(), |acc, (m, c)| acc + m * c)
        })
        .collect();
    SpanElement::new(&f.target, coords)
}

/// Componentwise [`apply_map`] over a list of divisor coefficients.
pub fn apply_to_coefficients(f: &QLinearMap, coeffs: &[SpanElement]) -> Result<Vec<SpanElement>> {
    coeffs.iter().map(|c| apply_map(f, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefflattice::basis::{sqrt2_source, Symbol};
    use crate::coefflattice::rational::{int, rat};

    fn basis() -> Arc<BasisDescriptor> {
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
    fn identity_is_identity() {
        let b = basis();
        let x = SpanElement::new(&b, vec![rat(1, 2), rat(1, 3)]).unwrap();
        assert_eq!(apply_map(&QLinearMap::identity(&b), &x).unwrap(), x);
    }

    #[test]
    fn reads_off_symbol_image() {
        let b = basis();
        let f = QLinearMap::to_rationals(&b, vec![rat(7, 5)]).unwrap();
        assert!(f.fixes_q());
        let y = apply_map(&f, &SpanElement::symbol(&b, 1)).unwrap();
        assert_eq!(y.as_rational(), Some(&rat(7, 5)));
        let one = apply_map(&f, &SpanElement::one(&b)).unwrap();
        assert_eq!(one.as_rational(), Some(&int(1)));
    }

    #[test]
    fn hand_matrix_multiply() {
        let b = basis();
        let f = QLinearMap::to_rationals(&b, vec![rat(7, 5)]).unwrap();
        let x = SpanElement::new(&b, vec![int(3), int(-2)]).unwrap();
        assert_eq!(apply_map(&f, &x).unwrap().as_rational(), Some(&rat(1, 5)));
    }

    #[test]
    fn coefficient_lists() {
        let b = basis();
        let f = QLinearMap::to_rationals(&b, vec![rat(7, 5)]).unwrap();
        let cs = vec![
            SpanElement::symbol(&b, 1),
            SpanElement::rational(&b, rat(1, 2)),
        ];
        let out = apply_to_coefficients(&f, &cs).unwrap();
        assert_eq!(out[0].as_rational(), Some(&rat(7, 5)));
        assert_eq!(out[1].as_rational(), Some(&rat(1, 2)));
        assert!(apply_to_coefficients(&f, &[]).unwrap().is_empty());
        let id = QLinearMap::identity(&b);
        assert_eq!(apply_to_coefficients(&id, &cs).unwrap(), cs);
    }

    #[test]
    fn composition_and_mismatch() {
        let b = basis();
        let f = QLinearMap::to_rationals(&b, vec![rat(7, 5)]).unwrap();
        let g = QLinearMap::identity(&b).then(&f).unwrap();
        assert_eq!(g, f);
        let q = BasisDescriptor::rationals();
        assert!(matches!(
            apply_map(&f, &SpanElement::one(&q)),
            Err(Error::BasisMismatch)
        ));
    }
}
