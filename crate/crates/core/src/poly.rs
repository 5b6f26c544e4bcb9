//! Sparse bivariate polynomials and their linear recurring relations.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::ff::{Field, FieldElement};
use crate::order::{Point, TotalOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no leading point")]
    ZeroPolynomial,
    #[error("cannot parse polynomial term {0:?}")]
    Parse(String),
}

/// Read access to (part of) a two-dimensional array.
///
/// `None` means the value at that index is not known. Implementations never
/// fabricate values.
pub trait ArrayView {
    fn value(&self, n: Point) -> Option<FieldElement>;
}

impl ArrayView for BTreeMap<Point, FieldElement> {
    fn value(&self, n: Point) -> Option<FieldElement> {
        self.get(&n).copied()
    }
}

impl ArrayView for HashMap<Point, FieldElement> {
    fn value(&self, n: Point) -> Option<FieldElement> {
        self.get(&n).copied()
    }
}

impl<T: ArrayView + ?Sized> ArrayView for &T {
    fn value(&self, n: Point) -> Option<FieldElement> {
        (**self).value(n)
    }
}

/// Outcome of evaluating `f[u]_n` on a possibly partial array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recurrence {
    Value(FieldElement),
    /// The first index the sum needs that the view does not know.
    NeedsIndex(Point),
}

/// `Σ f_m X^m` with no explicit zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<Point, FieldElement>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(FieldElement::ONE, Point::ORIGIN)
    }

    pub fn monomial(c: FieldElement, m: Point) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        BivariatePolynomial { terms }
    }

    /// Sums the given terms, merging repeated exponents.
    pub fn from_terms(field: &Field, terms: impl IntoIterator<Item = (Point, FieldElement)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(field, m, c);
        }
        p
    }

    fn add_term(&mut self, field: &Field, m: Point, c: FieldElement) {
        let sum = field.add(self.coeff(m), c);
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Point) -> FieldElement {
        self.terms.get(&m).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Point, FieldElement)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.terms.keys().copied()
    }

    /// Number of nonzero terms.
    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn leading_point(&self, order: TotalOrder) -> Result<Point, PolyError> {
        order.max(self.support()).ok_or(PolyError::ZeroPolynomial)
    }

    pub fn leading_coeff(&self, order: TotalOrder) -> Result<FieldElement, PolyError> {
        Ok(self.coeff(self.leading_point(order)?))
    }

    /// Terms sorted by decreasing monomial order.
    pub fn sorted_terms(&self, order: TotalOrder) -> Vec<(Point, FieldElement)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| order.compare(b.0, a.0));
        v
    }

    pub fn evaluate(&self, field: &Field, at: (FieldElement, FieldElement)) -> FieldElement {
        self.terms().fold(FieldElement::ZERO, |acc, (m, c)| {
            let x1 = field.pow(at.0, m.0 as i64).expect("nonnegative exponent");
            let x2 = field.pow(at.1, m.1 as i64).expect("nonnegative exponent");
            field.add(acc, field.mul(c, field.mul(x1, x2)))
        })
    }

    /// `X^t * self`.
    pub fn shift(&self, t: Point) -> Self {
        BivariatePolynomial {
            terms: self.terms.iter().map(|(&m, &c)| (m + t, c)).collect(),
        }
    }

    pub fn scale(&self, field: &Field, c: FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BivariatePolynomial {
            terms: self.terms.iter().map(|(&m, &v)| (m, field.mul(v, c))).collect(),
        }
    }

    pub fn add(&self, field: &Field, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(field, m, c);
        }
        out
    }

    /// `self + c * X^t * g`.
    pub fn add_scaled_shift(&self, field: &Field, c: FieldElement, t: Point, g: &Self) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            return out;
        }
        for (m, v) in g.terms() {
            out.add_term(field, m + t, field.mul(c, v));
        }
        out
    }

    /// `f[u]_n = Σ f_m u_(m + n - s)` for `n ⪰ s = LP(f)`, zero otherwise.
    pub fn recurrence_value(
        &self,
        field: &Field,
        u: &impl ArrayView,
        n: Point,
        order: TotalOrder,
    ) -> Result<Recurrence, PolyError> {
        let s = self.leading_point(order)?;
        let Some(shift) = n.checked_sub(s) else {
            return Ok(Recurrence::Value(FieldElement::ZERO));
        };
        let mut acc = FieldElement::ZERO;
        for (m, c) in self.sorted_terms(order) {
            let idx = m + shift;
            match u.value(idx) {
                Some(v) => acc = field.add(acc, field.mul(c, v)),
                None => return Ok(Recurrence::NeedsIndex(idx)),
            }
        }
        Ok(Recurrence::Value(acc))
    }

    /// Text form, terms in decreasing order, e.g. `X1^2+a^2*X1+a^9`.
    pub fn to_text(&self, order: TotalOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let terms: Vec<String> = self
            .sorted_terms(order)
            .into_iter()
            .map(|(m, c)| format_term(m, c))
            .collect();
        terms.join("+")
    }

    /// Parses the text form. Accepts `a`, `a^k`, `1`, `X1`, `X1^i`, `X2`,
    /// `X2^j` factors joined by `*`, and terms joined by `+`.
    pub fn parse(field: &Field, text: &str) -> Result<Self, PolyError> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in text.split('+') {
            let bad = || PolyError::Parse(term.to_string());
            if term.is_empty() {
                return Err(bad());
            }
            let mut coeff = FieldElement::ONE;
            let mut m = Point::ORIGIN;
            for factor in term.split('*') {
                if let Some(rest) = factor.strip_prefix("X1") {
                    m.0 += parse_exponent(rest).ok_or_else(bad)?;
                } else if let Some(rest) = factor.strip_prefix("X2") {
                    m.1 += parse_exponent(rest).ok_or_else(bad)?;
                } else {
                    let c = field.parse_element(factor).map_err(|_| bad())?;
                    coeff = field.mul(coeff, c);
                }
            }
            out.add_term(field, m, coeff);
        }
        Ok(out)
    }
}

fn parse_exponent(rest: &str) -> Option<usize> {
    if rest.is_empty() {
        Some(1)
    } else {
        rest.strip_prefix('^')?.parse().ok()
    }
}

fn format_term(m: Point, c: FieldElement) -> String {
    let mut factors = Vec::new();
    if !c.is_one() || m == Point::ORIGIN {
        factors.push(if c.is_one() {
            "1".to_string()
        } else {
            c.to_string()
        });
    }
    for (name, e) in [("X1", m.0), ("X2", m.1)] {
        match e {
            0 => {}
            1 => factors.push(name.to_string()),
            e => factors.push(format!("{name}^{e}")),
        }
    }
    factors.join("*")
}

/// `X^t f + g`.
pub fn shift_add(
    field: &Field,
    f: &BivariatePolynomial,
    t: Point,
    g: &BivariatePolynomial,
) -> BivariatePolynomial {
    g.add_scaled_shift(field, FieldElement::ONE, t, f)
}
