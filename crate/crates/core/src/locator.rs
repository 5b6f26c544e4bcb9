//! Syndrome tables, error-locator support recovery, array completion and
//! error-value solving.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bms::{normal_form, BmsError};
use crate::ff::{Field, FieldElement, FieldError};
use crate::order::{DeltaSet, Point, TotalOrder};
use crate::poly::{ArrayView, BivariatePolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocatorError {
    #[error("value at delta index {0} is unknown")]
    MissingInitialValue(Point),
    #[error("the syndrome equations have no solution on this support")]
    InconsistentSystem,
    #[error("the syndrome equations do not determine the error values on this support")]
    Underdetermined,
    #[error("error value at {0} is zero, so the support is wrong")]
    ZeroCoefficient(Point),
    #[error("error value {value} at {at} is not in GF({q})")]
    NotInBaseField { at: Point, value: FieldElement, q: u32 },
    #[error("coefficient at {at} lies outside the {period:?} grid")]
    OutsidePeriod { at: Point, period: (usize, usize) },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Bms(#[from] BmsError),
}

/// Primitive `r1`-th and `r2`-th roots of unity `(α1, α2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaPair {
    pub first: FieldElement,
    pub second: FieldElement,
}

impl AlphaPair {
    /// The canonical pair `(a^((Q-1)/r1), a^((Q-1)/r2))`.
    pub fn for_period(field: &Field, period: (usize, usize)) -> Result<Self, FieldError> {
        Ok(AlphaPair {
            first: field.root_of_unity(period.0 as u32)?,
            second: field.root_of_unity(period.1 as u32)?,
        })
    }

    /// `ᾱ^n = (α1^n1, α2^n2)`.
    pub fn power(&self, field: &Field, n: Point) -> (FieldElement, FieldElement) {
        (
            field
                .pow(self.first, n.0 as i64)
                .expect("root of unity is nonzero"),
            field
                .pow(self.second, n.1 as i64)
                .expect("root of unity is nonzero"),
        )
    }

    /// `ᾱ^(n · m) = α1^(n1 m1) α2^(n2 m2)`.
    fn kernel(&self, field: &Field, n: Point, m: Point) -> FieldElement {
        let (x, y) = self.power(field, n);
        field.mul(
            field.pow(x, m.0 as i64).expect("nonzero"),
            field.pow(y, m.1 as i64).expect("nonzero"),
        )
    }
}

/// A doubly periodic array, possibly with unknown entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicArray {
    period: (usize, usize),
    cells: Vec<Option<FieldElement>>,
}

impl PeriodicArray {
    pub fn unknown(period: (usize, usize)) -> Self {
        PeriodicArray {
            period,
            cells: vec![None; period.0 * period.1],
        }
    }

    pub fn from_fn(period: (usize, usize), mut value: impl FnMut(Point) -> FieldElement) -> Self {
        let mut out = Self::unknown(period);
        for i in 0..period.0 {
            for j in 0..period.1 {
                out.set(Point(i, j), value(Point(i, j)));
            }
        }
        out
    }

    pub fn period(&self) -> (usize, usize) {
        self.period
    }

    fn slot(&self, n: Point) -> usize {
        let n = n.reduce(self.period);
        n.0 * self.period.1 + n.1
    }

    pub fn get(&self, n: Point) -> Option<FieldElement> {
        self.cells[self.slot(n)]
    }

    pub fn set(&mut self, n: Point, v: FieldElement) {
        let k = self.slot(n);
        self.cells[k] = Some(v);
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// Points of `I = Z_r1 x Z_r2` in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Point> {
        grid(self.period)
    }
}

impl ArrayView for PeriodicArray {
    fn value(&self, n: Point) -> Option<FieldElement> {
        self.get(n)
    }
}

/// Row-major points of the `r1 x r2` grid.
pub fn grid(period: (usize, usize)) -> impl Iterator<Item = Point> {
    (0..period.0).flat_map(move |i| (0..period.1).map(move |j| Point(i, j)))
}

/// An error polynomial: coefficients in `GF(q)`, support inside the grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorPolynomial(BivariatePolynomial);

impl ErrorPolynomial {
    pub fn new(
        field: &Field,
        poly: BivariatePolynomial,
        q: u32,
        period: (usize, usize),
    ) -> Result<Self, LocatorError> {
        for (m, c) in poly.terms() {
            if m.0 >= period.0 || m.1 >= period.1 {
                return Err(LocatorError::OutsidePeriod { at: m, period });
            }
            if !field.in_base_field(c, q)? {
                return Err(LocatorError::NotInBaseField { at: m, value: c, q });
            }
        }
        Ok(ErrorPolynomial(poly))
    }

    pub fn zero() -> Self {
        ErrorPolynomial(BivariatePolynomial::zero())
    }

    pub fn poly(&self) -> &BivariatePolynomial {
        &self.0
    }

    pub fn into_poly(self) -> BivariatePolynomial {
        self.0
    }

    pub fn weight(&self) -> usize {
        self.0.weight()
    }

    pub fn support(&self) -> BTreeSet<Point> {
        self.0.support().collect()
    }
}

/// `u_n = e(ᾱ^(τ+n))` for each requested `n`.
pub fn syndromes(
    field: &Field,
    e: &BivariatePolynomial,
    tau: Point,
    alpha: &AlphaPair,
    indices: impl IntoIterator<Item = Point>,
) -> BTreeMap<Point, FieldElement> {
    indices
        .into_iter()
        .map(|n| (n, e.evaluate(field, alpha.power(field, tau + n))))
        .collect()
}

/// The whole syndrome table of `e`.
pub fn syndrome_table(
    field: &Field,
    e: &BivariatePolynomial,
    tau: Point,
    alpha: &AlphaPair,
    period: (usize, usize),
) -> PeriodicArray {
    PeriodicArray::from_fn(period, |n| e.evaluate(field, alpha.power(field, tau + n)))
}

/// Remainder of `X^n` modulo the Groebner basis; its support lies in `delta`.
fn monomial_remainder(
    field: &Field,
    basis: &[BivariatePolynomial],
    delta: &DeltaSet,
    n: Point,
    order: TotalOrder,
) -> Result<BivariatePolynomial, LocatorError> {
    let leads: Vec<Point> = basis
        .iter()
        .map(|f| f.leading_point(order))
        .collect::<Result<_, _>>()
        .map_err(BmsError::from)?;
    let mut r = BivariatePolynomial::monomial(FieldElement::ONE, n);
    loop {
        let Some(m) = order.max(r.support().filter(|&m| !delta.contains(m))) else {
            return Ok(r);
        };
        let j = leads
            .iter()
            .position(|&s| s.preceq(m))
            .ok_or(BmsError::IrreducibleTerm {
                poly: r.to_text(order),
                term: m,
            })?;
        let c = field.div(r.coeff(m), basis[j].coeff(leads[j]))?;
        r = r.add_scaled_shift(field, field.neg(c), m.checked_sub(leads[j]).unwrap(), &basis[j]);
    }
}

/// Fills the full period from a Groebner basis and the values on its
/// delta-set. Each unknown `u_n` equals `Σ R_n[m] u_m` where `R_n` is the
/// remainder of `X^n`, since `X^n - R_n` lies in the ideal.
pub fn complete_array(
    field: &Field,
    basis: &[BivariatePolynomial],
    known: &impl ArrayView,
    order: TotalOrder,
    period: (usize, usize),
) -> Result<PeriodicArray, LocatorError> {
    let leads: Vec<Point> = basis
        .iter()
        .map(|f| f.leading_point(order))
        .collect::<Result<_, _>>()
        .map_err(BmsError::from)?;
    let mut sorted = leads.clone();
    sorted.sort_by_key(|p| std::cmp::Reverse(p.0));
    let delta = DeltaSet::from_defining_points(&sorted).unwrap_or_else(|_| minimal_delta(&leads, period));
    let basis = normal_form(field, basis, &delta, order)?;
    let mut seed = BTreeMap::new();
    for &m in delta.members() {
        let v = known.value(m).ok_or(LocatorError::MissingInitialValue(m))?;
        seed.insert(m, v);
    }
    let mut out = PeriodicArray::unknown(period);
    for n in grid(period) {
        let v = match known.value(n) {
            Some(v) => v,
            None => {
                let r = monomial_remainder(field, &basis, &delta, n, order)?;
                r.terms().fold(FieldElement::ZERO, |acc, (m, c)| {
                    field.add(acc, field.mul(c, seed[&m]))
                })
            }
        };
        out.set(n, v);
    }
    Ok(out)
}

/// Points of the grid not above any leading point (used when the leading
/// points are not exactly the defining points of a staircase).
fn minimal_delta(leads: &[Point], period: (usize, usize)) -> DeltaSet {
    let members = grid(period).filter(|&n| !leads.iter().any(|s| s.preceq(n)));
    DeltaSet::from_members(members).expect("complement of a monomial ideal is a staircase")
}

/// `{n ∈ I : f(ᾱ^n) = 0 for every f}`.
pub fn support_from_basis(
    field: &Field,
    basis: &[BivariatePolynomial],
    alpha: &AlphaPair,
    period: (usize, usize),
) -> BTreeSet<Point> {
    grid(period)
        .filter(|&n| {
            let x = alpha.power(field, n);
            basis.iter().all(|f| f.evaluate(field, x).is_zero())
        })
        .collect()
}

/// Solves `Σ_s e_s ᾱ^((τ+n)·s) = u_n` for the error values on `support`.
pub fn solve_coefficients(
    field: &Field,
    support: &BTreeSet<Point>,
    syndromes: &BTreeMap<Point, FieldElement>,
    tau: Point,
    alpha: &AlphaPair,
    q: u32,
) -> Result<ErrorPolynomial, LocatorError> {
    let cols: Vec<Point> = support.iter().copied().collect();
    let rows: Vec<(Vec<FieldElement>, FieldElement)> = syndromes
        .iter()
        .map(|(&n, &u)| {
            let row = cols.iter().map(|&s| alpha.kernel(field, tau + n, s)).collect();
            (row, u)
        })
        .collect();
    let values = if q == 2 {
        vec![FieldElement::ONE; cols.len()]
    } else {
        eliminate(field, rows.clone(), cols.len())?
    };
    for (row, u) in &rows {
        let lhs = row.iter().zip(&values).fold(FieldElement::ZERO, |acc, (&k, &e)| {
            field.add(acc, field.mul(k, e))
        });
        if lhs != *u {
            return Err(LocatorError::InconsistentSystem);
        }
    }
    let mut terms = Vec::with_capacity(cols.len());
    for (&s, &v) in cols.iter().zip(&values) {
        if v.is_zero() {
            return Err(LocatorError::ZeroCoefficient(s));
        }
        if !field.in_base_field(v, q)? {
            return Err(LocatorError::NotInBaseField { at: s, value: v, q });
        }
        terms.push((s, v));
    }
    Ok(ErrorPolynomial(BivariatePolynomial::from_terms(field, terms)))
}

/// Gauss-Jordan elimination; requires a unique solution.
fn eliminate(
    field: &Field,
    mut rows: Vec<(Vec<FieldElement>, FieldElement)>,
    unknowns: usize,
) -> Result<Vec<FieldElement>, LocatorError> {
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            return Err(LocatorError::Underdetermined);
        };
        rows.swap(rank, p);
        let inv = field.inv(rows[rank].0[col])?;
        let (pivot_row, pivot_rhs) = {
            let (r, b) = &rows[rank];
            (
                r.iter().map(|&x| field.mul(x, inv)).collect::<Vec<_>>(),
                field.mul(*b, inv),
            )
        };
        for (i, (r, b)) in rows.iter_mut().enumerate() {
            if i == rank || r[col].is_zero() {
                continue;
            }
            let c = r[col];
            for (x, &y) in r.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(c, y));
            }
            *b = field.sub(*b, field.mul(c, pivot_rhs));
        }
        rows[rank] = (pivot_row, pivot_rhs);
        rank += 1;
    }
    if rows[rank..].iter().any(|(_, b)| !b.is_zero()) {
        return Err(LocatorError::InconsistentSystem);
    }
    Ok(rows[..unknowns].iter().map(|(_, b)| *b).collect())
}

/// Outcome of testing a candidate error polynomial against the syndromes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub candidate: Option<ErrorPolynomial>,
    pub reason: Option<String>,
}

/// Builds `e_F` on the zero set of `basis` and checks that it reproduces
/// every given syndrome.
pub fn termination_check(
    field: &Field,
    basis: &[BivariatePolynomial],
    syndromes: &BTreeMap<Point, FieldElement>,
    tau: Point,
    alpha: &AlphaPair,
    period: (usize, usize),
    q: u32,
) -> Verdict {
    let support = support_from_basis(field, basis, alpha, period);
    match solve_coefficients(field, &support, syndromes, tau, alpha, q) {
        Ok(e) => Verdict {
            holds: true,
            candidate: Some(e),
            reason: None,
        },
        Err(err) => Verdict {
            holds: false,
            candidate: None,
            reason: Some(err.to_string()),
        },
    }
}

/// On-disk syndrome table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeFile {
    pub tau: Point,
    pub entries: Vec<SyndromeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeEntry {
    pub n: Point,
    pub v: String,
}

impl SyndromeFile {
    pub fn new(tau: Point, values: &BTreeMap<Point, FieldElement>) -> Self {
        SyndromeFile {
            tau,
            entries: values
                .iter()
                .map(|(&n, v)| SyndromeEntry { n, v: v.to_string() })
                .collect(),
        }
    }

    pub fn values(&self, field: &Field) -> Result<BTreeMap<Point, FieldElement>, FieldError> {
        self.entries
            .iter()
            .map(|e| Ok((e.n, field.parse_element(&e.v)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bms::run;
    use crate::ff::gf16;
    use crate::order::SofT;

    fn p(field: &Field, s: &str) -> BivariatePolynomial {
        BivariatePolynomial::parse(field, s).unwrap()
    }

    fn five_by_five() -> (Field, AlphaPair, BivariatePolynomial) {
        let f = gf16();
        let alpha = AlphaPair::for_period(&f, (5, 5)).unwrap();
        let e = p(&f, "X1*X2^2+X1^2*X2^2");
        (f, alpha, e)
    }

    #[test]
    fn syndrome_examples() {
        let (f, alpha, e) = five_by_five();
        let u = syndromes(&f, &e, Point(1, 1), &alpha, [Point(0, 0), Point(3, 0)]);
        assert_eq!(u[&Point(0, 0)], f.alpha_pow(8));
        assert_eq!(u[&Point(3, 0)], f.alpha_pow(14));
        let z = syndromes(
            &f,
            &BivariatePolynomial::zero(),
            Point(1, 1),
            &alpha,
            [Point(2, 2)],
        );
        assert!(z[&Point(2, 2)].is_zero());
    }

    #[test]
    fn support_examples() {
        let (f, alpha, _) = five_by_five();
        let basis = [p(&f, "X1^2+a^2*X1+a^9"), p(&f, "X2+a^6")];
        let support = support_from_basis(&f, &basis, &alpha, (5, 5));
        assert_eq!(support, BTreeSet::from([Point(1, 2), Point(2, 2)]));
        let none = support_from_basis(&f, &[p(&f, "X1"), p(&f, "X2")], &alpha, (5, 5));
        assert!(none.is_empty());
        let alpha = AlphaPair::for_period(&f, (5, 15)).unwrap();
        let basis = [p(&f, "X1+a^8*X2+a^5"), p(&f, "X2^2+a^6*X2+a^5")];
        let support = support_from_basis(&f, &basis, &alpha, (5, 15));
        assert_eq!(support, BTreeSet::from([Point(0, 2), Point(1, 3)]));
    }

    #[test]
    fn completion_matches_direct_evaluation() {
        let (f, alpha, e) = five_by_five();
        let tau = Point(1, 1);
        let s = SofT::new(2);
        let known = syndromes(&f, &e, tau, &alpha, s.schedule(TotalOrder::Lex).iter().copied());
        let truth = syndrome_table(&f, &e, tau, &alpha, (5, 5));
        for order in [TotalOrder::Lex, TotalOrder::Graded] {
            let out = run(&f, &known, order, 2, (5, 5)).unwrap();
            let full = complete_array(&f, &out.basis, &known, order, (5, 5)).unwrap();
            assert_eq!(full, truth);
            assert_eq!(full.get(Point(6, 2)), full.get(Point(1, 2)));
        }
    }

    #[test]
    fn completion_needs_delta_values() {
        let (f, _, _) = five_by_five();
        let basis = [p(&f, "X1^2+a^2*X1+a^9"), p(&f, "X2+a^6")];
        let known: BTreeMap<Point, FieldElement> = BTreeMap::from([(Point(0, 0), FieldElement::ONE)]);
        assert_eq!(
            complete_array(&f, &basis, &known, TotalOrder::Lex, (5, 5)),
            Err(LocatorError::MissingInitialValue(Point(1, 0)))
        );
    }

    #[test]
    fn solving_binary_and_quaternary() {
        let (f, alpha, e) = five_by_five();
        let tau = Point(1, 1);
        let s = SofT::new(2);
        let idx: Vec<Point> = s.schedule(TotalOrder::Lex).to_vec();
        let u = syndromes(&f, &e, tau, &alpha, idx.iter().copied());
        let support = BTreeSet::from([Point(1, 2), Point(2, 2)]);
        let got = solve_coefficients(&f, &support, &u, tau, &alpha, 2).unwrap();
        assert_eq!(got.poly(), &e);
        let zeros: BTreeMap<Point, FieldElement> = idx.iter().map(|&n| (n, FieldElement::ZERO)).collect();
        let none = solve_coefficients(&f, &BTreeSet::new(), &zeros, tau, &alpha, 2).unwrap();
        assert_eq!(none.weight(), 0);
        // GF(4) inside GF(16) is {0, 1, a^5, a^10}
        let planted = BivariatePolynomial::from_terms(
            &f,
            [(Point(0, 3), f.alpha_pow(5)), (Point(4, 1), f.alpha_pow(10))],
        );
        let u = syndromes(&f, &planted, tau, &alpha, idx.iter().copied());
        let support = planted.support().collect();
        let got = solve_coefficients(&f, &support, &u, tau, &alpha, 4).unwrap();
        assert_eq!(got.poly(), &planted);
        // the wrong support cannot explain the syndromes
        let wrong = BTreeSet::from([Point(1, 1), Point(2, 2)]);
        assert!(solve_coefficients(&f, &wrong, &u, tau, &alpha, 4).is_err());
    }

    #[test]
    fn termination_verdicts() {
        let (f, alpha, e) = five_by_five();
        let tau = Point(1, 1);
        let idx: Vec<Point> = SofT::new(2).schedule(TotalOrder::Lex).to_vec();
        let u = syndromes(&f, &e, tau, &alpha, idx.iter().copied());
        let basis = [p(&f, "X1^2+a^2*X1+a^9"), p(&f, "X2+a^6")];
        let v = termination_check(&f, &basis, &u, tau, &alpha, (5, 5), 2);
        assert!(v.holds);
        assert_eq!(v.candidate.unwrap().poly(), &e);
        let truncated = [p(&f, "X1+a^2"), p(&f, "X2+a^6")];
        assert!(!termination_check(&f, &truncated, &u, tau, &alpha, (5, 5), 2).holds);
        let one = [BivariatePolynomial::one()];
        assert!(!termination_check(&f, &one, &u, tau, &alpha, (5, 5), 2).holds);
    }

    #[test]
    fn syndrome_file_round_trip() {
        let (f, alpha, e) = five_by_five();
        let u = syndromes(
            &f,
            &e,
            Point(1, 1),
            &alpha,
            SofT::new(2).schedule(TotalOrder::Lex).iter().copied(),
        );
        let file = SyndromeFile::new(Point(1, 1), &u);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.starts_with(r#"{"tau":[1,1],"entries":[{"n":[0,0],"v":"a^8"}"#));
        let back: SyndromeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.values(&f).unwrap(), u);
    }
}
