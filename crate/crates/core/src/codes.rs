//! Bivariate abelian codes: q-orbits, defining sets, the S(t) placement
//! search, BCH-bound capability and the locator decoder.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bms::{run, BmsError, RunOutput};
use crate::ff::{gcd, Field, FieldConfig, FieldElement, FieldError};
use crate::locator::{
    grid, solve_coefficients, support_from_basis, AlphaPair, ErrorPolynomial, LocatorError,
};
use crate::order::{Point, SofT, TotalOrder};
use crate::poly::BivariatePolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("gcd(r1 * r2, q) must be 1 (r1 = {r1}, r2 = {r2}, q = {q})")]
    NotCoprime { r1: usize, r2: usize, q: u32 },
    #[error("capability t = {t} exceeds min(r1, r2) / 2 for period {period:?}")]
    CapabilityTooLarge { t: usize, period: (usize, usize) },
    #[error("no translate of S({0}) fits in the defining set")]
    NoTau(usize),
    #[error("tau {tau} does not place S({t}) inside the defining set")]
    BadTau { tau: Point, t: usize },
    #[error("BCH parameters give capability {0}, need at least 1")]
    DegenerateBound(usize),
    #[error("invalid BCH parameters: {0}")]
    BadBchParameters(String),
    #[error("word has shape {got:?}, expected {expected:?}")]
    BadWordShape {
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("the basis has {zeros} common zeros but its delta-set has {delta} points")]
    SupportMismatch { zeros: usize, delta: usize },
    #[error("corrected word is not a codeword: more than {0} errors")]
    NotCodewordAfterCorrection(usize),
    #[error(transparent)]
    Bms(#[from] BmsError),
    #[error(transparent)]
    Locator(#[from] LocatorError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `{(a1 q^i mod r1, a2 q^i mod r2) : i >= 0}`.
pub fn q_orbit(a: Point, q: u32, r1: usize, r2: usize) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    let mut p = a.reduce((r1, r2));
    while out.insert(p) {
        p = Point(p.0 * q as usize % r1, p.1 * q as usize % r2);
    }
    out
}

/// An abelian code in `F_q[X1, X2] / (X1^r1 - 1, X2^r2 - 1)`, given by its
/// defining set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianCode {
    pub r1: usize,
    pub r2: usize,
    pub q: u32,
    pub defining_set: BTreeSet<Point>,
}

impl AbelianCode {
    /// The code whose defining set is the union of the q-orbits of `orbits`.
    pub fn new(r1: usize, r2: usize, q: u32, orbits: &[Point]) -> Result<Self, CodeError> {
        if gcd((r1 * r2) as u32, q) != 1 {
            return Err(CodeError::NotCoprime { r1, r2, q });
        }
        let defining_set = orbits.iter().flat_map(|&a| q_orbit(a, q, r1, r2)).collect();
        Ok(AbelianCode {
            r1,
            r2,
            q,
            defining_set,
        })
    }

    pub fn period(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    /// Whether the defining set is closed under multiplication by `q`.
    pub fn is_closed(&self) -> bool {
        self.defining_set.iter().all(|p| {
            self.defining_set.contains(&Point(
                p.0 * self.q as usize % self.r1,
                p.1 * self.q as usize % self.r2,
            ))
        })
    }

    /// Whether `τ + S(t)`, reduced mod the period, lies in the defining set.
    pub fn contains_translate(&self, tau: Point, t: usize) -> bool {
        SofT::new(t)
            .schedule(TotalOrder::Lex)
            .iter()
            .all(|&n| self.defining_set.contains(&(tau + n).reduce(self.period())))
    }

    /// Distinct q-orbit representatives (smallest point of each orbit) of
    /// the whole grid.
    pub fn orbit_representatives(&self) -> Vec<BTreeSet<Point>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for n in grid(self.period()) {
            if seen.contains(&n) {
                continue;
            }
            let orbit = q_orbit(n, self.q, self.r1, self.r2);
            seen.extend(orbit.iter().copied());
            out.push(orbit);
        }
        out
    }
}

/// First `τ` in row-major order with `τ + S(t)` inside the defining set.
pub fn find_tau(code: &AbelianCode, t: usize) -> Result<Option<Point>, CodeError> {
    if t == 0 || t > code.r1 / 2 || t > code.r2 / 2 {
        return Err(CodeError::CapabilityTooLarge {
            t,
            period: code.period(),
        });
    }
    Ok(grid(code.period()).find(|&tau| code.contains_translate(tau, t)))
}

/// One axis of a bivariate BCH bound: `delta - 1` consecutive values of
/// coordinate `axis` (1 or 2) starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BchAxis {
    pub axis: usize,
    pub delta: usize,
    pub start: usize,
}

fn check_axes(axes: &[BchAxis], period: (usize, usize)) -> Result<(), CodeError> {
    let bad = |s: String| Err(CodeError::BadBchParameters(s));
    if axes.is_empty() || axes.len() > 2 {
        return bad(format!("need one or two axes, got {}", axes.len()));
    }
    if axes.len() == 2 && axes[0].axis == axes[1].axis {
        return bad("repeated axis".into());
    }
    for a in axes {
        let r = match a.axis {
            1 => period.0,
            2 => period.1,
            k => return bad(format!("axis {k} is not 1 or 2")),
        };
        if a.delta < 2 || a.delta > r {
            return bad(format!("delta {} outside 2..={r}", a.delta));
        }
    }
    Ok(())
}

/// Capability and placement guaranteed by the bivariate BCH bound.
pub fn bch_capability(axes: &[BchAxis], period: (usize, usize)) -> Result<(usize, Point), CodeError> {
    check_axes(axes, period)?;
    let cap = period.0.min(period.1) / 2;
    let (t, tau) = match axes {
        [a] => {
            let tau = if a.axis == 1 {
                Point(a.start, 0)
            } else {
                Point(0, a.start)
            };
            (((a.delta - 1) / 2).min(cap), tau)
        }
        [a, b] => {
            let (first, second) = if a.axis == 1 { (a, b) } else { (b, a) };
            ((a.delta + b.delta - 3).min(cap), Point(first.start, second.start))
        }
        _ => unreachable!("checked above"),
    };
    if t < 1 {
        return Err(CodeError::DegenerateBound(t));
    }
    Ok((t, tau.reduce(period)))
}

/// The bivariate BCH code: every q-orbit meeting the consecutive ranges.
pub fn bch_code(q: u32, period: (usize, usize), axes: &[BchAxis]) -> Result<AbelianCode, CodeError> {
    check_axes(axes, period)?;
    let reps: Vec<Point> = grid(period)
        .filter(|n| {
            axes.iter().any(|a| {
                let (coord, r) = if a.axis == 1 {
                    (n.0, period.0)
                } else {
                    (n.1, period.1)
                };
                (0..a.delta - 1).any(|l| (a.start + l) % r == coord)
            })
        })
        .collect();
    AbelianCode::new(period.0, period.1, q, &reps)
}

/// A dense `r1 x r2` coefficient grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    period: (usize, usize),
    cells: Vec<FieldElement>,
}

impl Word {
    pub fn zero(period: (usize, usize)) -> Self {
        Word {
            period,
            cells: vec![FieldElement::ZERO; period.0 * period.1],
        }
    }

    pub fn period(&self) -> (usize, usize) {
        self.period
    }

    pub fn get(&self, m: Point) -> FieldElement {
        let m = m.reduce(self.period);
        self.cells[m.0 * self.period.1 + m.1]
    }

    pub fn set(&mut self, m: Point, v: FieldElement) {
        let m = m.reduce(self.period);
        self.cells[m.0 * self.period.1 + m.1] = v;
    }

    /// Reduces exponents modulo the period.
    pub fn from_poly(field: &Field, f: &BivariatePolynomial, period: (usize, usize)) -> Self {
        let mut w = Word::zero(period);
        for (m, c) in f.terms() {
            w.set(m, field.add(w.get(m), c));
        }
        w
    }

    pub fn to_poly(&self, field: &Field) -> BivariatePolynomial {
        BivariatePolynomial::from_terms(field, grid(self.period).map(|m| (m, self.get(m))))
    }

    pub fn add(&self, field: &Field, other: &Word) -> Word {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(&a, &b)| field.add(a, b))
            .collect();
        Word {
            period: self.period,
            cells,
        }
    }

    pub fn sub(&self, field: &Field, other: &Word) -> Word {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(&a, &b)| field.sub(a, b))
            .collect();
        Word {
            period: self.period,
            cells,
        }
    }

    /// `c(ᾱ^n)`.
    pub fn evaluate(&self, field: &Field, alpha: &AlphaPair, n: Point) -> FieldElement {
        let (x, y) = alpha.power(field, n);
        grid(self.period).fold(FieldElement::ZERO, |acc, m| {
            let c = self.get(m);
            if c.is_zero() {
                return acc;
            }
            let xm = field.pow(x, m.0 as i64).expect("nonzero");
            let ym = field.pow(y, m.1 as i64).expect("nonzero");
            field.add(acc, field.mul(c, field.mul(xm, ym)))
        })
    }

    pub fn is_codeword(&self, field: &Field, alpha: &AlphaPair, code: &AbelianCode) -> bool {
        code.defining_set
            .iter()
            .all(|&n| self.evaluate(field, alpha, n).is_zero())
    }

    /// Rows of `a^k` strings.
    pub fn to_rows(&self) -> Vec<Vec<String>> {
        (0..self.period.0)
            .map(|i| {
                (0..self.period.1)
                    .map(|j| self.get(Point(i, j)).to_string())
                    .collect()
            })
            .collect()
    }

    pub fn from_rows(field: &Field, rows: &[Vec<String>]) -> Result<Self, CodeError> {
        let r1 = rows.len();
        let r2 = rows.first().map_or(0, Vec::len);
        if r1 == 0 || rows.iter().any(|r| r.len() != r2) {
            let got = (r1, rows.iter().map(Vec::len).max().unwrap_or(0));
            return Err(CodeError::BadWordShape {
                got,
                expected: (r1, r2),
            });
        }
        let mut w = Word::zero((r1, r2));
        for (i, row) in rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                w.set(Point(i, j), field.parse_element(s)?);
            }
        }
        Ok(w)
    }
}

/// A codeword from a random spectrum vanishing on the defining set:
/// `c_m = (r1 r2)^-1 Σ_n C_n ᾱ^(-n·m)`, with `C_(qn) = C_n^q` so that the
/// coefficients land in GF(q).
pub fn random_codeword(
    field: &Field,
    alpha: &AlphaPair,
    code: &AbelianCode,
    rng: &mut impl Rng,
) -> Result<Word, CodeError> {
    let mut spectrum: BTreeMap<Point, FieldElement> = BTreeMap::new();
    for orbit in code.orbit_representatives() {
        let rep = *orbit.iter().next().unwrap();
        if code.defining_set.contains(&rep) {
            continue;
        }
        let size = orbit.len() as u32;
        let sub = field.subfield_elements(code.q.pow(size))?;
        let mut c = sub[rng.gen_range(0..sub.len())];
        let mut p = rep;
        for _ in 0..size {
            spectrum.insert(p, c);
            c = field.pow(c, code.q as i64)?;
            p = Point(p.0 * code.q as usize % code.r1, p.1 * code.q as usize % code.r2);
        }
    }
    let n_inv = field.inv(field.from_int((code.r1 * code.r2) as i64))?;
    let group = field.group_order() as i64;
    let log1 = alpha.first.log().expect("nonzero") as i64;
    let log2 = alpha.second.log().expect("nonzero") as i64;
    let mut w = Word::zero(code.period());
    for m in grid(code.period()) {
        let mut acc = FieldElement::ZERO;
        for (n, &c) in &spectrum {
            if c.is_zero() {
                continue;
            }
            let e = -(log1 * (n.0 * m.0) as i64 + log2 * (n.1 * m.1) as i64);
            acc = field.add(acc, field.mul(c, field.alpha_pow(e.rem_euclid(group))));
        }
        w.set(m, field.mul(acc, n_inv));
    }
    Ok(w)
}

/// A random error of exactly `weight` nonzero GF(q) values.
pub fn random_error(
    field: &Field,
    q: u32,
    period: (usize, usize),
    weight: usize,
    rng: &mut impl Rng,
) -> Result<BivariatePolynomial, CodeError> {
    let nonzero = &field.subfield_elements(q)?[1..];
    let points: Vec<Point> = grid(period).collect();
    let chosen = rand::seq::index::sample(rng, points.len(), weight);
    Ok(BivariatePolynomial::from_terms(
        field,
        chosen
            .into_iter()
            .map(|i| (points[i], nonzero[rng.gen_range(0..nonzero.len())])),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutput {
    pub error: ErrorPolynomial,
    pub corrected: Word,
    pub tau: Point,
    pub run: RunOutput,
}

/// Locator decoding of `received` for up to `t` errors.
pub fn decode(
    field: &Field,
    alpha: &AlphaPair,
    code: &AbelianCode,
    received: &Word,
    t: usize,
    order: TotalOrder,
    tau: Option<Point>,
) -> Result<DecodeOutput, CodeError> {
    if received.period() != code.period() {
        return Err(CodeError::BadWordShape {
            got: received.period(),
            expected: code.period(),
        });
    }
    let tau = match tau {
        Some(tau) if code.contains_translate(tau, t) => tau,
        Some(tau) => return Err(CodeError::BadTau { tau, t }),
        None => find_tau(code, t)?.ok_or(CodeError::NoTau(t))?,
    };
    let s = SofT::new(t);
    let syndromes: BTreeMap<Point, FieldElement> = s
        .schedule(TotalOrder::Lex)
        .iter()
        .map(|&n| (n, received.evaluate(field, alpha, tau + n)))
        .collect();
    let out = run(field, &syndromes, order, t, code.period())?;
    let support = support_from_basis(field, &out.basis, alpha, code.period());
    if support.len() != out.delta.len() {
        return Err(CodeError::SupportMismatch {
            zeros: support.len(),
            delta: out.delta.len(),
        });
    }
    let error = solve_coefficients(field, &support, &syndromes, tau, alpha, code.q)?;
    let corrected = received.sub(field, &Word::from_poly(field, error.poly(), code.period()));
    if error.weight() > t || !corrected.is_codeword(field, alpha, code) {
        return Err(CodeError::NotCodewordAfterCorrection(t));
    }
    Ok(DecodeOutput {
        error,
        corrected,
        tau,
        run: out,
    })
}

/// On-disk code description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeConfig {
    pub r1: usize,
    pub r2: usize,
    pub q: u32,
    pub field: FieldConfig,
    pub orbits: Vec<Point>,
}

impl CodeConfig {
    pub fn build(&self) -> Result<(Field, AbelianCode), CodeError> {
        let field = self.field.build()?;
        let code = AbelianCode::new(self.r1, self.r2, self.q, &self.orbits)?;
        Ok((field, code))
    }
}

/// The code of the worked example in `F_2(5, 15)`.
pub fn example_code() -> AbelianCode {
    let orbits = [
        Point(0, 1),
        Point(1, 1),
        Point(2, 1),
        Point(3, 1),
        Point(4, 1),
        Point(2, 3),
    ];
    AbelianCode::new(5, 15, 2, &orbits).expect("coprime")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::gf16;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orbits() {
        assert_eq!(q_orbit(Point(0, 0), 2, 5, 15), BTreeSet::from([Point(0, 0)]));
        assert_eq!(
            q_orbit(Point(0, 1), 2, 5, 15),
            BTreeSet::from([Point(0, 1), Point(0, 2), Point(0, 4), Point(0, 8)])
        );
        assert_eq!(
            q_orbit(Point(2, 3), 2, 5, 15),
            BTreeSet::from([Point(2, 3), Point(4, 6), Point(3, 12), Point(1, 9)])
        );
    }

    #[test]
    fn code_construction() {
        let code = example_code();
        assert!(code.is_closed());
        assert!(AbelianCode::new(5, 15, 2, &[]).unwrap().defining_set.is_empty());
        assert_eq!(
            AbelianCode::new(5, 5, 2, &[Point(0, 0)])
                .unwrap()
                .defining_set
                .len(),
            1
        );
        assert!(matches!(
            AbelianCode::new(4, 5, 2, &[]),
            Err(CodeError::NotCoprime { .. })
        ));
    }

    #[test]
    fn tau_search() {
        let code = example_code();
        let tau = find_tau(&code, 2).unwrap().unwrap();
        assert!(code.contains_translate(tau, 2));
        assert!(code.contains_translate(Point(2, 1), 2));
        let all = AbelianCode::new(3, 3, 2, &grid((3, 3)).collect::<Vec<_>>()).unwrap();
        assert_eq!(find_tau(&all, 1).unwrap(), Some(Point(0, 0)));
        let none = AbelianCode::new(3, 3, 2, &[]).unwrap();
        assert_eq!(find_tau(&none, 1).unwrap(), None);
        assert!(matches!(
            find_tau(&code, 3),
            Err(CodeError::CapabilityTooLarge { .. })
        ));
    }

    #[test]
    fn bch_bounds() {
        let one = [BchAxis {
            axis: 1,
            delta: 5,
            start: 0,
        }];
        assert_eq!(bch_capability(&one, (15, 15)).unwrap(), (2, Point(0, 0)));
        let two = [
            BchAxis {
                axis: 1,
                delta: 3,
                start: 1,
            },
            BchAxis {
                axis: 2,
                delta: 3,
                start: 2,
            },
        ];
        assert_eq!(bch_capability(&two, (15, 15)).unwrap(), (3, Point(1, 2)));
        let degenerate = [BchAxis {
            axis: 1,
            delta: 2,
            start: 0,
        }];
        assert_eq!(
            bch_capability(&degenerate, (15, 15)),
            Err(CodeError::DegenerateBound(0))
        );
        for axes in [&one[..], &two[..]] {
            let (t, tau) = bch_capability(axes, (15, 15)).unwrap();
            let code = bch_code(2, (15, 15), axes).unwrap();
            assert!(code.contains_translate(tau, t));
        }
    }

    #[test]
    fn codewords_and_decoding() {
        let f = gf16();
        let alpha = AlphaPair::for_period(&f, (5, 15)).unwrap();
        let code = example_code();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let c = random_codeword(&f, &alpha, &code, &mut rng).unwrap();
            assert!(c.is_codeword(&f, &alpha, &code));
            assert!(grid((5, 15)).all(|m| f.in_base_field(c.get(m), 2).unwrap()));
            let e = BivariatePolynomial::parse(&f, "X2^2+X1*X2^3").unwrap();
            let received = c.add(&f, &Word::from_poly(&f, &e, (5, 15)));
            let out = decode(
                &f,
                &alpha,
                &code,
                &received,
                2,
                TotalOrder::Lex,
                Some(Point(2, 1)),
            )
            .unwrap();
            assert_eq!(out.error.poly(), &e);
            assert_eq!(out.corrected, c);
            let clean = decode(&f, &alpha, &code, &c, 2, TotalOrder::Graded, None).unwrap();
            assert_eq!(clean.error.weight(), 0);
        }
    }

    #[test]
    fn word_rows_round_trip() {
        let f = gf16();
        let e = BivariatePolynomial::parse(&f, "X2^2+a^5*X1*X2^3").unwrap();
        let w = Word::from_poly(&f, &e, (5, 15));
        let back = Word::from_rows(&f, &w.to_rows()).unwrap();
        assert_eq!(back, w);
        assert_eq!(back.to_poly(&f), e);
    }
}
