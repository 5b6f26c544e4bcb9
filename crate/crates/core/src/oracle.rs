//! Brute-force references: footprints by dense linear algebra, full-period
//! validity, and exhaustive uniqueness sweeps. Deliberately slow and simple.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bms::run;
use crate::codes::{random_error, CodeError};
use crate::ff::{Field, FieldElement, FieldError};
use crate::locator::{
    grid, solve_coefficients, support_from_basis, syndrome_table, AlphaPair, PeriodicArray,
};
use crate::order::{condition_check, ConditionKind, DeltaSet, Point, SofT, TotalOrder};
use crate::poly::{BivariatePolynomial, Recurrence};

/// Largest number of polynomial pairs an exhaustive sweep will compare.
pub const MAX_PAIRS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{pairs} pairs exceed the sweep limit of {MAX_PAIRS}")]
    SpaceTooLarge { pairs: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintResult {
    pub delta: DeltaSet,
    /// One polynomial per defining point, leading coefficient 1, other
    /// terms inside `delta`.
    pub reduced_basis: Vec<BivariatePolynomial>,
}

/// Computes the footprint of the relation ideal of a fully known array.
///
/// `X^m` is a leading monomial of a valid relation exactly when the shifted
/// column `(u_(m+n))_n` is a combination of the columns of smaller
/// monomials, so columns are scanned in increasing order.
pub fn footprint_bruteforce(field: &Field, u: &PeriodicArray, order: TotalOrder) -> FootprintResult {
    let (r1, r2) = u.period();
    let positions: Vec<Point> = grid((r1, r2)).collect();
    let mut candidates: Vec<Point> = (0..=r1)
        .flat_map(|i| (0..=r2).map(move |j| Point(i, j)))
        .collect();
    order.sort(&mut candidates);

    // echelon rows: (vector, pivot, combination over delta members)
    let mut echelon: Vec<(Vec<FieldElement>, usize, Vec<FieldElement>)> = Vec::new();
    let mut members: Vec<Point> = Vec::new();
    let mut leads: Vec<(Point, BivariatePolynomial)> = Vec::new();

    for m in candidates {
        let mut v: Vec<FieldElement> = positions
            .iter()
            .map(|&n| u.get(m + n).expect("array is complete"))
            .collect();
        let mut combo = vec![FieldElement::ZERO; members.len()];
        for (b, p, t) in &echelon {
            let k = v[*p];
            if k.is_zero() {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(b) {
                *x = field.sub(*x, field.mul(k, y));
            }
            for (x, &y) in combo.iter_mut().zip(t) {
                *x = field.add(*x, field.mul(k, y));
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                // v = col_m - Σ combo_j col_j becomes a new echelon row
                let inv = field.inv(v[p]).expect("pivot is nonzero");
                let b = v.iter().map(|&x| field.mul(x, inv)).collect();
                let mut t: Vec<FieldElement> = combo.iter().map(|&c| field.neg(field.mul(c, inv))).collect();
                t.push(inv);
                for row in echelon.iter_mut() {
                    row.2.push(FieldElement::ZERO);
                }
                echelon.push((b, p, t));
                members.push(m);
            }
            None => {
                if leads.iter().any(|(s, _)| s.preceq(m)) {
                    continue;
                }
                let terms = std::iter::once((m, FieldElement::ONE))
                    .chain(members.iter().zip(&combo).map(|(&d, &c)| (d, field.neg(c))));
                leads.push((m, BivariatePolynomial::from_terms(field, terms)));
            }
        }
    }
    let delta = DeltaSet::from_members(members).expect("footprint is a staircase");
    let mut reduced_basis = Vec::new();
    for &s in delta.defining_points() {
        let f = leads
            .iter()
            .find(|(l, _)| *l == s)
            .map(|(_, f)| f.clone())
            .expect("every defining point is a leading point");
        reduced_basis.push(f);
    }
    FootprintResult { delta, reduced_basis }
}

/// Whether `f[U]_n = 0` for all `n` in `LP(f) + [0, r1) x [0, r2)`.
pub fn membership_full(field: &Field, f: &BivariatePolynomial, u: &PeriodicArray, order: TotalOrder) -> bool {
    let Ok(s) = f.leading_point(order) else {
        return true;
    };
    grid(u.period()).all(|n| {
        matches!(
            f.recurrence_value(field, u, s + n, order),
            Ok(Recurrence::Value(v)) if v.is_zero()
        )
    })
}

/// Outcome of an exhaustive sweep.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every polynomial over GF(q) supported on the grid with at most `t` terms.
pub fn low_weight_polynomials(
    field: &Field,
    period: (usize, usize),
    q: u32,
    t: usize,
) -> Result<Vec<BivariatePolynomial>, FieldError> {
    let nonzero: Vec<FieldElement> = field.subfield_elements(q)?[1..].to_vec();
    let points: Vec<Point> = grid(period).collect();
    let mut out = vec![BivariatePolynomial::zero()];
    let mut frontier: Vec<(usize, BivariatePolynomial)> = vec![(0, BivariatePolynomial::zero())];
    for _ in 0..t {
        let mut next = Vec::new();
        for (start, f) in &frontier {
            for (i, &m) in points.iter().enumerate().skip(*start) {
                for &c in &nonzero {
                    let g = f.add(field, &BivariatePolynomial::monomial(c, m));
                    next.push((i + 1, g));
                }
            }
        }
        out.extend(next.iter().map(|(_, g)| g.clone()));
        frontier = next;
    }
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Checks that distinct errors of weight at most `t` never share their
/// syndromes on `τ + S(t)`, for every `τ`, and that each error's syndrome
/// table has a footprint of size equal to its weight.
pub fn exhaustive_uniqueness(
    field: &Field,
    period: (usize, usize),
    q: u32,
    t: usize,
) -> Result<Report, OracleError> {
    let n = (period.0 * period.1) as u64;
    let count: u64 = (0..=t as u64)
        .map(|w| binomial(n, w).saturating_mul((q as u64 - 1).saturating_pow(w as u32)))
        .fold(0u64, u64::saturating_add);
    let pairs = count.saturating_mul(count.saturating_sub(1)) / 2;
    if pairs > MAX_PAIRS {
        return Err(OracleError::SpaceTooLarge { pairs });
    }
    let polys = low_weight_polynomials(field, period, q, t)?;
    let mut report = Report {
        checked: polys.len(),
        failures: Vec::new(),
    };
    if t == 0 {
        return Ok(report);
    }
    let alpha = AlphaPair::for_period(field, period)?;
    let indices: Vec<Point> = SofT::new(t).schedule(TotalOrder::Lex).to_vec();
    for tau in grid(period) {
        let mut seen: HashMap<Vec<FieldElement>, usize> = HashMap::with_capacity(polys.len());
        for (i, e) in polys.iter().enumerate() {
            let key: Vec<FieldElement> = indices
                .iter()
                .map(|&m| e.evaluate(field, alpha.power(field, tau + m)))
                .collect();
            if let Some(&j) = seen.get(&key) {
                report.failures.push(format!(
                    "tau {tau}: {} and {} share all syndromes",
                    polys[j].to_text(TotalOrder::Lex),
                    e.to_text(TotalOrder::Lex)
                ));
            } else {
                seen.insert(key, i);
            }
        }
    }
    for e in &polys {
        let u = syndrome_table(field, e, Point::ORIGIN, &alpha, period);
        let fp = footprint_bruteforce(field, &u, TotalOrder::Lex);
        if fp.delta.len() != e.weight() {
            report.failures.push(format!(
                "{}: footprint has {} points",
                e.to_text(TotalOrder::Lex),
                fp.delta.len()
            ));
        }
    }
    Ok(report)
}

/// Plants random errors of weight at most `t`, runs the iteration on their
/// `S(t)` syndromes in both orders, and compares against the brute-force
/// footprint, full-period validity and the planted error.
///
/// Offsets `τ` are drawn uniformly; when `require_condition` is set, draws
/// violating the order's start condition are redrawn.
pub fn equivalence_sweep(
    field: &Field,
    period: (usize, usize),
    q: u32,
    t: usize,
    trials: usize,
    require_condition: bool,
    rng: &mut impl Rng,
) -> Result<Report, OracleError> {
    let alpha = AlphaPair::for_period(field, period)?;
    let s = SofT::new(t);
    let mut report = Report::default();
    for _ in 0..trials {
        let weight = rng.gen_range(0..=t);
        let e = random_error(field, q, period, weight, rng)?;
        for order in [TotalOrder::Lex, TotalOrder::Graded] {
            let (tau, full) = loop {
                let tau = Point(rng.gen_range(0..period.0), rng.gen_range(0..period.1));
                let full = syndrome_table(field, &e, tau, &alpha, period);
                let holds = condition_check(|n| full.get(n), t, ConditionKind::for_order(order));
                if holds || !require_condition || e.is_zero() {
                    break (tau, full);
                }
            };
            report.checked += 1;
            let label = format!("{order} e={} tau={tau}", e.to_text(TotalOrder::Lex));
            let values: BTreeMap<Point, FieldElement> = s
                .schedule(order)
                .iter()
                .map(|&n| (n, full.get(n).expect("complete")))
                .collect();
            let out = match run(field, &values, order, t, period) {
                Ok(out) => out,
                Err(err) => {
                    report.failures.push(format!("{label}: {err}"));
                    continue;
                }
            };
            let fp = footprint_bruteforce(field, &full, order);
            if fp.delta != out.delta {
                report
                    .failures
                    .push(format!("{label}: delta differs from footprint"));
            }
            if let Some(f) = out
                .basis
                .iter()
                .find(|f| !membership_full(field, f, &full, order))
            {
                report.failures.push(format!(
                    "{label}: {} is not valid on the period",
                    f.to_text(order)
                ));
            }
            let support = support_from_basis(field, &out.basis, &alpha, period);
            match solve_coefficients(field, &support, &values, tau, &alpha, q) {
                Ok(found) if found.poly() == &e => {}
                Ok(found) => report.failures.push(format!(
                    "{label}: recovered {}",
                    found.poly().to_text(TotalOrder::Lex)
                )),
                Err(err) => report.failures.push(format!("{label}: {err}")),
            }
        }
    }
    Ok(report)
}


#[cfg(test)]
mod sweep_tests {
    use super::*;
    use crate::ff::{gf16, gf4096};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn short_sweeps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = equivalence_sweep(&gf16(), (5, 5), 2, 2, 20, false, &mut rng).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = equivalence_sweep(&gf4096(), (5, 7), 2, 2, 10, false, &mut rng).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}
