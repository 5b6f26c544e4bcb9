//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use bms_core::bms::BmsState;
use bms_core::codes::random_error;
use bms_core::ff::{Field, FieldElement};
use bms_core::locator::{syndrome_table, AlphaPair, PeriodicArray};
use bms_core::order::{Point, TotalOrder};
use bms_core::poly::{BivariatePolynomial, Recurrence};
use rand::Rng;

pub fn p(field: &Field, s: &str) -> BivariatePolynomial {
    BivariatePolynomial::parse(field, s).unwrap()
}

/// All points of total degree at most `max_degree`, in graded order. Every
/// graded predecessor of a listed point is listed too, so a run over this
/// schedule sees the whole subarray `u^l` at each step.
pub fn graded_region(max_degree: usize) -> Vec<Point> {
    let mut pts: Vec<Point> = (0..=max_degree)
        .flat_map(|d| (0..=d).map(move |i| Point(i, d - i)))
        .collect();
    TotalOrder::Graded.sort(&mut pts);
    pts
}

pub fn value_at(
    field: &Field,
    f: &BivariatePolynomial,
    u: &PeriodicArray,
    n: Point,
    order: TotalOrder,
) -> FieldElement {
    match f.recurrence_value(field, u, n, order).unwrap() {
        Recurrence::Value(v) => v,
        Recurrence::NeedsIndex(m) => panic!("complete array lacks {m}"),
    }
}

/// `f[u]_n = 0` for every listed `n` before `l`.
pub fn valid_before(
    field: &Field,
    f: &BivariatePolynomial,
    u: &PeriodicArray,
    region: &[Point],
    l: Point,
    order: TotalOrder,
) -> bool {
    region
        .iter()
        .take_while(|&&n| n != l)
        .all(|&n| value_at(field, f, u, n, order).is_zero())
}

fn monic(field: &Field, f: &BivariatePolynomial, order: TotalOrder) -> BivariatePolynomial {
    let c = field.inv(f.leading_coeff(order).unwrap()).unwrap();
    f.scale(field, c)
}

/// Syndrome table of a random GF(q) error of weight at most `max_weight`.
pub fn random_array(
    field: &Field,
    period: (usize, usize),
    q: u32,
    max_weight: usize,
    rng: &mut impl Rng,
) -> (BivariatePolynomial, Point, PeriodicArray) {
    let alpha = AlphaPair::for_period(field, period).unwrap();
    let weight = rng.gen_range(0..=max_weight);
    let e = random_error(field, q, period, weight, rng).unwrap();
    let tau = Point(rng.gen_range(0..period.0), rng.gen_range(0..period.1));
    let u = syndrome_table(field, &e, tau, &alpha, period);
    (e, tau, u)
}

#[derive(Debug, Default)]
pub struct Tally {
    pub steps: usize,
    pub agreement_pairs: usize,
    pub violations: Vec<String>,
}

/// Runs the iteration over a graded region of `u` and checks at each step:
/// every basis member is valid on the subarray before `l`; monic valid
/// polynomials `f`, `g` with `LP(f) + LP(g) ⪯ l` have equal values at `l`;
/// each failing member with leading point `s ⪯ l` puts `l - s` into the
/// next delta-set; the delta-set never shrinks.
pub fn check_graded_run(
    field: &Field,
    u: &PeriodicArray,
    max_degree: usize,
    rng: &mut impl Rng,
    tally: &mut Tally,
) {
    let order = TotalOrder::Graded;
    let region = graded_region(max_degree);
    let mut state = BmsState::new(order, None);
    for &l in &region {
        tally.steps += 1;
        let basis = state.basis().to_vec();
        for f in &basis {
            if !valid_before(field, f, u, &region, l, order) {
                tally
                    .violations
                    .push(format!("{} invalid before {l}", f.to_text(order)));
            }
        }

        // valid candidates: monomial multiples and shifted sums of members
        let mut candidates: Vec<BivariatePolynomial> = Vec::new();
        for f in &basis {
            let s = f.leading_point(order).unwrap();
            for a in [Point(0, 0), Point(1, 0), Point(0, 1)] {
                if (s + a).preceq(l) {
                    candidates.push(f.shift(a));
                }
            }
        }
        let n = candidates.len();
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let (f, g) = (&candidates[i], &candidates[j]);
            let (sf, sg) = (f.leading_point(order).unwrap(), g.leading_point(order).unwrap());
            if order.less(sg, sf) {
                let c = field.alpha_pow(rng.gen_range(0..field.group_order() as i64));
                candidates.push(f.add_scaled_shift(field, c, Point(0, 0), g));
            }
        }
        for (i, f) in candidates.iter().enumerate() {
            for g in &candidates[i..] {
                let sum = f.leading_point(order).unwrap() + g.leading_point(order).unwrap();
                if !sum.preceq(l) {
                    continue;
                }
                tally.agreement_pairs += 1;
                let vf = value_at(field, &monic(field, f, order), u, l, order);
                let vg = value_at(field, &monic(field, g, order), u, l, order);
                if vf != vg {
                    tally.violations.push(format!(
                        "agreement at {l}: {} gives {}, {} gives {}",
                        f.to_text(order),
                        field.format_element(vf),
                        g.to_text(order),
                        field.format_element(vg)
                    ));
                }
            }
        }

        let before = state.clone();
        let w = state.clone().discrepancies(field, u, l).unwrap();
        if let Err(e) = state.step(field, u, l) {
            tally.violations.push(format!("step {l}: {e}"));
            return;
        }
        check_transition(&before, &w, l, &state, tally);
    }
}

/// Sakata-Massey and monotonicity across one step.
pub fn check_transition(
    before: &BmsState,
    w: &[FieldElement],
    l: Point,
    after: &BmsState,
    tally: &mut Tally,
) {
    if !before.delta().is_subset(after.delta()) {
        tally.violations.push(format!("delta shrank at {l}"));
    }
    for (s, v) in before.leading_points().into_iter().zip(w) {
        if v.is_zero() {
            continue;
        }
        if let Some(span) = l.checked_sub(s) {
            if !after.delta().contains(span) {
                tally
                    .violations
                    .push(format!("{l} - {s} = {span} missing from the next delta-set"));
            }
        }
    }
}

/// Steps through `schedule` on partially known values, checking
/// Sakata-Massey and monotonicity at every step.
pub fn check_schedule_run(
    field: &Field,
    values: &impl bms_core::poly::ArrayView,
    schedule: &[Point],
    order: TotalOrder,
    capability: Option<usize>,
    tally: &mut Tally,
) {
    let mut state = BmsState::new(order, capability);
    for &l in schedule {
        tally.steps += 1;
        let before = state.clone();
        let w = state.clone().discrepancies(field, values, l).unwrap();
        if let Err(e) = state.step(field, values, l) {
            tally.violations.push(format!("step {l}: {e}"));
            return;
        }
        check_transition(&before, &w, l, &state, tally);
    }
}
