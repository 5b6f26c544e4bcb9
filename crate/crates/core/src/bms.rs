//! The Berlekamp-Massey-Sakata iteration restricted to the index set S(t).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{Field, FieldElement};
use crate::order::{condition_check, ConditionKind, DeltaSet, Point, SofT, TotalOrder};
use crate::poly::{ArrayView, BivariatePolynomial, PolyError, Recurrence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BmsError {
    #[error("delta-set grew to {size} points, more than the capability {t}")]
    CapabilityExceeded { size: usize, t: usize },
    #[error("no auxiliary polynomial gives a nonnegative shift for defining point {target} at {l}")]
    NegativeShift { target: Point, l: Point },
    #[error("term {term} of {poly} has no reducer in the basis")]
    IrreducibleTerm { poly: String, term: Point },
    #[error("no auxiliary polynomial spans corner {0}")]
    MissingAuxiliary(Point),
    #[error("missing syndrome value at {0}")]
    MissingValue(Point),
    #[error("capability t = {t} must satisfy 1 <= t <= min(r1, r2) / 2 for period {period:?}")]
    BadCapability { t: usize, period: (usize, usize) },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A polynomial that failed at `k` with discrepancy `v`, kept to cancel
/// later discrepancies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxEntry {
    pub g: BivariatePolynomial,
    pub k: Point,
    pub v: FieldElement,
    /// `k - LP(g)`
    pub span: Point,
}

/// How a new defining point is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    /// Old defining point whose polynomial did not fail.
    Kept,
    /// Old defining point whose polynomial failed, repaired in place.
    Type1,
    /// New point not sharing a coordinate with its source point.
    Type2,
    /// New point on the same row as its source point.
    Type3,
    /// New point on the same column as its source point.
    Type4,
    /// New point that is not below `l`; a monomial multiple suffices.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prescription {
    Keep {
        f: usize,
    },
    /// `X^by * f`
    Shift {
        f: usize,
        by: Point,
    },
    /// `X^(target - s) f - (w / v) X^(target - l + span) g`
    Combine {
        f: usize,
        aux: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classified {
    pub kind: PointKind,
    pub point: Point,
    pub prescription: Prescription,
}

/// State after processing the array up to (but excluding) `cursor`'s successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmsState {
    order: TotalOrder,
    capability: Option<usize>,
    basis: Vec<BivariatePolynomial>,
    aux: Vec<AuxEntry>,
    delta: DeltaSet,
    cursor: Option<Point>,
}

/// One row of a trace: the state right after processing `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub l: Point,
    pub basis: Vec<BivariatePolynomial>,
    pub aux: Vec<BivariatePolynomial>,
    pub delta: Vec<Point>,
}

/// Serialized form of a [`TraceRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub l: Point,
    #[serde(rename = "F")]
    pub basis: Vec<String>,
    #[serde(rename = "G")]
    pub aux: Vec<String>,
    pub delta: Vec<Point>,
}

impl TraceRecord {
    pub fn row(&self, order: TotalOrder) -> TraceRow {
        TraceRow {
            l: self.l,
            basis: self.basis.iter().map(|f| f.to_text(order)).collect(),
            aux: self.aux.iter().map(|g| g.to_text(order)).collect(),
            delta: self.delta.clone(),
        }
    }
}

fn braced<T>(items: &[T], show: impl Fn(&T) -> String) -> String {
    let inner: Vec<String> = items.iter().map(show).collect();
    format!("{{{}}}", inner.join(","))
}

/// Human-readable trace, one line per visited index.
pub fn format_table(trace: &[TraceRecord], order: TotalOrder) -> String {
    let mut out = String::from("l F G Delta\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{}→ {} {} {}",
            r.l,
            braced(&r.basis, |f| f.to_text(order)),
            braced(&r.aux, |g| g.to_text(order)),
            braced(&r.delta, |p| p.to_string()),
        );
    }
    out
}

/// Result of a full run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    /// Normal-form basis, ordered by decreasing first coordinate of the leading point.
    pub basis: Vec<BivariatePolynomial>,
    pub delta: DeltaSet,
    pub trace: Vec<TraceRecord>,
    /// False when the l-condition (lex) or g-condition (graded) fails; the
    /// run still proceeds.
    pub condition_holds: bool,
}

/// `f[u]_l`, or `None` when a needed index is unknown.
pub fn discrepancy(
    field: &Field,
    f: &BivariatePolynomial,
    u: &impl ArrayView,
    l: Point,
    order: TotalOrder,
) -> Result<Option<FieldElement>, BmsError> {
    Ok(match f.recurrence_value(field, u, l, order)? {
        Recurrence::Value(v) => Some(v),
        Recurrence::NeedsIndex(_) => None,
    })
}

/// General two-polynomial update. With `f` failing at `l` by `w` and the
/// auxiliary entry failing at `k < l`, returns the polynomial with leading
/// point `r = max(LP(f), l - span)` that is valid through `l`.
pub fn berlekamp_combine(
    field: &Field,
    order: TotalOrder,
    f: &BivariatePolynomial,
    w: FieldElement,
    l: Point,
    aux: &AuxEntry,
) -> Result<BivariatePolynomial, BmsError> {
    let s = f.leading_point(order)?;
    let r = Point(
        s.0.max(l.0.saturating_sub(aux.span.0)),
        s.1.max(l.1.saturating_sub(aux.span.1)),
    );
    combine_at(field, order, f, w, l, aux, r)
}

/// Like [`berlekamp_combine`] but aims at a chosen leading point `target`,
/// which must dominate both `LP(f)` and `l - span`.
pub fn combine_at(
    field: &Field,
    order: TotalOrder,
    f: &BivariatePolynomial,
    w: FieldElement,
    l: Point,
    aux: &AuxEntry,
    target: Point,
) -> Result<BivariatePolynomial, BmsError> {
    let negative = || BmsError::NegativeShift { target, l };
    let s = f.leading_point(order)?;
    let shift = target.checked_sub(s).ok_or_else(negative)?;
    let aux_shift = (target + aux.span).checked_sub(l).ok_or_else(negative)?;
    let ratio = field.div(w, aux.v).expect("auxiliary discrepancy is nonzero");
    Ok(f.shift(shift)
        .add_scaled_shift(field, field.neg(ratio), aux_shift, &aux.g))
}

/// Reduces every non-leading term outside `delta` using earlier-listed
/// reducers from `basis`.
pub fn normal_form(
    field: &Field,
    basis: &[BivariatePolynomial],
    delta: &DeltaSet,
    order: TotalOrder,
) -> Result<Vec<BivariatePolynomial>, BmsError> {
    let leads: Vec<Point> = basis
        .iter()
        .map(|f| f.leading_point(order))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(basis.len());
    for (f, &lead) in basis.iter().zip(&leads) {
        let mut f = f.clone();
        loop {
            let outside = order.max(f.support().filter(|&m| m != lead && !delta.contains(m)));
            let Some(m) = outside else { break };
            let Some(j) = leads.iter().position(|&s| s.preceq(m)) else {
                return Err(BmsError::IrreducibleTerm {
                    poly: f.to_text(order),
                    term: m,
                });
            };
            let g = &basis[j];
            let c = field
                .div(f.coeff(m), g.coeff(leads[j]))
                .expect("leading coefficient is nonzero");
            f = f.add_scaled_shift(field, field.neg(c), m.checked_sub(leads[j]).unwrap(), g);
        }
        out.push(f);
    }
    Ok(out)
}

impl BmsState {
    /// `F = {1}`, `G = ∅`, `Δ = ∅`. A capability of `None` disables the size check.
    pub fn new(order: TotalOrder, capability: Option<usize>) -> Self {
        BmsState {
            order,
            capability,
            basis: vec![BivariatePolynomial::one()],
            aux: Vec::new(),
            delta: DeltaSet::empty(),
            cursor: None,
        }
    }

    pub fn order(&self) -> TotalOrder {
        self.order
    }

    pub fn basis(&self) -> &[BivariatePolynomial] {
        &self.basis
    }

    pub fn aux(&self) -> &[AuxEntry] {
        &self.aux
    }

    pub fn delta(&self) -> &DeltaSet {
        &self.delta
    }

    /// Last processed index.
    pub fn cursor(&self) -> Option<Point> {
        self.cursor
    }

    pub fn leading_points(&self) -> Vec<Point> {
        self.delta.defining_points().to_vec()
    }

    pub fn record(&self, l: Point) -> TraceRecord {
        TraceRecord {
            l,
            basis: self.basis.clone(),
            aux: self.aux.iter().map(|a| a.g.clone()).collect(),
            delta: self.delta.members().iter().copied().collect(),
        }
    }

    /// Rewrites the basis in normal form relative to the current delta-set.
    pub fn normalize(&mut self, field: &Field) -> Result<(), BmsError> {
        self.basis = normal_form(field, &self.basis, &self.delta, self.order)?;
        Ok(())
    }

    /// Discrepancies of every basis member at `l`. If an index is unknown the
    /// basis is brought to normal form and the sum retried; an index that is
    /// still unknown lies outside the known region and counts as zero.
    pub fn discrepancies(
        &mut self,
        field: &Field,
        u: &impl ArrayView,
        l: Point,
    ) -> Result<Vec<FieldElement>, BmsError> {
        let first: Vec<Option<FieldElement>> = self
            .basis
            .iter()
            .map(|f| discrepancy(field, f, u, l, self.order))
            .collect::<Result<_, _>>()?;
        if first.iter().all(Option::is_some) {
            return Ok(first.into_iter().flatten().collect());
        }
        self.normalize(field)?;
        self.basis
            .iter()
            .map(|f| Ok(discrepancy(field, f, u, l, self.order)?.unwrap_or(FieldElement::ZERO)))
            .collect()
    }

    /// The delta-set after a step at `l` where the members flagged in
    /// `failing` have nonzero discrepancy.
    pub fn grown_delta(&self, l: Point, failing: &[bool]) -> DeltaSet {
        let mut delta = self.delta.clone();
        for (s, _) in self.leading_points().into_iter().zip(failing).filter(|(_, &b)| b) {
            if let Some(span) = l.checked_sub(s) {
                delta = delta.with_rectangle(span);
            }
        }
        delta
    }

    /// How each defining point of `next` gets its polynomial.
    pub fn classify(&self, l: Point, failing: &[bool], next: &DeltaSet) -> Result<Vec<Classified>, BmsError> {
        let old = self.leading_points();
        let first_aux = |target: Point| {
            let need = l.checked_sub(target)?;
            self.aux.iter().position(|a| need.preceq(a.span))
        };
        let mut out = Vec::new();
        for &point in next.defining_points() {
            if let Some(i) = old.iter().position(|&s| s == point) {
                let classified = if !failing[i] {
                    Classified {
                        kind: PointKind::Kept,
                        point,
                        prescription: Prescription::Keep { f: i },
                    }
                } else {
                    let aux = first_aux(point).ok_or(BmsError::NegativeShift { target: point, l })?;
                    Classified {
                        kind: PointKind::Type1,
                        point,
                        prescription: Prescription::Combine { f: i, aux },
                    }
                };
                out.push(classified);
                continue;
            }
            // candidate sources: same row first, then same column, then any
            let mut sources: Vec<usize> = (0..old.len()).filter(|&i| old[i].preceq(point)).collect();
            sources.sort_by_key(|&i| (old[i].1 != point.1, old[i].0 != point.0, i));
            let kind_of = |i: usize| {
                if !point.preceq(l) {
                    PointKind::Boundary
                } else if old[i].1 == point.1 {
                    PointKind::Type3
                } else if old[i].0 == point.0 {
                    PointKind::Type4
                } else {
                    PointKind::Type2
                }
            };
            let mut found = None;
            for &i in &sources {
                let shift = point.checked_sub(old[i]).unwrap();
                if !point.preceq(l) || !failing[i] {
                    found = Some(Classified {
                        kind: kind_of(i),
                        point,
                        prescription: Prescription::Shift { f: i, by: shift },
                    });
                    break;
                }
                if let Some(aux) = first_aux(point) {
                    found = Some(Classified {
                        kind: kind_of(i),
                        point,
                        prescription: Prescription::Combine { f: i, aux },
                    });
                    break;
                }
            }
            out.push(found.ok_or(BmsError::NegativeShift { target: point, l })?);
        }
        Ok(out)
    }

    /// Processes index `l` and returns the resulting trace row.
    pub fn step(&mut self, field: &Field, u: &impl ArrayView, l: Point) -> Result<TraceRecord, BmsError> {
        let w = self.discrepancies(field, u, l)?;
        self.cursor = Some(l);
        let failing: Vec<bool> = w.iter().map(|v| !v.is_zero()).collect();
        if !failing.contains(&true) {
            return Ok(self.record(l));
        }
        let next = self.grown_delta(l, &failing);
        if let Some(t) = self.capability {
            if next.len() > t {
                return Err(BmsError::CapabilityExceeded { size: next.len(), t });
            }
        }
        let plan = self.classify(l, &failing, &next)?;
        let mut basis = Vec::with_capacity(plan.len());
        for c in &plan {
            let h = match c.prescription {
                Prescription::Keep { f } => self.basis[f].clone(),
                Prescription::Shift { f, by } => self.basis[f].shift(by),
                Prescription::Combine { f, aux } => combine_at(
                    field,
                    self.order,
                    &self.basis[f],
                    w[f],
                    l,
                    &self.aux[aux],
                    c.point,
                )?,
            };
            basis.push(h);
        }
        self.aux = self.next_aux(l, &w, &next)?;
        self.basis = basis;
        self.delta = next;
        Ok(self.record(l))
    }

    /// One auxiliary entry per corner of `next`: an old entry with exactly
    /// that span if there is one, otherwise a member that just failed.
    fn next_aux(&self, l: Point, w: &[FieldElement], next: &DeltaSet) -> Result<Vec<AuxEntry>, BmsError> {
        let failed: Vec<AuxEntry> = self
            .leading_points()
            .into_iter()
            .zip(&self.basis)
            .zip(w)
            .filter(|(_, v)| !v.is_zero())
            .filter_map(|((s, f), &v)| {
                let span = l.checked_sub(s)?;
                Some(AuxEntry {
                    g: f.clone(),
                    k: l,
                    v,
                    span,
                })
            })
            .collect();
        next.corners()
            .into_iter()
            .map(|corner| {
                let exact = self.aux.iter().chain(&failed).find(|a| a.span == corner);
                let covering = || self.aux.iter().chain(&failed).find(|a| corner.preceq(a.span));
                exact
                    .or_else(covering)
                    .cloned()
                    .ok_or(BmsError::MissingAuxiliary(corner))
            })
            .collect()
    }
}

/// Runs the iteration over an arbitrary schedule and returns the
/// normal-form basis.
pub fn run_schedule(
    field: &Field,
    u: &impl ArrayView,
    schedule: &[Point],
    order: TotalOrder,
    capability: Option<usize>,
) -> Result<RunOutput, BmsError> {
    let mut state = BmsState::new(order, capability);
    let mut trace = Vec::with_capacity(schedule.len());
    for &l in schedule {
        trace.push(state.step(field, u, l)?);
    }
    state.normalize(field)?;
    Ok(RunOutput {
        basis: state.basis,
        delta: state.delta,
        trace,
        condition_holds: true,
    })
}

/// Runs over `S(t)` from the syndrome values indexed by `S(t)` itself.
pub fn run(
    field: &Field,
    values: &impl ArrayView,
    order: TotalOrder,
    t: usize,
    period: (usize, usize),
) -> Result<RunOutput, BmsError> {
    if t == 0 || t > period.0 / 2 || t > period.1 / 2 {
        return Err(BmsError::BadCapability { t, period });
    }
    let s = SofT::new(t);
    if let Some(&p) = s.schedule(order).iter().find(|&&p| values.value(p).is_none()) {
        return Err(BmsError::MissingValue(p));
    }
    let restricted = Restricted {
        inner: values,
        region: &s,
    };
    let mut out = run_schedule(field, &restricted, s.schedule(order), order, Some(t))?;
    out.condition_holds = condition_check(|p| restricted.value(p), t, ConditionKind::for_order(order));
    Ok(out)
}

/// Hides everything outside `S(t)`, so extra known values never leak in.
struct Restricted<'a, V> {
    inner: &'a V,
    region: &'a SofT,
}

impl<V: ArrayView> ArrayView for Restricted<'_, V> {
    fn value(&self, n: Point) -> Option<FieldElement> {
        if self.region.contains(n) {
            self.inner.value(n)
        } else {
            None
        }
    }
}
