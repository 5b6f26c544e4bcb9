//! Exponent points, monomial orders, delta-sets and the `S(t)` index set.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::FieldElement;

/// A point of N x N, serialized as `[n1, n2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point(pub usize, pub usize);

impl Point {
    pub const ORIGIN: Point = Point(0, 0);

    /// Componentwise `self <= other`.
    pub fn preceq(self, other: Point) -> bool {
        self.0 <= other.0 && self.1 <= other.1
    }

    /// `self - other` when `other ⪯ self`.
    pub fn checked_sub(self, other: Point) -> Option<Point> {
        Some(Point(self.0.checked_sub(other.0)?, self.1.checked_sub(other.1)?))
    }

    pub fn degree(self) -> usize {
        self.0 + self.1
    }

    /// Reduces the point into `Z_r1 x Z_r2`.
    pub fn reduce(self, period: (usize, usize)) -> Point {
        Point(self.0 % period.0, self.1 % period.1)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point(self.0 + rhs.0, self.1 + rhs.1)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// `p ⪯ q`.
pub fn preceq(p: Point, q: Point) -> bool {
    p.preceq(q)
}

/// The two monomial orders: lexicographic with X1 > X2, and graded with ties
/// broken in favour of the larger X2 exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TotalOrder {
    #[default]
    Lex,
    Graded,
}

impl TotalOrder {
    pub fn compare(self, p: Point, q: Point) -> Ordering {
        match self {
            TotalOrder::Lex => (p.0, p.1).cmp(&(q.0, q.1)),
            TotalOrder::Graded => (p.degree(), p.1).cmp(&(q.degree(), q.1)),
        }
    }

    pub fn less(self, p: Point, q: Point) -> bool {
        self.compare(p, q) == Ordering::Less
    }

    /// The successor used to walk the `r1 x r2` grid.
    ///
    /// Lex walks each column `n1` through `n2 = 0..r2` before moving on;
    /// graded walks anti-diagonals. The graded walk runs over all of N x N,
    /// callers restrict it to the grid.
    pub fn next_step(self, n: Point, _r1: usize, r2: usize) -> Point {
        match self {
            TotalOrder::Lex => {
                if n.1 + 1 < r2 {
                    Point(n.0, n.1 + 1)
                } else {
                    Point(n.0 + 1, 0)
                }
            }
            TotalOrder::Graded => {
                if n.0 > 0 {
                    Point(n.0 - 1, n.1 + 1)
                } else {
                    Point(n.1 + 1, 0)
                }
            }
        }
    }

    /// Every point of `Z_r1 x Z_r2` in increasing order.
    pub fn grid_schedule(self, r1: usize, r2: usize) -> Vec<Point> {
        let mut out: Vec<Point> = (0..r1).flat_map(|i| (0..r2).map(move |j| Point(i, j))).collect();
        out.sort_by(|&p, &q| self.compare(p, q));
        out
    }

    /// Sorts points increasingly.
    pub fn sort(self, points: &mut [Point]) {
        points.sort_by(|&p, &q| self.compare(p, q));
    }

    pub fn max(self, points: impl IntoIterator<Item = Point>) -> Option<Point> {
        points.into_iter().max_by(|&p, &q| self.compare(p, q))
    }
}

impl std::str::FromStr for TotalOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex" => Ok(TotalOrder::Lex),
            "graded" => Ok(TotalOrder::Graded),
            other => Err(format!("unknown order {other:?} (expected lex or graded)")),
        }
    }
}

impl fmt::Display for TotalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TotalOrder::Lex => "lex",
            TotalOrder::Graded => "graded",
        })
    }
}

/// Subsets of N x N anchored at points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `{m : s ⪯ m}`
    Sigma(Point),
    /// `{m : s ⪯ m and m <_T k}`
    SigmaUpTo { s: Point, k: Point, order: TotalOrder },
    /// `{m : m ⪯ s}`
    DeltaRect(Point),
}

impl Region {
    pub fn contains(&self, m: Point) -> bool {
        match *self {
            Region::Sigma(s) => s.preceq(m),
            Region::SigmaUpTo { s, k, order } => s.preceq(m) && order.less(m, k),
            Region::DeltaRect(s) => m.preceq(s),
        }
    }
}

/// The index set `S(t)` with its two iteration schedules.
#[derive(Debug, Clone)]
pub struct SofT {
    t: usize,
    members: HashSet<Point>,
    lex: Vec<Point>,
    graded: Vec<Point>,
}

impl SofT {
    pub fn new(t: usize) -> Self {
        let mut lex = Vec::new();
        for i in 0..2 * t {
            if i == 0 {
                lex.extend((0..2 * t).map(|j| Point(0, j)));
            } else {
                lex.push(Point(i, 0));
                if i < t {
                    lex.extend((1..=t - i).map(|j| Point(i, j)));
                }
            }
        }
        let members: HashSet<Point> = lex.iter().copied().collect();
        let mut graded = lex.clone();
        TotalOrder::Graded.sort(&mut graded);
        TotalOrder::Lex.sort(&mut lex);
        SofT {
            t,
            members,
            lex,
            graded,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn contains(&self, p: Point) -> bool {
        self.members.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Points in the order a run visits them.
    pub fn schedule(&self, order: TotalOrder) -> &[Point] {
        match order {
            TotalOrder::Lex => &self.lex,
            TotalOrder::Graded => &self.graded,
        }
    }

    /// `(t^2 + 7t)/2 - 1`, valid for `t >= 1`.
    pub fn expected_len(t: usize) -> usize {
        (t * t + 7 * t) / 2 - 1
    }
}

pub fn s_of_t(t: usize) -> SofT {
    SofT::new(t)
}

/// Nonvanishing requirement on early `S(t)` values for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `u_(0,j) != 0` for some `j < t` (lex runs)
    L,
    /// `u_(i,j) != 0` for some `i + j = 1` (graded runs)
    G,
}

impl ConditionKind {
    pub fn for_order(order: TotalOrder) -> Self {
        match order {
            TotalOrder::Lex => ConditionKind::L,
            TotalOrder::Graded => ConditionKind::G,
        }
    }
}

pub fn condition_check(value: impl Fn(Point) -> Option<FieldElement>, t: usize, kind: ConditionKind) -> bool {
    let nonzero = |p: Point| value(p).is_some_and(|v| !v.is_zero());
    match kind {
        ConditionKind::L => (0..t).any(|j| nonzero(Point(0, j))),
        ConditionKind::G => nonzero(Point(1, 0)) || nonzero(Point(0, 1)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("defining points violate the staircase inequalities: {0:?}")]
    BadDefiningPoints(Vec<Point>),
    #[error("point set is not closed downwards")]
    NotDownClosed,
}

/// A staircase set with its defining points `s(1), ..., s(d)`:
/// first coordinates strictly decreasing to 0, second strictly increasing
/// from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaSet {
    defining: Vec<Point>,
    members: BTreeSet<Point>,
}

impl DeltaSet {
    /// The empty delta-set, whose single defining point is the origin.
    pub fn empty() -> Self {
        DeltaSet {
            defining: vec![Point::ORIGIN],
            members: BTreeSet::new(),
        }
    }

    pub fn from_defining_points(points: &[Point]) -> Result<Self, DeltaError> {
        let bad = || DeltaError::BadDefiningPoints(points.to_vec());
        let (first, last) = match (points.first(), points.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(bad()),
        };
        if first.1 != 0 || last.0 != 0 {
            return Err(bad());
        }
        for w in points.windows(2) {
            if !(w[0].0 > w[1].0 && w[0].1 < w[1].1) {
                return Err(bad());
            }
        }
        let mut members = BTreeSet::new();
        for w in points.windows(2) {
            let corner = (w[0].0 - 1, w[1].1 - 1);
            for i in 0..=corner.0 {
                for j in 0..=corner.1 {
                    members.insert(Point(i, j));
                }
            }
        }
        Ok(DeltaSet {
            defining: points.to_vec(),
            members,
        })
    }

    /// Builds the delta-set from its member points.
    pub fn from_members(members: impl IntoIterator<Item = Point>) -> Result<Self, DeltaError> {
        let members: BTreeSet<Point> = members.into_iter().collect();
        for p in &members {
            if (p.0 > 0 && !members.contains(&Point(p.0 - 1, p.1)))
                || (p.1 > 0 && !members.contains(&Point(p.0, p.1 - 1)))
            {
                return Err(DeltaError::NotDownClosed);
            }
        }
        if members.is_empty() {
            return Ok(DeltaSet::empty());
        }
        // column heights, non-increasing since the set is down-closed
        let width = members.iter().map(|p| p.0).max().unwrap() + 1;
        let mut height = vec![0usize; width + 1];
        for p in &members {
            height[p.0] = height[p.0].max(p.1 + 1);
        }
        // (i, h(i)) is a minimal outside point iff the column to its left is taller
        let out: Vec<Point> = (0..=width)
            .rev()
            .filter(|&i| i == 0 || height[i - 1] > height[i])
            .map(|i| Point(i, height[i]))
            .collect();
        DeltaSet::from_defining_points(&out)
    }

    pub fn defining_points(&self) -> &[Point] {
        &self.defining
    }

    /// Maximal points `(s1(i) - 1, s2(i+1) - 1)` of the rectangles.
    pub fn corners(&self) -> Vec<Point> {
        self.defining
            .windows(2)
            .map(|w| Point(w[0].0 - 1, w[1].1 - 1))
            .collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.members.contains(&p)
    }

    pub fn members(&self) -> &BTreeSet<Point> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &DeltaSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The delta-set obtained by adding the rectangle `Δ_s`.
    pub fn with_rectangle(&self, s: Point) -> DeltaSet {
        let mut members = self.members.clone();
        for i in 0..=s.0 {
            for j in 0..=s.1 {
                members.insert(Point(i, j));
            }
        }
        DeltaSet::from_members(members).expect("union of staircases is a staircase")
    }
}

pub fn delta_from_points(points: &[Point]) -> Result<DeltaSet, DeltaError> {
    DeltaSet::from_defining_points(points)
}

/// Every delta-set with at most `max_size` points (Young diagrams).
pub fn delta_sets_up_to(max_size: usize) -> Vec<DeltaSet> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        for part in partitions(n, n) {
            // part[i] = height of column i
            let members = part
                .iter()
                .enumerate()
                .flat_map(|(i, &h)| (0..h).map(move |j| Point(i, j)));
            out.push(DeltaSet::from_members(members).expect("partition is a staircase"));
        }
    }
    out
}

fn partitions(n: usize, max_part: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max_part.min(n)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
