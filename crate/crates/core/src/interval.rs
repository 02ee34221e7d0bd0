//! Closed real intervals and interval datasets.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` of reals. Zero-width intervals represent
/// precise measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval { lo, hi, reason: "endpoints must be finite" });
        }
        if lo > hi {
            return Err(Error::InvalidInterval { lo, hi, reason: "lower endpoint exceeds upper" });
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Result<Self> {
        Interval::new(x, x)
    }

    /// Builds an interval from endpoints that are ordered by construction.
    pub(crate) fn from_ordered(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "unordered endpoints {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Endpoint-wise sum `[a.lo + b.lo, a.hi + b.hi]`.
    pub fn add(&self, other: &Interval) -> Interval {
        Interval::from_ordered(self.lo + other.lo, self.hi + other.hi)
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::from_ordered(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn shift(&self, c: f64) -> Interval {
        Interval::from_ordered(self.lo + c, self.hi + c)
    }

    /// Lexicographic order: by lower endpoint, ties broken by upper endpoint.
    pub fn lex_cmp(&self, other: &Interval) -> Ordering {
        self.lo.total_cmp(&other.lo).then(self.hi.total_cmp(&other.hi))
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::add(&self, &rhs)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Provenance tag carried by a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Skinny,
    Puffy,
    Pooled,
    User(String),
}

impl Label {
    pub fn as_str(&self) -> &str {
        match self {
            Label::Skinny => "skinny",
            Label::Puffy => "puffy",
            Label::Pooled => "pooled",
            Label::User(s) => s,
        }
    }

    pub fn parse(s: &str) -> Label {
        match s {
            "skinny" => Label::Skinny,
            "puffy" => Label::Puffy,
            "pooled" => Label::Pooled,
            other => Label::User(other.to_string()),
        }
    }
}

impl Default for Label {
    fn default() -> Self {
        Label::User("user".to_string())
    }
}

/// An ordered collection of interval measurements.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalDataset {
    items: Vec<Interval>,
    label: Label,
}

impl IntervalDataset {
    pub fn new(items: Vec<Interval>, label: Label) -> Self {
        IntervalDataset { items, label }
    }

    /// Dataset of zero-width intervals.
    pub fn from_points(points: &[f64], label: Label) -> Result<Self> {
        let items = points.iter().map(|&x| Interval::point(x)).collect::<Result<Vec<_>>>()?;
        Ok(IntervalDataset::new(items, label))
    }

    /// Dataset from `(lo, hi)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], label: Label) -> Result<Self> {
        let items = pairs.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect::<Result<Vec<_>>>()?;
        Ok(IntervalDataset::new(items, label))
    }

    pub fn items(&self) -> &[Interval] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Interval> {
        self.items
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.items.iter()
    }

    pub fn lows(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().map(Interval::lo)
    }

    pub fn highs(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().map(Interval::hi)
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.items.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }

    /// Endpoint-wise sum of all intervals; `[0, 0]` for an empty dataset.
    pub fn sum(&self) -> Interval {
        self.items.iter().fold(Interval::from_ordered(0.0, 0.0), |acc, x| acc.add(x))
    }

    /// `N / Σ[lo, hi] = [N / Σhi, N / Σlo]` for positive data.
    pub fn scale_recip_sum(&self) -> Result<Interval> {
        self.require_non_empty()?;
        if let Some(bad) = self.items.iter().find(|x| x.lo <= 0.0) {
            return Err(Error::OutsideSupport(bad.lo));
        }
        let n = self.items.len() as f64;
        let s = self.sum();
        Ok(Interval::from_ordered(n / s.hi, n / s.lo))
    }

    /// `[max lo_i, max hi_i]`, which encloses the maximum of any point selection.
    pub fn interval_max(&self) -> Result<Interval> {
        self.require_non_empty()?;
        let lo = self.lows().fold(f64::NEG_INFINITY, f64::max);
        let hi = self.highs().fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval::from_ordered(lo, hi))
    }

    /// Stable lexicographic sort.
    pub fn lex_sort(&self) -> IntervalDataset {
        let mut items = self.items.clone();
        items.sort_by(Interval::lex_cmp);
        IntervalDataset { items, label: self.label.clone() }
    }

    /// Returns a copy with every lower endpoint raised to at least `floor`.
    /// Intervals lying entirely below `floor` collapse onto it.
    pub fn clamp_lower(&self, floor: f64) -> IntervalDataset {
        let items = self
            .items
            .iter()
            .map(|x| {
                let lo = x.lo.max(floor);
                Interval::from_ordered(lo, x.hi.max(lo))
            })
            .collect();
        IntervalDataset { items, label: self.label.clone() }
    }

    /// True when no interval strictly contains another.
    pub fn is_no_nesting(&self) -> bool {
        let sorted = self.lex_sort();
        let items = sorted.items();
        // Max upper endpoint over intervals with strictly smaller lower endpoint.
        let mut max_hi_before = f64::NEG_INFINITY;
        let mut group_start = 0;
        for (i, x) in items.iter().enumerate() {
            if i > 0 && items[i - 1].lo != x.lo {
                for y in &items[group_start..i] {
                    max_hi_before = max_hi_before.max(y.hi);
                }
                group_start = i;
            }
            if x.hi <= max_hi_before {
                return false;
            }
            if items[group_start].hi != x.hi {
                return false;
            }
        }
        true
    }
}

impl FromIterator<Interval> for IntervalDataset {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalDataset::new(iter.into_iter().collect(), Label::default())
    }
}

impl<'a> IntoIterator for &'a IntervalDataset {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
