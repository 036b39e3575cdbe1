//! Piecewise-constant functions on `I = [0, α)` with `α ∈ {1, ∞}`.
//!
//! A [`StepFunction`] is right-continuous: the value `values[k]` holds on
//! `[breakpoints[k], breakpoints[k + 1])` and `tail` holds on
//! `[breakpoints[m], α)`. Every constructor canonicalizes, so two functions
//! are equal as elements of `L⁰` exactly when they are structurally equal.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("breakpoints must be finite, start at 0 and increase strictly")]
    BadBreakpoints,
    #[error("{breakpoints} breakpoints need {expected} values, got {got}")]
    LengthMismatch {
        breakpoints: usize,
        expected: usize,
        got: usize,
    },
    #[error("values must be finite")]
    NonFinite,
    #[error("breakpoint {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("operands live on different measure spaces")]
    SpaceMismatch,
    #[error(
        "tail {0} on [0, inf) has no finite rearrangement; flag the function as L-infinity only"
    )]
    InfiniteTail(f64),
    #[error("the maximal function is defined for t > 0, got {0}")]
    NonPositiveArgument(f64),
    #[error("interval [{0}, {1}) is empty or not finite")]
    BadInterval(f64, f64),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

/// Lebesgue measure on `[0, 1)` or `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureSpace {
    Unit,
    HalfLine,
}

impl MeasureSpace {
    pub fn alpha(self) -> f64 {
        match self {
            MeasureSpace::Unit => 1.0,
            MeasureSpace::HalfLine => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MeasureSpace::Unit)
    }
}

impl fmt::Display for MeasureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpace::Unit => f.write_str("1"),
            MeasureSpace::HalfLine => f.write_str("inf"),
        }
    }
}

impl Serialize for MeasureSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MeasureSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        match raw.as_str() {
            "1" => Ok(MeasureSpace::Unit),
            "inf" => Ok(MeasureSpace::HalfLine),
            other => Err(serde::de::Error::custom(format!(
                "alpha must be \"1\" or \"inf\", got {other:?}"
            ))),
        }
    }
}

/// A finite union of half-open intervals, kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
                return Err(MeasureError::BadInterval(a, b));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

/// A right-continuous piecewise-constant function with finitely many pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    space: MeasureSpace,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    tail: f64,
    linf_only: bool,
}

impl StepFunction {
    /// Builds and canonicalizes. `breakpoints` holds `t₀ = 0 < … < t_m` and
    /// `values` one entry per `[t_{k-1}, t_k)`.
    pub fn new(
        space: MeasureSpace,
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        tail: f64,
    ) -> Result<Self> {
        let breakpoints = if breakpoints.is_empty() && values.is_empty() {
            vec![0.0]
        } else {
            breakpoints
        };
        if breakpoints.len() != values.len() + 1 {
            return Err(MeasureError::LengthMismatch {
                breakpoints: breakpoints.len(),
                expected: breakpoints.len().saturating_sub(1),
                got: values.len(),
            });
        }
        if breakpoints[0] != 0.0
            || breakpoints.iter().any(|t| !t.is_finite())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(MeasureError::BadBreakpoints);
        }
        if let Some(&last) = breakpoints.last() {
            if space.is_finite() && last > 1.0 {
                return Err(MeasureError::OutOfDomain(last));
            }
        }
        if values.iter().any(|v| !v.is_finite()) || !tail.is_finite() {
            return Err(MeasureError::NonFinite);
        }
        Ok(Self::canonical(space, breakpoints, values, tail, false))
    }

    /// Marks the function as usable only on paths needing its sup or `x*`
    /// with a constant tail on `[0, ∞)`.
    pub fn with_linf_only(mut self, flag: bool) -> Self {
        self.linf_only = flag;
        self
    }

    pub fn zero(space: MeasureSpace) -> Self {
        StepFunction {
            space,
            breakpoints: vec![0.0],
            values: Vec::new(),
            tail: 0.0,
            linf_only: false,
        }
    }

    /// `value · χ_[a, b)`.
    pub fn indicator(space: MeasureSpace, a: f64, b: f64, value: f64) -> Result<Self> {
        Self::from_pieces(space, vec![(a, b, value)], 0.0)
    }

    /// Builds from sorted, non-overlapping `(start, end, value)` pieces;
    /// gaps between pieces are zero.
    pub fn from_pieces(
        space: MeasureSpace,
        pieces: impl IntoIterator<Item = (f64, f64, f64)>,
        tail: f64,
    ) -> Result<Self> {
        let mut breakpoints = vec![0.0];
        let mut values = Vec::new();
        for (a, b, v) in pieces {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(MeasureError::BadInterval(a, b));
            }
            let last = *breakpoints.last().unwrap();
            match a.partial_cmp(&last) {
                Some(Ordering::Less) => return Err(MeasureError::BadBreakpoints),
                Some(Ordering::Greater) => {
                    values.push(0.0);
                    breakpoints.push(a);
                }
                _ => {}
            }
            values.push(v);
            breakpoints.push(b);
        }
        Self::new(space, breakpoints, values, tail)
    }

    /// Cell values on the uniform grid `[k·width, (k+1)·width)`.
    pub fn from_cells(space: MeasureSpace, width: f64, cells: &[f64]) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(MeasureError::BadInterval(0.0, width));
        }
        let breakpoints = (0..=cells.len()).map(|k| k as f64 * width).collect();
        Self::new(space, breakpoints, cells.to_vec(), 0.0)
    }

    fn canonical(
        space: MeasureSpace,
        mut breakpoints: Vec<f64>,
        values: Vec<f64>,
        mut tail: f64,
        linf_only: bool,
    ) -> Self {
        let mut values = values;
        if space.is_finite() {
            let last = *breakpoints.last().unwrap();
            if last < 1.0 && tail != 0.0 {
                breakpoints.push(1.0);
                values.push(tail);
            }
            tail = 0.0;
        }
        // -0.0 and 0.0 must serialize identically.
        tail += 0.0;
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        bps.push(0.0);
        for (k, &v) in values.iter().enumerate() {
            let v = v + 0.0;
            let end = breakpoints[k + 1];
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = end;
            } else {
                vals.push(v);
                bps.push(end);
            }
        }
        while vals.last() == Some(&tail) {
            vals.pop();
            bps.pop();
        }
        StepFunction {
            space,
            breakpoints: bps,
            values: vals,
            tail,
            linf_only,
        }
    }

    pub fn space(&self) -> MeasureSpace {
        self.space
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn is_linf_only(&self) -> bool {
        self.linf_only
    }

    /// End of the last finite piece.
    pub fn last_breakpoint(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Finite pieces as `(start, end, value)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.breakpoints[k], self.breakpoints[k + 1], v))
    }

    /// Whether the region `[t_m, α)` carrying the tail has positive measure.
    pub fn has_tail_region(&self) -> bool {
        self.last_breakpoint() < self.space.alpha()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty() && self.tail == 0.0
    }

    /// Value at `t` (right-continuous). Points outside `[0, α)` read 0.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 || t >= self.space.alpha() {
            return 0.0;
        }
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == self.breakpoints.len() {
            self.tail
        } else {
            self.values[idx - 1]
        }
    }

    /// `μ{s : |x(s)| > λ}`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        if self.has_tail_region() && self.tail.abs() > lambda {
            return f64::INFINITY;
        }
        self.pieces()
            .filter(|&(_, _, v)| v.abs() > lambda)
            .map(|(a, b, _)| b - a)
            .sum()
    }

    pub fn sup_abs(&self) -> f64 {
        let pieces = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if self.has_tail_region() {
            pieces.max(self.tail.abs())
        } else {
            pieces
        }
    }

    /// Essential infimum of the function (including zero gaps and the tail).
    pub fn inf_value(&self) -> f64 {
        let pieces = self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if self.has_tail_region() {
            pieces.min(self.tail)
        } else {
            pieces
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.inf_value() >= 0.0
    }

    /// `∫|x|`; infinite when a nonzero tail covers `[t_m, ∞)`.
    pub fn l1_norm(&self) -> f64 {
        if self.has_tail_region() && self.tail != 0.0 {
            return f64::INFINITY;
        }
        self.pieces().map(|(a, b, v)| v.abs() * (b - a)).sum()
    }

    /// `∫_a^b x` for `0 ≤ a ≤ b < ∞`.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        let b = b.min(self.space.alpha());
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let start = self
            .breakpoints
            .partition_point(|&t| t <= a)
            .saturating_sub(1);
        for k in start..self.values.len() {
            let lo = self.breakpoints[k].max(a);
            let hi = self.breakpoints[k + 1].min(b);
            if hi > lo {
                total += self.values[k] * (hi - lo);
            }
            if self.breakpoints[k + 1] >= b {
                break;
            }
        }
        let last = self.last_breakpoint();
        if b > last && self.tail != 0.0 {
            total += self.tail * (b - last.max(a));
        }
        total
    }

    /// Pieces of the function restricted to `[a, b)`, including the part of
    /// the tail that falls inside; `b` may be infinite only when the tail is 0.
    pub fn pieces_within(&self, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
        let b = b.min(self.space.alpha());
        let mut out = Vec::new();
        if b <= a {
            return out;
        }
        let start = self
            .breakpoints
            .partition_point(|&t| t <= a)
            .saturating_sub(1);
        for k in start..self.values.len() {
            let lo = self.breakpoints[k].max(a);
            let hi = self.breakpoints[k + 1].min(b);
            if hi > lo && self.values[k] != 0.0 {
                out.push((lo, hi, self.values[k]));
            }
            if self.breakpoints[k + 1] >= b {
                break;
            }
        }
        let last = self.last_breakpoint();
        if b > last && self.tail != 0.0 {
            out.push((last.max(a), b, self.tail));
        }
        out
    }

    fn is_rearranged(&self) -> bool {
        let tail_ok = self.tail == 0.0 || (self.tail > 0.0 && !self.space.is_finite());
        tail_ok
            && self.values.windows(2).all(|w| w[0] > w[1])
            && self.values.last().is_none_or(|&v| v > self.tail)
    }

    /// Decreasing rearrangement `x*`, supported from 0.
    pub fn rearrange(&self) -> Result<StepFunction> {
        let level = self.tail.abs();
        if level != 0.0 && !self.linf_only {
            return Err(MeasureError::InfiniteTail(self.tail));
        }
        if self.is_rearranged() {
            return Ok(self.clone());
        }
        let mut blocks: Vec<(f64, f64)> = self
            .pieces()
            .filter(|&(_, _, v)| v.abs() > level)
            .map(|(a, b, v)| (v.abs(), b - a))
            .collect();
        blocks.sort_by(|x, y| y.0.total_cmp(&x.0));
        let alpha = self.space.alpha();
        let mut breakpoints = vec![0.0];
        let mut values = Vec::new();
        let mut k = 0;
        while k < blocks.len() {
            let v = blocks[k].0;
            let mut len = 0.0;
            while k < blocks.len() && blocks[k].0 == v {
                len += blocks[k].1;
                k += 1;
            }
            let end = (breakpoints.last().unwrap() + len).min(alpha);
            if end > *breakpoints.last().unwrap() {
                breakpoints.push(end);
                values.push(v);
            }
        }
        Ok(Self::canonical(
            self.space,
            breakpoints,
            values,
            level,
            self.linf_only,
        ))
    }

    /// `F(t) = ∫₀ᵗ x*`.
    pub fn cumulative_profile(&self) -> Result<CumulativeProfile> {
        let star = self.rearrange()?;
        let mut nodes = Vec::with_capacity(star.breakpoints.len());
        nodes.push((0.0, 0.0));
        let mut acc = 0.0;
        for (a, b, v) in star.pieces() {
            acc += v * (b - a);
            nodes.push((b, acc));
        }
        Ok(CumulativeProfile {
            nodes,
            final_slope: star.tail,
        })
    }

    /// `x**(t) = F(t)/t`, represented as `a + c/t` on each piece of `x*`.
    pub fn maximal_profile(&self) -> Result<MaximalFunction> {
        let profile = self.cumulative_profile()?;
        let star = self.rearrange()?;
        let mut pieces = Vec::with_capacity(star.values.len());
        for (k, (a, b, v)) in star.pieces().enumerate() {
            let (_, f_prev) = profile.nodes[k];
            pieces.push(MaximalPiece {
                start: a,
                end: b,
                constant: v,
                coefficient: f_prev - v * a,
            });
        }
        let &(last_t, last_f) = profile.nodes.last().unwrap();
        let tail = MaximalPiece {
            start: last_t,
            end: f64::INFINITY,
            constant: star.tail,
            coefficient: last_f - star.tail * last_t,
        };
        Ok(MaximalFunction { pieces, tail })
    }

    fn values_at(&self, points: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(points.len());
        let mut k = 0;
        for &t in points {
            while k + 1 < self.breakpoints.len() && self.breakpoints[k + 1] <= t {
                k += 1;
            }
            out.push(if k < self.values.len() {
                self.values[k]
            } else {
                self.tail
            });
        }
        out
    }

    /// Pointwise `f(self, other)` on the merged breakpoints.
    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.space != other.space {
            return Err(MeasureError::SpaceMismatch);
        }
        let mut breakpoints = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (mut i, mut j) = (0, 0);
        while i < self.breakpoints.len() || j < other.breakpoints.len() {
            let next = match (self.breakpoints.get(i), other.breakpoints.get(j)) {
                (Some(&a), Some(&b)) => a.min(b),
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            };
            while self.breakpoints.get(i) == Some(&next) {
                i += 1;
            }
            while other.breakpoints.get(j) == Some(&next) {
                j += 1;
            }
            breakpoints.push(next);
        }
        let left = self.values_at(&breakpoints[..breakpoints.len() - 1]);
        let right = other.values_at(&breakpoints[..breakpoints.len() - 1]);
        let values: Vec<f64> = left.iter().zip(&right).map(|(&a, &b)| f(a, b)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MeasureError::NonFinite);
        }
        let tail = f(self.tail, other.tail);
        Ok(Self::canonical(
            self.space,
            breakpoints,
            values,
            tail,
            self.linf_only || other.linf_only,
        ))
    }

    /// Pointwise `f(self)`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let mut breakpoints = self.breakpoints.clone();
        let mut tail = f(self.tail);
        if self.space.is_finite() {
            if self.has_tail_region() {
                breakpoints.push(1.0);
                values.push(tail);
            }
            tail = 0.0;
        }
        if values.iter().any(|v| !v.is_finite()) || !tail.is_finite() {
            return Err(MeasureError::NonFinite);
        }
        Ok(Self::canonical(
            self.space,
            breakpoints,
            values,
            tail,
            self.linf_only,
        ))
    }

    pub fn add(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs).expect("abs of finite values is finite")
    }

    /// Truncation `min(x, c)`.
    pub fn min_const(&self, c: f64) -> Result<Self> {
        self.map(|v| v.min(c))
    }

    pub fn max_const(&self, c: f64) -> Result<Self> {
        self.map(|v| v.max(c))
    }

    /// `x · χ_set`.
    pub fn restrict(&self, set: &IntervalSet) -> Result<Self> {
        let mut pieces = Vec::new();
        for &(a, b) in set.intervals() {
            if b > self.space.alpha() && a >= self.space.alpha() {
                continue;
            }
            pieces.extend(self.pieces_within(a, b));
        }
        Self::from_pieces(self.space, pieces, 0.0)
    }

    /// Whether every breakpoint inside `(0, span)` is a multiple of `width`.
    pub fn is_aligned(&self, width: f64, span: f64) -> bool {
        self.breakpoints
            .iter()
            .filter(|&&t| t > 0.0 && t < span)
            .all(|&t| {
                let k = (t / width).round();
                (k * width - t).abs() <= 1e-12 * t.max(1.0)
            })
    }

    /// Cell values on `[k·width, (k+1)·width)`, `k < cells`.
    pub fn cell_values(&self, width: f64, cells: usize) -> Vec<f64> {
        let mids: Vec<f64> = (0..cells).map(|k| (k as f64 + 0.5) * width).collect();
        self.values_at(&mids)
    }
}

#[derive(Serialize, Deserialize)]
struct StepFunctionRepr {
    alpha: MeasureSpace,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    tail: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    linf_only: bool,
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepFunctionRepr {
            alpha: self.space,
            breakpoints: self.breakpoints.clone(),
            values: self.values.clone(),
            tail: self.tail,
            linf_only: self.linf_only,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = StepFunctionRepr::deserialize(d)?;
        StepFunction::new(repr.alpha, repr.breakpoints, repr.values, repr.tail)
            .map(|f| f.with_linf_only(repr.linf_only))
            .map_err(serde::de::Error::custom)
    }
}

/// `t ↦ ∫₀ᵗ x*`: piecewise linear through `nodes`, slope `final_slope`
/// beyond the last node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeProfile {
    nodes: Vec<(f64, f64)>,
    final_slope: f64,
}

impl CumulativeProfile {
    /// From raw nodes; the first node must be `(0, 0)`.
    pub fn from_nodes(nodes: Vec<(f64, f64)>, final_slope: f64) -> Result<Self> {
        if nodes.first() != Some(&(0.0, 0.0))
            || nodes.windows(2).any(|w| w[0].0 >= w[1].0)
            || nodes.iter().any(|&(t, f)| !t.is_finite() || !f.is_finite())
        {
            return Err(MeasureError::BadBreakpoints);
        }
        Ok(CumulativeProfile { nodes, final_slope })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn final_slope(&self) -> f64 {
        self.final_slope
    }

    pub fn last_node(&self) -> (f64, f64) {
        *self.nodes.last().unwrap()
    }

    /// Slopes of the linear pieces, first to last, ending with `final_slope`.
    pub fn slopes(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .nodes
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        out.push(self.final_slope);
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let idx = self.nodes.partition_point(|&(s, _)| s <= t);
        if idx == self.nodes.len() {
            let (s, f) = self.last_node();
            if t == s {
                return f;
            }
            return f + self.final_slope * (t - s);
        }
        let (s0, f0) = self.nodes[idx - 1];
        if t == s0 {
            return f0;
        }
        let (s1, f1) = self.nodes[idx];
        f0 + (f1 - f0) * ((t - s0) / (s1 - s0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalPiece {
    pub start: f64,
    pub end: f64,
    pub constant: f64,
    pub coefficient: f64,
}

impl MaximalPiece {
    pub fn eval(&self, t: f64) -> f64 {
        self.constant + self.coefficient / t
    }
}

/// `x**` as `constant + coefficient / t` on each piece of `x*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalFunction {
    pieces: Vec<MaximalPiece>,
    tail: MaximalPiece,
}

impl MaximalFunction {
    pub fn pieces(&self) -> &[MaximalPiece] {
        &self.pieces
    }

    pub fn tail(&self) -> &MaximalPiece {
        &self.tail
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(MeasureError::NonPositiveArgument(t));
        }
        let idx = self.pieces.partition_point(|p| p.end <= t);
        let piece = self.pieces.get(idx).unwrap_or(&self.tail);
        Ok(piece.eval(t))
    }

    /// `lim_{t→0⁺} x**(t)`, i.e. `ess sup |x|`.
    pub fn at_zero(&self) -> f64 {
        self.pieces.first().unwrap_or(&self.tail).constant
    }
}
