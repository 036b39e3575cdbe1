//! A closed algebra of substochastic operators acting on step functions,
//! with probe-based certification of `Tx ≺ x`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::majorization::{hlp_leq, MajorizationError, TransferMatrix, DEFAULT_TOL};
use crate::measure::{MeasureError, MeasureSpace, StepFunction};
use crate::spaces::{norm, NormSpec, SpaceError};

/// Largest partition or grid the builders will produce.
pub const MAX_CELLS: usize = 1 << 22;

/// Slack on probability weights.
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Majorization(#[from] MajorizationError),
    #[error("input breakpoints are not aligned with the grid of width {width}")]
    Misaligned { width: f64 },
    #[error("operator reaches {0}, outside the unit interval")]
    OutsideDomain(f64),
    #[error("invalid partition family: {0}")]
    InvalidFamily(String),
    #[error("family at level {level} does not refine its predecessor")]
    Refinement { level: usize },
    #[error("invalid operator node: {0}")]
    InvalidNode(String),
    #[error("rank {rank} exceeds the {cells} available cells")]
    RankExceedsCells { rank: usize, cells: usize },
    #[error("finite-rank truncation needs a partition-average base")]
    NotPartitionAverage,
    #[error("partition would need {0} cells")]
    TooManyCells(usize),
    #[error("certification needs at least one probe")]
    NoProbes,
    #[error("iteration needs a nonnegative starting function")]
    NegativeInput,
    #[error("A^{k} x is not majorized by A^{prev} x (margin {margin} at t = {witness_t})", prev = .k - 1)]
    ChainViolation {
        k: usize,
        witness_t: f64,
        margin: f64,
    },
    #[error("malformed operator JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, OperatorError>;

/// `width · cells` uniform grid on `[0, width · cells)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width: f64,
    pub cells: usize,
}

impl Grid {
    pub fn new(width: f64, cells: usize) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) || cells == 0 {
            return Err(OperatorError::InvalidNode(format!(
                "grid needs positive width and cells, got {width} x {cells}"
            )));
        }
        Ok(Grid { width, cells })
    }

    pub fn span(&self) -> f64 {
        self.cells as f64 * self.width
    }

    fn cell(&self, k: usize) -> (f64, f64) {
        (k as f64 * self.width, (k + 1) as f64 * self.width)
    }
}

/// Finitely many disjoint intervals `E_j` of positive length; the rest of
/// the domain is the residual `Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr")]
pub struct PartitionFamily {
    cells: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<Box<PartitionFamily>>,
}

#[derive(Deserialize)]
struct FamilyRepr {
    cells: Vec<(f64, f64)>,
    #[serde(default)]
    parent: Option<Box<PartitionFamily>>,
}

impl TryFrom<FamilyRepr> for PartitionFamily {
    type Error = OperatorError;

    fn try_from(r: FamilyRepr) -> Result<Self> {
        let family = PartitionFamily::new(r.cells)?;
        match r.parent {
            Some(parent) => family.with_parent(*parent),
            None => Ok(family),
        }
    }
}

impl PartitionFamily {
    /// Cells keep the given order, which is the indexing used by
    /// finite-rank truncation.
    pub fn new(cells: Vec<(f64, f64)>) -> Result<Self> {
        if cells.len() > MAX_CELLS {
            return Err(OperatorError::TooManyCells(cells.len()));
        }
        for &(a, b) in &cells {
            if !(a.is_finite() && b.is_finite() && a >= 0.0 && b > a) {
                return Err(OperatorError::InvalidFamily(format!("bad cell [{a}, {b})")));
            }
        }
        let mut sorted = cells.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        if let Some(w) = sorted.windows(2).find(|w| w[0].1 > w[1].0) {
            return Err(OperatorError::InvalidFamily(format!(
                "cells [{}, {}) and [{}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(PartitionFamily {
            cells,
            parent: None,
        })
    }

    /// `count` cells of width `width` starting at 0.
    pub fn uniform(width: f64, count: usize) -> Result<Self> {
        let grid = Grid::new(width, count)?;
        Self::new((0..count).map(|k| grid.cell(k)).collect())
    }

    /// Attaches the coarser family this one refines (its own parent is
    /// dropped to keep chains shallow).
    pub fn with_parent(mut self, parent: PartitionFamily) -> Result<Self> {
        if !self.refines(&parent) {
            return Err(OperatorError::InvalidFamily(
                "a parent cell is not a union of cells of this family".into(),
            ));
        }
        self.parent = Some(Box::new(PartitionFamily {
            cells: parent.cells,
            parent: None,
        }));
        Ok(self)
    }

    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    pub fn parent(&self) -> Option<&PartitionFamily> {
        self.parent.as_deref()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `sup_j μ(E_j)`.
    pub fn mesh(&self) -> f64 {
        self.cells.iter().map(|&(a, b)| b - a).fold(0.0, f64::max)
    }

    /// Every cell of `parent` is tiled by consecutive cells of `self`.
    pub fn refines(&self, parent: &PartitionFamily) -> bool {
        let mut sorted = self.cells.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        parent.cells.iter().all(|&(a, b)| {
            let mut k = sorted.partition_point(|c| c.0 < a);
            let mut at = a;
            while k < sorted.len() && sorted[k].0 == at && at < b {
                at = sorted[k].1;
                k += 1;
            }
            at == b
        })
    }

    /// Residual `Ω = [0, α) \ ∪E_j` as sorted intervals (the last may be
    /// unbounded).
    pub fn residual(&self, alpha: f64) -> Vec<(f64, f64)> {
        let mut sorted = self.cells.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut gaps = Vec::new();
        let mut at = 0.0;
        for (a, b) in sorted {
            if a > at {
                gaps.push((at, a.min(alpha)));
            }
            at = b;
        }
        if at < alpha {
            gaps.push((at, alpha));
        }
        gaps.retain(|&(a, b)| b > a);
        gaps
    }

    /// `μ(Ω ∩ [0, limit))`.
    pub fn residual_measure(&self, alpha: f64, limit: f64) -> f64 {
        self.residual(alpha)
            .iter()
            .map(|&(a, b)| (b.min(limit) - a).max(0.0))
            .sum()
    }

    fn check_domain(&self, space: MeasureSpace) -> Result<()> {
        match self.cells.iter().map(|c| c.1).find(|&b| b > space.alpha()) {
            Some(b) => Err(OperatorError::OutsideDomain(b)),
            None => Ok(()),
        }
    }
}

/// Measure-preserving exchange of `perm.len()` equal blocks starting at
/// `origin`: block `i` of the output carries block `perm[i]` of the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalExchange {
    pub origin: f64,
    pub block: f64,
    pub perm: Vec<usize>,
}

impl IntervalExchange {
    pub fn new(origin: f64, block: f64, perm: Vec<usize>) -> Result<Self> {
        let e = IntervalExchange {
            origin,
            block,
            perm,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn span(&self) -> f64 {
        self.origin + self.perm.len() as f64 * self.block
    }

    fn bound(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.block
    }

    fn validate(&self) -> Result<()> {
        if !(self.origin.is_finite() && self.origin >= 0.0)
            || !(self.block.is_finite() && self.block > 0.0)
        {
            return Err(OperatorError::InvalidNode(
                "interval exchange needs origin >= 0 and a positive block".into(),
            ));
        }
        check_permutation(&self.perm)
    }
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(OperatorError::InvalidNode(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    Ok(())
}

fn check_weights(weights: &[f64], exact_total: bool) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(OperatorError::InvalidNode(
            "weights must be nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if total > 1.0 + WEIGHT_TOL || (exact_total && (total - 1.0).abs() > WEIGHT_TOL) {
        return Err(OperatorError::InvalidNode(format!(
            "weights sum to {total}"
        )));
    }
    Ok(())
}

/// Operator expression tree. Every leaf is substochastic, and the algebra
/// is closed under convex combination and composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum OperatorExpr {
    Identity,
    /// Averages over each cell; the residual passes through when kept.
    PartitionAverage {
        family: PartitionFamily,
        keep_residual: bool,
    },
    /// `x χ_Ω + Σ T_j(x χ_{E_j}) χ_{E_j}`.
    DisjointFamilyCombine {
        family: PartitionFamily,
        inner: Vec<OperatorExpr>,
    },
    MeasurePreserve {
        exchange: IntervalExchange,
    },
    DiscreteMatrix {
        matrix: TransferMatrix,
        grid: Grid,
    },
    /// `(P x)_i = x_{perm[i]}` on the grid cells.
    Permutation {
        perm: Vec<usize>,
        grid: Grid,
    },
    /// Circular convolution `(K x)_i = Σ_j w_j x_{i−j mod n}`.
    CirculantKernel {
        weights: Vec<f64>,
        grid: Grid,
    },
    ConvexCombine {
        children: Vec<OperatorExpr>,
        weights: Vec<f64>,
    },
    /// Applied right to left.
    Compose {
        children: Vec<OperatorExpr>,
    },
    /// Averages over the first `rank` cells only and keeps the residual on
    /// `[0, horizon)` (all of it when `horizon` is absent).
    FiniteRankTruncate {
        family: PartitionFamily,
        keep_residual: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<f64>,
        rank: usize,
    },
}

impl OperatorExpr {
    pub fn average(family: PartitionFamily, keep_residual: bool) -> Self {
        OperatorExpr::PartitionAverage {
            family,
            keep_residual,
        }
    }

    pub fn circulant(weights: Vec<f64>, grid: Grid) -> Result<Self> {
        let op = OperatorExpr::CirculantKernel { weights, grid };
        op.validate()?;
        Ok(op)
    }

    pub fn convex(children: Vec<OperatorExpr>, weights: Vec<f64>) -> Result<Self> {
        let op = OperatorExpr::ConvexCombine { children, weights };
        op.validate()?;
        Ok(op)
    }

    /// Parses and validates an operator tree.
    pub fn from_json(text: &str) -> Result<Self> {
        let op: OperatorExpr =
            serde_json::from_str(text).map_err(|e| OperatorError::Json(e.to_string()))?;
        op.validate()?;
        Ok(op)
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorExpr::Identity => "identity",
            OperatorExpr::PartitionAverage { .. } => "partition_average",
            OperatorExpr::DisjointFamilyCombine { .. } => "disjoint_family_combine",
            OperatorExpr::MeasurePreserve { .. } => "measure_preserve",
            OperatorExpr::DiscreteMatrix { .. } => "discrete_matrix",
            OperatorExpr::Permutation { .. } => "permutation",
            OperatorExpr::CirculantKernel { .. } => "circulant_kernel",
            OperatorExpr::ConvexCombine { .. } => "convex_combine",
            OperatorExpr::Compose { .. } => "compose",
            OperatorExpr::FiniteRankTruncate { .. } => "finite_rank_truncate",
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            OperatorExpr::DisjointFamilyCombine { inner: c, .. }
            | OperatorExpr::ConvexCombine { children: c, .. }
            | OperatorExpr::Compose { children: c } => {
                1 + c.iter().map(OperatorExpr::depth).max().unwrap_or(0)
            }
            _ => 1,
        }
    }

    /// Grids of every grid-based node, in depth-first order.
    pub fn grids(&self) -> Vec<Grid> {
        match self {
            OperatorExpr::DiscreteMatrix { grid, .. }
            | OperatorExpr::Permutation { grid, .. }
            | OperatorExpr::CirculantKernel { grid, .. } => vec![*grid],
            OperatorExpr::DisjointFamilyCombine { inner: c, .. }
            | OperatorExpr::ConvexCombine { children: c, .. }
            | OperatorExpr::Compose { children: c } => {
                c.iter().flat_map(OperatorExpr::grids).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Checks the structural invariants of every node.
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorExpr::Identity | OperatorExpr::PartitionAverage { .. } => Ok(()),
            OperatorExpr::DisjointFamilyCombine { family, inner } => {
                if family.len() != inner.len() {
                    return Err(OperatorError::InvalidNode(format!(
                        "{} cells but {} inner operators",
                        family.len(),
                        inner.len()
                    )));
                }
                inner.iter().try_for_each(OperatorExpr::validate)
            }
            OperatorExpr::MeasurePreserve { exchange } => exchange.validate(),
            OperatorExpr::DiscreteMatrix { matrix, grid } => {
                Grid::new(grid.width, grid.cells)?;
                matrix.validate()?;
                if matrix.n() != grid.cells {
                    return Err(OperatorError::InvalidNode(format!(
                        "{}x{} matrix on a {}-cell grid",
                        matrix.n(),
                        matrix.n(),
                        grid.cells
                    )));
                }
                Ok(())
            }
            OperatorExpr::Permutation { perm, grid } => {
                Grid::new(grid.width, grid.cells)?;
                if perm.len() != grid.cells {
                    return Err(OperatorError::InvalidNode(
                        "permutation length differs from the grid".into(),
                    ));
                }
                check_permutation(perm)
            }
            OperatorExpr::CirculantKernel { weights, grid } => {
                Grid::new(grid.width, grid.cells)?;
                if weights.is_empty() || weights.len() > grid.cells {
                    return Err(OperatorError::InvalidNode(
                        "kernel needs between 1 and grid-size weights".into(),
                    ));
                }
                check_weights(weights, true)
            }
            OperatorExpr::ConvexCombine { children, weights } => {
                if children.len() != weights.len() {
                    return Err(OperatorError::InvalidNode(
                        "one weight per child is required".into(),
                    ));
                }
                check_weights(weights, false)?;
                children.iter().try_for_each(OperatorExpr::validate)
            }
            OperatorExpr::Compose { children } => {
                children.iter().try_for_each(OperatorExpr::validate)
            }
            OperatorExpr::FiniteRankTruncate {
                family,
                horizon,
                rank,
                ..
            } => {
                if *rank > family.len() {
                    return Err(OperatorError::RankExceedsCells {
                        rank: *rank,
                        cells: family.len(),
                    });
                }
                match horizon {
                    Some(h) if h.is_nan() || *h < 0.0 => Err(OperatorError::InvalidNode(
                        "horizon must be nonnegative".into(),
                    )),
                    _ => Ok(()),
                }
            }
        }
    }

    pub fn apply(&self, x: &StepFunction) -> Result<StepFunction> {
        let space = x.space();
        match self {
            OperatorExpr::Identity => Ok(x.clone()),
            OperatorExpr::PartitionAverage {
                family,
                keep_residual,
            } => {
                let residual = keep_residual.then_some(f64::INFINITY);
                partition_apply(x, family, family.len(), residual)
            }
            OperatorExpr::FiniteRankTruncate {
                family,
                keep_residual,
                horizon,
                rank,
            } => {
                let residual = keep_residual.then_some(horizon.unwrap_or(f64::INFINITY));
                partition_apply(x, family, (*rank).min(family.len()), residual)
            }
            OperatorExpr::DisjointFamilyCombine { family, inner } => {
                family.check_domain(space)?;
                if family.len() != inner.len() {
                    return Err(OperatorError::InvalidNode(
                        "inner operator count differs from cell count".into(),
                    ));
                }
                let mut pieces = Vec::new();
                for (&(a, b), op) in family.cells().iter().zip(inner) {
                    let local = StepFunction::from_pieces(space, x.pieces_within(a, b), 0.0)?;
                    let image = op.apply(&local)?;
                    pieces.extend(image.pieces_within(a, b));
                }
                assemble(x, pieces, &family.residual(space.alpha()))
            }
            OperatorExpr::MeasurePreserve { exchange } => {
                let span = exchange.span();
                if space.is_finite() && span > 1.0 {
                    return Err(OperatorError::OutsideDomain(span));
                }
                let mut pieces = Vec::new();
                for (i, &src) in exchange.perm.iter().enumerate() {
                    let (s0, s1) = (exchange.bound(src), exchange.bound(src + 1));
                    let (d0, d1) = (exchange.bound(i), exchange.bound(i + 1));
                    for (lo, hi, v) in x.pieces_within(s0, s1) {
                        let a = if lo == s0 { d0 } else { (lo - s0 + d0).min(d1) };
                        let b = if hi == s1 { d1 } else { (hi - s0 + d0).min(d1) };
                        if b > a {
                            pieces.push((a, b, v));
                        }
                    }
                }
                let gaps = [(0.0, exchange.origin), (span, space.alpha())];
                assemble(x, pieces, &gaps)
            }
            OperatorExpr::DiscreteMatrix { matrix, grid } => {
                grid_apply(x, grid, |cells| matrix.apply(cells))
            }
            OperatorExpr::Permutation { perm, grid } => {
                grid_apply(x, grid, |cells| perm.iter().map(|&p| cells[p]).collect())
            }
            OperatorExpr::CirculantKernel { weights, grid } => grid_apply(x, grid, |cells| {
                let n = cells.len();
                (0..n)
                    .map(|i| {
                        weights
                            .iter()
                            .enumerate()
                            .map(|(j, w)| w * cells[(i + n - j) % n])
                            .sum()
                    })
                    .collect()
            }),
            OperatorExpr::ConvexCombine { children, weights } => {
                let mut acc = StepFunction::zero(space);
                for (op, &w) in children.iter().zip(weights) {
                    acc = acc.add(&op.apply(x)?.scale(w)?)?;
                }
                Ok(acc)
            }
            OperatorExpr::Compose { children } => {
                let mut cur = x.clone();
                for op in children.iter().rev() {
                    cur = op.apply(&cur)?;
                }
                Ok(cur)
            }
        }
    }
}

/// Averages over the first `rank` cells; the residual `Ω` passes through on
/// `[0, limit)` when `residual_limit` is set and is dropped otherwise.
fn partition_apply(
    x: &StepFunction,
    family: &PartitionFamily,
    rank: usize,
    residual_limit: Option<f64>,
) -> Result<StepFunction> {
    family.check_domain(x.space())?;
    let mut pieces: Vec<(f64, f64, f64)> = family.cells()[..rank]
        .iter()
        .map(|&(a, b)| (a, b, x.integral_over(a, b) / (b - a)))
        .collect();
    let gaps: Vec<(f64, f64)> = match residual_limit {
        Some(limit) => family
            .residual(x.space().alpha())
            .into_iter()
            .map(|(a, b)| (a, b.min(limit)))
            .filter(|&(a, b)| b > a)
            .collect(),
        None => Vec::new(),
    };
    if residual_limit.is_none() {
        pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
        return Ok(StepFunction::from_pieces(x.space(), pieces, 0.0)?);
    }
    assemble(x, pieces, &gaps)
}

/// Applies a cell-vector map on the grid; `x` passes through beyond it.
fn grid_apply(
    x: &StepFunction,
    grid: &Grid,
    f: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<StepFunction> {
    let span = grid.span();
    if x.space().is_finite() && span > 1.0 + 1e-12 {
        return Err(OperatorError::OutsideDomain(span));
    }
    if !x.is_aligned(grid.width, span) {
        return Err(OperatorError::Misaligned { width: grid.width });
    }
    let out = f(&x.cell_values(grid.width, grid.cells));
    let pieces = out
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let (a, b) = grid.cell(k);
            (a, b, v)
        })
        .collect();
    assemble(x, pieces, &[(span, x.space().alpha())])
}

/// Combines computed `pieces` with the parts of `x` on the pass-through
/// `gaps`, carrying the tail of `x` when a gap is unbounded.
fn assemble(
    x: &StepFunction,
    mut pieces: Vec<(f64, f64, f64)>,
    gaps: &[(f64, f64)],
) -> Result<StepFunction> {
    let mut tail = 0.0;
    let mut tail_from = None;
    for &(a, b) in gaps {
        if b <= a {
            continue;
        }
        if b.is_infinite() {
            let end = x.last_breakpoint().max(a);
            pieces.extend(x.pieces_within(a, end));
            tail = x.tail();
            tail_from = Some(end);
        } else {
            pieces.extend(x.pieces_within(a, b));
        }
    }
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    if let (Some(end), true) = (tail_from, tail != 0.0) {
        let reached = pieces.last().map_or(0.0, |p| p.1);
        if reached < end {
            pieces.push((reached, end, 0.0));
        }
    }
    Ok(StepFunction::from_pieces(x.space(), pieces, tail)?.with_linf_only(x.is_linf_only()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubstochasticCheck {
    Majorization,
    L1Contraction,
    LInfContraction,
    Positivity,
    Apply,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFailure {
    pub probe: usize,
    pub check: SubstochasticCheck,
    pub excess: f64,
    pub witness_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstochasticCertificate {
    pub passed: bool,
    pub probes: usize,
    /// Smallest `F_x − F_{Tx}` over all probes and profile nodes.
    pub margin: f64,
    pub failures: Vec<ProbeFailure>,
}

/// Checks `Tx ≺ x`, the `L¹` and `L∞` contractions and positivity on every
/// probe. Failures are collected, never raised.
pub fn certify_substochastic(
    op: &OperatorExpr,
    probes: &[StepFunction],
    tol: f64,
) -> Result<SubstochasticCertificate> {
    if probes.is_empty() {
        return Err(OperatorError::NoProbes);
    }
    let mut failures = Vec::new();
    let mut margin = f64::INFINITY;
    for (idx, x) in probes.iter().enumerate() {
        let fail = |check, excess, witness_t, message| ProbeFailure {
            probe: idx,
            check,
            excess,
            witness_t,
            message,
        };
        let tx = match op.apply(x) {
            Ok(tx) => tx,
            Err(e) => {
                failures.push(fail(
                    SubstochasticCheck::Apply,
                    f64::NAN,
                    None,
                    Some(e.to_string()),
                ));
                continue;
            }
        };
        match hlp_leq(&tx, x, tol) {
            Ok(cert) => {
                margin = margin.min(cert.margin);
                if !cert.holds {
                    failures.push(fail(
                        SubstochasticCheck::Majorization,
                        -cert.margin,
                        cert.witness_t,
                        None,
                    ));
                }
            }
            Err(e) => failures.push(fail(
                SubstochasticCheck::Majorization,
                f64::NAN,
                None,
                Some(e.to_string()),
            )),
        }
        let (l1_in, l1_out) = (x.l1_norm(), tx.l1_norm());
        if l1_in.is_finite() && l1_out > l1_in + tol {
            failures.push(fail(
                SubstochasticCheck::L1Contraction,
                l1_out - l1_in,
                None,
                None,
            ));
        }
        let (sup_in, sup_out) = (x.sup_abs(), tx.sup_abs());
        if sup_out > sup_in + tol {
            failures.push(fail(
                SubstochasticCheck::LInfContraction,
                sup_out - sup_in,
                None,
                None,
            ));
        }
        if x.is_nonnegative() && tx.inf_value() < -tol {
            failures.push(fail(
                SubstochasticCheck::Positivity,
                -tx.inf_value(),
                None,
                None,
            ));
        }
    }
    Ok(SubstochasticCertificate {
        passed: failures.is_empty(),
        probes: probes.len(),
        margin,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    /// Keeps the residual term.
    Sn,
    /// Drops the residual term.
    Hn,
}

/// Source of the families `𝒜_1, 𝒜_2, …` used by the averaging sequences.
pub trait PartitionGenerator {
    fn family(&self, level: usize) -> Result<PartitionFamily>;
}

/// Level `n`: cells of width `2^{-n}` covering `[0, min(2^n, α))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGenerator {
    pub space: MeasureSpace,
}

impl DyadicGenerator {
    pub fn width(level: usize) -> f64 {
        2f64.powi(-(level as i32))
    }

    pub fn extent(&self, level: usize) -> f64 {
        2f64.powi(level as i32).min(self.space.alpha())
    }
}

impl PartitionGenerator for DyadicGenerator {
    fn family(&self, level: usize) -> Result<PartitionFamily> {
        let width = Self::width(level);
        let cells = self.extent(level) / width;
        if cells > MAX_CELLS as f64 {
            return Err(OperatorError::TooManyCells(cells as usize));
        }
        PartitionFamily::uniform(width, cells as usize)
    }
}

/// `S_1..S_levels` (or `H_1..H_levels`) built from the generator, with the
/// refinement chain checked and recorded.
pub fn build_partition_sequence(
    kind: SequenceKind,
    levels: usize,
    generator: &dyn PartitionGenerator,
) -> Result<Vec<OperatorExpr>> {
    let mut out = Vec::with_capacity(levels);
    let mut prev: Option<PartitionFamily> = None;
    for level in 1..=levels {
        let mut family = generator.family(level)?;
        if let Some(parent) = prev.take() {
            family = family
                .with_parent(parent)
                .map_err(|_| OperatorError::Refinement { level })?;
        }
        prev = Some(PartitionFamily {
            cells: family.cells.clone(),
            parent: None,
        });
        out.push(OperatorExpr::average(family, kind == SequenceKind::Sn));
    }
    Ok(out)
}

/// `T_n x = x χ_{Ω ∩ [0, horizon)} + Σ_{j < rank} (avg_{E_j} x) χ_{E_j}`.
pub fn finite_rank_truncate(
    base: &OperatorExpr,
    horizon: Option<f64>,
    rank: usize,
) -> Result<OperatorExpr> {
    let OperatorExpr::PartitionAverage {
        family,
        keep_residual,
    } = base
    else {
        return Err(OperatorError::NotPartitionAverage);
    };
    let op = OperatorExpr::FiniteRankTruncate {
        family: family.clone(),
        keep_residual: *keep_residual,
        horizon,
        rank,
    };
    op.validate()?;
    Ok(op)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub k: usize,
    pub norm: f64,
    /// `‖(A^k x)* − (A^{k−1} x)*‖`.
    pub delta_norm: f64,
    pub chain_ok: bool,
    #[serde(skip)]
    pub chain_margin: f64,
    /// `μ{|(A^k x)* − y*| > 1e-6}`.
    #[serde(skip)]
    pub measure_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    /// The last iterate `A^K x`.
    pub limit: StepFunction,
    pub limit_star: StepFunction,
    /// Index after which the rearrangements stopped moving.
    pub stabilized_at: Option<usize>,
    pub limit_majorized: bool,
}

/// Threshold used by the measure-convergence probe.
pub const MEASURE_GAP_EPS: f64 = 1e-6;

impl Trajectory {
    /// CSV with columns `k,norm,delta_norm,chain_ok`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "norm", "delta_norm", "chain_ok"])
            .expect("writing to memory");
        for s in &self.steps {
            w.write_record([
                s.k.to_string(),
                s.norm.to_string(),
                s.delta_norm.to_string(),
                s.chain_ok.to_string(),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii output")
    }
}

/// Iterates `A` from `x`, verifying `A^{k+1} x ≺ A^k x` at every step, until
/// the rearrangements move by less than `stop_tol` in `spec` or `n_max`
/// steps have been taken.
pub fn power_iterate(
    a: &OperatorExpr,
    x: &StepFunction,
    n_max: usize,
    stop_tol: f64,
    spec: &NormSpec,
) -> Result<Trajectory> {
    if !x.is_nonnegative() {
        return Err(OperatorError::NegativeInput);
    }
    let mut cur = x.clone();
    let mut cur_star = x.rearrange()?;
    let mut steps = Vec::new();
    let mut stabilized_at = None;
    for k in 1..=n_max {
        let next = a.apply(&cur)?;
        let cert = hlp_leq(&next, &cur, DEFAULT_TOL)?;
        if !cert.holds {
            return Err(OperatorError::ChainViolation {
                k,
                witness_t: cert.witness_t.unwrap_or(f64::NAN),
                margin: cert.margin,
            });
        }
        let next_star = next.rearrange()?;
        let delta = norm(spec, &next_star.sub(&cur_star)?)?;
        steps.push(TrajectoryStep {
            k,
            norm: norm(spec, &next)?,
            delta_norm: delta,
            chain_ok: true,
            chain_margin: cert.margin,
            measure_gap: 0.0,
        });
        cur = next;
        cur_star = next_star;
        if delta < stop_tol {
            stabilized_at = Some(k - 1);
            break;
        }
    }
    // Second pass: the limit is only known now.
    let mut probe = x.clone();
    for step in steps.iter_mut() {
        probe = a.apply(&probe)?;
        let gap = probe.rearrange()?.sub(&cur_star)?;
        step.measure_gap = gap.distribution(MEASURE_GAP_EPS);
    }
    let limit_majorized = hlp_leq(&cur, x, DEFAULT_TOL)?.holds;
    Ok(Trajectory {
        steps,
        limit: cur,
        limit_star: cur_star,
        stabilized_at,
        limit_majorized,
    })
}
