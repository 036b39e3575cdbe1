//! The Hardy–Littlewood–Pólya relation and its realization by doubly
//! (sub)stochastic matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{MeasureError, StepFunction};
use crate::operators::{Grid, OperatorExpr};

/// Absolute tolerance on profile values used by certification pipelines.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Slack allowed on row and column sums of a [`TransferMatrix`].
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajorizationError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("entries must be finite")]
    NonFinite,
    #[error("partial sum {index} of the target exceeds that of the source")]
    NotMajorized { index: usize },
    #[error("unequal totals need nonnegative vectors")]
    NegativeEntries,
    #[error("functions must be nonnegative")]
    NegativeValues,
    #[error("f is not majorized by g: F_f({witness_t}) exceeds F_g by {excess}")]
    Precondition { witness_t: f64, excess: f64 },
    #[error("breakpoints are not aligned with the grid of width {width}")]
    Misaligned { width: f64 },
    #[error("grid needs at least one cell")]
    EmptyGrid,
    #[error("functions with a nonzero tail on [0, inf) have no finite grid")]
    UnboundedSupport,
    #[error("invalid transfer matrix: {0}")]
    InvalidMatrix(String),
}

pub type Result<T> = std::result::Result<T, MajorizationError>;

/// Outcome of deciding `f ≺ g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationCertificate {
    pub holds: bool,
    pub witness_t: Option<f64>,
    /// Minimum of `F_g − F_f` over the probed abscissae; `-inf` when the
    /// eventual slope of `f*` exceeds that of `g*`.
    pub margin: f64,
}

/// Decides `F_f(t) ≤ F_g(t) + tol` for all `t > 0`.
///
/// Both profiles are concave and piecewise linear with `F(0) = 0`, so the
/// relation holds everywhere iff it holds at every node of either profile
/// and the eventual slope of `f*` does not exceed that of `g*`.
pub fn hlp_leq(f: &StepFunction, g: &StepFunction, tol: f64) -> Result<MajorizationCertificate> {
    if f.space() != g.space() {
        return Err(MeasureError::SpaceMismatch.into());
    }
    let pf = f.cumulative_profile()?;
    let pg = g.cumulative_profile()?;

    let mut abscissae: Vec<f64> = pf
        .nodes()
        .iter()
        .chain(pg.nodes())
        .map(|&(t, _)| t)
        .filter(|&t| t > 0.0)
        .collect();
    abscissae.sort_by(f64::total_cmp);
    abscissae.dedup();

    let mut margin = if abscissae.is_empty() {
        0.0
    } else {
        f64::INFINITY
    };
    let mut worst_t = None;
    for &t in &abscissae {
        let gap = pg.eval(t) - pf.eval(t);
        if gap < margin {
            margin = gap;
            worst_t = Some(t);
        }
    }
    if margin >= -tol && !f.space().is_finite() && pf.final_slope() > pg.final_slope() {
        // Violation appears past the last node once the slope gap eats the slack.
        let last = abscissae.last().copied().unwrap_or(0.0);
        let gap = pg.eval(last) - pf.eval(last);
        let crossing = last + (gap + tol) / (pf.final_slope() - pg.final_slope());
        return Ok(MajorizationCertificate {
            holds: false,
            witness_t: Some(crossing + 1.0),
            margin: f64::NEG_INFINITY,
        });
    }
    let holds = margin >= -tol;
    Ok(MajorizationCertificate {
        holds,
        witness_t: if holds { None } else { worst_t },
        margin,
    })
}

/// Whether the descending-sort partial sums of `g` dominate those of `f`
/// (weak majorization). Returns the first violating index.
pub fn sorted_partial_sum_violation(f: &[f64], g: &[f64], tol: f64) -> Option<usize> {
    let (fs, gs) = (sorted_desc(f), sorted_desc(g));
    let (mut sf, mut sg) = (0.0, 0.0);
    for k in 0..fs.len().max(gs.len()) {
        sf += fs.get(k).copied().unwrap_or(0.0);
        sg += gs.get(k).copied().unwrap_or(0.0);
        if sf > sg + tol {
            return Some(k);
        }
    }
    None
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Descending argsort, stable.
fn order_desc(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[j].total_cmp(&v[i]));
    idx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferKind {
    #[serde(rename = "ds")]
    DoublyStochastic,
    #[serde(rename = "dss")]
    DoublySubstochastic,
}

/// A nonnegative square matrix with row and column sums at most one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransferMatrixRepr")]
pub struct TransferMatrix {
    n: usize,
    rows: Vec<Vec<f64>>,
    kind: TransferKind,
}

#[derive(Deserialize)]
struct TransferMatrixRepr {
    n: usize,
    rows: Vec<Vec<f64>>,
    kind: TransferKind,
}

impl TryFrom<TransferMatrixRepr> for TransferMatrix {
    type Error = MajorizationError;

    fn try_from(r: TransferMatrixRepr) -> Result<Self> {
        TransferMatrix::new(r.rows, r.kind).and_then(|m| {
            if m.n == r.n {
                Ok(m)
            } else {
                Err(MajorizationError::InvalidMatrix(format!(
                    "declared n = {} but {} rows given",
                    r.n, m.n
                )))
            }
        })
    }
}

impl TransferMatrix {
    pub fn new(rows: Vec<Vec<f64>>, kind: TransferKind) -> Result<Self> {
        let n = rows.len();
        let m = TransferMatrix { n, rows, kind };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        TransferMatrix {
            n,
            rows,
            kind: TransferKind::DoublyStochastic,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn kind(&self) -> TransferKind {
        self.kind
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| self.rows.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MajorizationError::InvalidMatrix(msg));
        if self.rows.iter().any(|r| r.len() != self.n) {
            return bad("matrix is not square".into());
        }
        if self
            .rows
            .iter()
            .flatten()
            .any(|&v| !v.is_finite() || v < 0.0)
        {
            return bad("entries must be finite and nonnegative".into());
        }
        for (what, sums) in [("row", self.row_sums()), ("column", self.col_sums())] {
            for (i, s) in sums.into_iter().enumerate() {
                if s > 1.0 + SUM_TOL {
                    return bad(format!("{what} {i} sums to {s}"));
                }
                if self.kind == TransferKind::DoublyStochastic && (s - 1.0).abs() > SUM_TOL {
                    return bad(format!("{what} {i} sums to {s}, expected 1"));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// A transfer matrix together with the number of T-transforms used.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub matrix: TransferMatrix,
    pub transforms: usize,
}

/// Builds `D` with `D g = f` from T-transforms, using the default tolerance.
pub fn construct_doubly_stochastic(f: &[f64], g: &[f64]) -> Result<Transfer> {
    let scale = g.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    construct_doubly_stochastic_with_tol(f, g, 1e-12 * scale)
}

/// Builds a doubly (sub)stochastic `D` with `D g = f`.
///
/// Works in descending-sorted coordinates: while the sorted source `a`
/// differs from the sorted target `b`, pick the first `k` with `a_k < b_k`
/// and the last `j < k` with `a_j > b_j`, and move `δ = min(a_j − b_j,
/// b_k − a_k)` from `j` to `k` with a T-transform. Each step settles one
/// coordinate, so at most `n − 1` transforms are used. When
/// `Σf < Σg` (nonnegative inputs) the target is first raised by
/// water-filling to a vector `c ≥ b` with `Σc = Σa`, and the rows are
/// shrunk by `b_i / c_i` afterwards.
pub fn construct_doubly_stochastic_with_tol(f: &[f64], g: &[f64], tol: f64) -> Result<Transfer> {
    if f.len() != g.len() {
        return Err(MajorizationError::LengthMismatch(f.len(), g.len()));
    }
    if f.iter().chain(g).any(|v| !v.is_finite()) {
        return Err(MajorizationError::NonFinite);
    }
    let n = f.len();
    let order_g = order_desc(g);
    let order_f = order_desc(f);
    let a: Vec<f64> = order_g.iter().map(|&i| g[i]).collect();
    let b: Vec<f64> = order_f.iter().map(|&i| f[i]).collect();

    let (mut sa, mut sb) = (0.0, 0.0);
    for k in 0..n {
        sa += a[k];
        sb += b[k];
        if sb > sa + tol {
            return Err(MajorizationError::NotMajorized { index: k });
        }
    }
    let weak = sa - sb > tol;
    if weak && f.iter().chain(g).any(|&v| v < 0.0) {
        return Err(MajorizationError::NegativeEntries);
    }
    let target = if weak { water_fill(&b, sa) } else { b.clone() };

    let mut m: Vec<Vec<f64>> = TransferMatrix::identity(n).rows;
    let mut cur = a;
    let mut transforms = 0;
    for _ in 0..n {
        // Strict comparisons: `tol` only governs acceptance, and every step
        // settles a coordinate exactly. Rounding can leave a deficit of a
        // few ulps with no surplus before it, so take the first deficit
        // that has one.
        let mut last_surplus = None;
        let mut pair = None;
        for i in 0..n {
            if cur[i] > target[i] {
                last_surplus = Some(i);
            } else if cur[i] < target[i] {
                if let Some(j) = last_surplus {
                    pair = Some((j, i));
                    break;
                }
            }
        }
        let Some((j, k)) = pair else {
            break;
        };
        let surplus = cur[j] - target[j];
        let deficit = target[k] - cur[k];
        let delta = surplus.min(deficit);
        let s = delta / (cur[j] - cur[k]);
        let (head, tail) = m.split_at_mut(k);
        for (pj, pk) in head[j].iter_mut().zip(tail[0].iter_mut()) {
            let (rj, rk) = (*pj, *pk);
            *pj = (1.0 - s) * rj + s * rk;
            *pk = s * rj + (1.0 - s) * rk;
        }
        if surplus <= deficit {
            cur[j] = target[j];
            cur[k] += delta;
        } else {
            cur[k] = target[k];
            cur[j] -= delta;
        }
        transforms += 1;
    }
    if weak {
        for (i, row) in m.iter_mut().enumerate() {
            let shrink = if target[i] > 0.0 {
                b[i] / target[i]
            } else {
                0.0
            };
            row.iter_mut().for_each(|v| *v *= shrink);
        }
    }

    let mut rows = vec![vec![0.0; n]; n];
    for (i, &fi) in order_f.iter().enumerate() {
        for (j, &gj) in order_g.iter().enumerate() {
            rows[fi][gj] = m[i][j];
        }
    }
    let kind = if weak {
        TransferKind::DoublySubstochastic
    } else {
        TransferKind::DoublyStochastic
    };
    Ok(Transfer {
        matrix: TransferMatrix { n, rows, kind },
        transforms,
    })
}

/// Raises the smallest coordinates of the descending vector `b` to a common
/// level so the total becomes `total`; the result stays descending and is
/// majorized by any descending vector weakly majorizing `b` with that total.
fn water_fill(b: &[f64], total: f64) -> Vec<f64> {
    let n = b.len();
    let mut head: f64 = b.iter().sum();
    for r in (0..n).rev() {
        head -= b[r];
        let level = (total - head) / (n - r) as f64;
        if r == 0 || level <= b[r - 1] {
            let mut out = b[..r].to_vec();
            out.resize(n, level);
            return out;
        }
    }
    b.to_vec()
}

/// Realizes `f ≺ g` on a uniform grid by a doubly (sub)stochastic matrix
/// operator `T` with `T g = f`.
///
/// Both functions must be nonnegative and constant on the cells of the
/// grid with `grid_cells` cells covering `[0, L)`, where `L = 1` on the unit
/// interval and the larger support end otherwise.
pub fn calderon_ryff_discrete(
    f: &StepFunction,
    g: &StepFunction,
    grid_cells: usize,
) -> Result<OperatorExpr> {
    if f.space() != g.space() {
        return Err(MeasureError::SpaceMismatch.into());
    }
    if grid_cells == 0 {
        return Err(MajorizationError::EmptyGrid);
    }
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Err(MajorizationError::NegativeValues);
    }
    if f.tail() != 0.0 || g.tail() != 0.0 {
        return Err(MajorizationError::UnboundedSupport);
    }
    let cert = hlp_leq(f, g, DEFAULT_TOL)?;
    if !cert.holds {
        return Err(MajorizationError::Precondition {
            witness_t: cert.witness_t.unwrap_or(f64::NAN),
            excess: -cert.margin,
        });
    }
    let span = if f.space().is_finite() {
        1.0
    } else {
        let end = f.last_breakpoint().max(g.last_breakpoint());
        if end > 0.0 {
            end
        } else {
            1.0
        }
    };
    let width = span / grid_cells as f64;
    if !f.is_aligned(width, span) || !g.is_aligned(width, span) {
        return Err(MajorizationError::Misaligned { width });
    }
    let fv = f.cell_values(width, grid_cells);
    let gv = g.cell_values(width, grid_cells);
    let scale = gv.iter().sum::<f64>().max(1.0);
    let tol = (DEFAULT_TOL / width).max(1e-12 * scale);
    let transfer = construct_doubly_stochastic_with_tol(&fv, &gv, tol)?;
    Ok(OperatorExpr::DiscreteMatrix {
        matrix: transfer.matrix,
        grid: Grid::new(width, grid_cells).expect("positive width and cells"),
    })
}
