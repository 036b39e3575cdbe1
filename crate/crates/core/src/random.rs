//! Seeded generators for probes, families, matrices and operator trees.
//!
//! All randomness flows from a `ChaCha8Rng` seeded with `seed_from_u64`, so
//! a given seed reproduces the same objects within this implementation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::majorization::{TransferKind, TransferMatrix};
use crate::measure::{MeasureSpace, StepFunction};
use crate::operators::{Grid, IntervalExchange, OperatorExpr, PartitionFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values are multiples of `1/64` in `[-max, max]` (or `[0, max]`), so sums
/// and averages over dyadic cells stay exact for a while.
pub fn dyadic_value(rng: &mut impl Rng, max: u32, signed: bool) -> f64 {
    let steps = 64 * max as i64;
    let k = if signed {
        rng.gen_range(-steps..=steps)
    } else {
        rng.gen_range(0..=steps)
    };
    k as f64 / 64.0
}

/// A step function constant on `cells` cells of width `width`; roughly a
/// third of the cells are zero.
pub fn grid_function(
    rng: &mut impl Rng,
    space: MeasureSpace,
    width: f64,
    cells: usize,
    signed: bool,
) -> StepFunction {
    let values: Vec<f64> = (0..cells)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                dyadic_value(rng, 8, signed)
            }
        })
        .collect();
    StepFunction::from_cells(space, width, &values).expect("grid functions are well formed")
}

/// Disjoint grid-aligned cells inside `[0, grid.span())` in shuffled order.
/// With `leave_gap`, at least one grid cell stays in the residual.
pub fn family(
    rng: &mut impl Rng,
    grid: &Grid,
    max_cells: usize,
    leave_gap: bool,
) -> PartitionFamily {
    let n = grid.cells;
    let mut cells = Vec::new();
    let mut k = 0;
    while k < n && cells.len() < max_cells {
        if rng.gen_bool(0.25) {
            k += 1;
            continue;
        }
        let len = rng.gen_range(1..=4.min(n - k));
        cells.push((k, k + len));
        k += len;
    }
    if leave_gap && cells.iter().map(|c| c.1 - c.0).sum::<usize>() == n {
        // Everything covered: give the last cell's final grid cell back.
        let last = cells.pop().expect("n > 0 implies a cell");
        if last.1 - last.0 > 1 {
            cells.push((last.0, last.1 - 1));
        }
    }
    if cells.is_empty() && n > 1 {
        cells.push((0, 1));
    }
    cells.shuffle(rng);
    let w = grid.width;
    PartitionFamily::new(
        cells
            .into_iter()
            .map(|(a, b)| (a as f64 * w, b as f64 * w))
            .collect(),
    )
    .expect("disjoint grid cells")
}

/// `Σ λ_i P_i` over random permutation matrices with `Σ λ_i = total ≤ 1`.
pub fn doubly_substochastic(rng: &mut impl Rng, n: usize, total: f64) -> TransferMatrix {
    let terms = rng.gen_range(1..=4);
    let mut lambdas: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = lambdas.iter().sum();
    lambdas.iter_mut().for_each(|l| *l *= total / sum);
    let mut rows = vec![vec![0.0; n]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for l in lambdas {
        perm.shuffle(rng);
        for (i, &p) in perm.iter().enumerate() {
            rows[i][p] += l;
        }
    }
    // Rounding may push a sum a hair over one; rescale in that case.
    let worst = rows
        .iter()
        .map(|r| r.iter().sum::<f64>())
        .chain((0..n).map(|j| rows.iter().map(|r| r[j]).sum::<f64>()))
        .fold(0.0, f64::max);
    if worst > 1.0 {
        rows.iter_mut().flatten().for_each(|v| *v /= worst);
    }
    TransferMatrix::new(rows, TransferKind::DoublySubstochastic).expect("valid by construction")
}

/// A pair `(f, g)` with `f ≺ g` in the vector sense: `f = D g` for a random
/// doubly stochastic `D`, or a substochastic one on nonnegative `g`.
pub fn majorizing_pair(rng: &mut impl Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let weak = rng.gen_bool(0.2);
    let g: Vec<f64> = (0..n).map(|_| dyadic_value(rng, 8, !weak)).collect();
    let total = if weak { rng.gen_range(0.2..1.0) } else { 1.0 };
    let d = doubly_substochastic(rng, n, total);
    (d.apply(&g), g)
}

fn probability_weights(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let raw: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=16)).collect();
    let total: u32 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|&r| r as f64 / total as f64).collect();
    let drift: f64 = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

fn convex_weights(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let total = rng.gen_range(0.5..=1.0);
    probability_weights(rng, len)
        .into_iter()
        .map(|w| w * total * (1.0 - 1e-15))
        .collect()
}

/// A random leaf on `grid`.
pub fn leaf(rng: &mut impl Rng, grid: &Grid, kind: usize) -> OperatorExpr {
    let n = grid.cells;
    match kind % 8 {
        0 => OperatorExpr::Identity,
        1 => {
            let (gap, keep) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
            OperatorExpr::average(family(rng, grid, 16, gap), keep)
        }
        2 => {
            let blocks = [1, 2, 4, 8][rng.gen_range(0..4)].min(n);
            let block_cells = n / blocks / rng.gen_range(1..=2).min(n / blocks).max(1);
            let max_origin = n - blocks * block_cells;
            let origin = rng.gen_range(0..=max_origin);
            let mut perm: Vec<usize> = (0..blocks).collect();
            perm.shuffle(rng);
            OperatorExpr::MeasurePreserve {
                exchange: IntervalExchange::new(
                    origin as f64 * grid.width,
                    block_cells as f64 * grid.width,
                    perm,
                )
                .expect("valid exchange"),
            }
        }
        3 => {
            let total = rng.gen_range(0.3..=1.0);
            OperatorExpr::DiscreteMatrix {
                matrix: doubly_substochastic(rng, n, total),
                grid: *grid,
            }
        }
        4 => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            OperatorExpr::Permutation { perm, grid: *grid }
        }
        5 => {
            let len = rng.gen_range(1..=4.min(n));
            OperatorExpr::CirculantKernel {
                weights: probability_weights(rng, len),
                grid: *grid,
            }
        }
        6 => {
            let fam = family(rng, grid, 16, false);
            let rank = rng.gen_range(0..=fam.len());
            let horizon = if rng.gen_bool(0.5) {
                None
            } else {
                Some(rng.gen_range(0..=n) as f64 * grid.width)
            };
            OperatorExpr::FiniteRankTruncate {
                family: fam,
                keep_residual: rng.gen_bool(0.5),
                horizon,
                rank,
            }
        }
        _ => OperatorExpr::circulant(vec![0.5, 0.5], *grid).expect("valid kernel"),
    }
}

/// A random tree of depth at most `depth` whose grid nodes all live on
/// `grid`, so grid-aligned probes stay aligned through every node.
pub fn operator(rng: &mut impl Rng, grid: &Grid, depth: usize) -> OperatorExpr {
    if depth <= 1 || rng.gen_bool(0.4) {
        let kind = rng.gen_range(0..8);
        return leaf(rng, grid, kind);
    }
    let arity = rng.gen_range(1..=2);
    match rng.gen_range(0..3) {
        0 => {
            let children = (0..=arity)
                .map(|_| operator(rng, grid, depth - 1))
                .collect();
            OperatorExpr::ConvexCombine {
                weights: convex_weights(rng, arity + 1),
                children,
            }
        }
        1 => OperatorExpr::Compose {
            children: (0..=arity)
                .map(|_| operator(rng, grid, depth - 1))
                .collect(),
        },
        _ => {
            let fam = family(rng, grid, 3, true);
            let inner = (0..fam.len())
                .map(|_| operator(rng, grid, depth - 1))
                .collect();
            OperatorExpr::DisjointFamilyCombine { family: fam, inner }
        }
    }
}
