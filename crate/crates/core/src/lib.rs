//! Rearrangement-invariant function spaces over the couple `(L¹, L∞)`.
//!
//! The crate works with exact piecewise-constant representatives of
//! `x ∈ L¹ + L∞` on `[0, 1)` or `[0, ∞)` and provides:
//!
//! - [`measure`]: distribution functions, decreasing rearrangements, maximal
//!   functions and cumulative profiles;
//! - [`majorization`]: the Hardy–Littlewood–Pólya relation `f ≺ g` and
//!   doubly (sub)stochastic transfer matrices realizing it;
//! - [`spaces`]: symmetric norms (`L¹`, `L∞`, `L¹+L∞`, `Lᵖ`, Marcinkiewicz);
//! - [`operators`]: an algebra of substochastic operators with certification;
//! - [`interpolation`]: the K-functional, `K_{θ,q}` norms and probe-set
//!   operator-norm estimates;
//! - [`scenarios`]: reproducible convergence experiments emitting CSV/JSON.

// `!(t > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod interpolation;
pub mod majorization;
pub mod measure;
pub mod operators;
pub mod random;
pub mod scenarios;
pub mod spaces;

pub use measure::{CumulativeProfile, IntervalSet, MaximalFunction, MeasureSpace, StepFunction};
