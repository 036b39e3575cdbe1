//! The K-functional of `(L¹, L∞)`, the `Φ_{θ,q}` functional and probe-set
//! operator-norm estimates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{CumulativeProfile, MeasureError, StepFunction};
use crate::operators::{OperatorError, OperatorExpr};
use crate::spaces::{norm, NormSpec, SpaceError};

/// Default relative tolerance of the adaptive quadrature.
pub const QUADRATURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpolationError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("t must be positive, got {0}")]
    NonPositive(f64),
    #[error("need theta in [0, 1] and q in [1, inf], got theta = {theta}, q = {q}")]
    InvalidParameters { theta: f64, q: f64 },
    #[error("no probes given")]
    NoProbes,
    #[error("probe {index} has zero or infinite norm in the source space")]
    DegenerateProbe { index: usize },
}

pub type Result<T> = std::result::Result<T, InterpolationError>;

/// `K(t, x) = inf_{x = x₀ + x₁} ‖x₀‖₁ + t‖x₁‖∞ = ∫₀ᵗ x*`.
pub fn k_functional(t: f64, x: &StepFunction) -> Result<f64> {
    if !(t > 0.0) {
        return Err(InterpolationError::NonPositive(t));
    }
    Ok(x.cumulative_profile()?.eval(t))
}

/// `t ↦ K(t, x)`, stored as the cumulative profile of `x*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KProfile {
    pub profile: CumulativeProfile,
}

impl KProfile {
    pub fn of(x: &StepFunction) -> Result<Self> {
        Ok(KProfile {
            profile: x.cumulative_profile()?,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }

    pub fn is_zero(&self) -> bool {
        self.profile.nodes().len() == 1 && self.profile.final_slope() == 0.0
    }

    /// `(t, K)` node rows with a header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "K"]).expect("writing to memory");
        for &(t, k) in self.profile.nodes() {
            w.write_record([t.to_string(), k.to_string()])
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii output")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergentEnd {
    Zero,
    Infinity,
}

/// Value of `Φ_{θ,q}`; infinite values say which end diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaQValue {
    pub value: f64,
    pub divergent_at: Option<DivergentEnd>,
}

impl ThetaQValue {
    fn finite(value: f64) -> Self {
        ThetaQValue {
            value,
            divergent_at: None,
        }
    }

    fn divergent(end: DivergentEnd) -> Self {
        ThetaQValue {
            value: f64::INFINITY,
            divergent_at: Some(end),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.divergent_at.is_none()
    }
}

/// `Φ_{θ,q}(K) = (∫₀^∞ (t^{-θ} K(t))^q dt/t)^{1/q}`, or `sup_t t^{-θ} K(t)`
/// for `q = ∞`.
pub fn phi_theta_q(profile: &KProfile, theta: f64, q: f64) -> Result<ThetaQValue> {
    phi_theta_q_with_tol(profile, theta, q, QUADRATURE_TOL)
}

pub fn phi_theta_q_with_tol(
    profile: &KProfile,
    theta: f64,
    q: f64,
    rel_tol: f64,
) -> Result<ThetaQValue> {
    if !(0.0..=1.0).contains(&theta) || !(q >= 1.0) {
        return Err(InterpolationError::InvalidParameters { theta, q });
    }
    if profile.is_zero() {
        return Ok(ThetaQValue::finite(0.0));
    }
    let nodes = profile.profile.nodes();
    let slopes = profile.profile.slopes();
    let c = profile.profile.final_slope();
    let (t_last, f_last) = profile.profile.last_node();

    if q.is_infinite() {
        return Ok(sup_norm(nodes, slopes[0], c, theta));
    }

    // Near 0, K(t) = s₀ t.
    if theta == 1.0 && slopes[0] > 0.0 {
        return Ok(ThetaQValue::divergent(DivergentEnd::Zero));
    }
    // Beyond the last node K grows like c t, or stays at F_last.
    if c > 0.0 || (theta == 0.0 && f_last > 0.0) {
        return Ok(ThetaQValue::divergent(DivergentEnd::Infinity));
    }

    let mut total = 0.0;
    for (k, w) in nodes.windows(2).enumerate() {
        let ((t0, f0), (t1, _)) = (w[0], w[1]);
        let b = slopes[k];
        let a = f0 - b * t0;
        total += piece_integral(a, b, t0, t1, theta, q, rel_tol);
    }
    if f_last > 0.0 {
        total += f_last.powf(q) * t_last.powf(-theta * q) / (theta * q);
    }
    Ok(ThetaQValue::finite(total.powf(1.0 / q)))
}

/// `sup_t t^{-θ} K(t)`. On each linear piece `a t^{-θ} + b t^{1-θ}` has only
/// an interior minimum, so nodes and the two limits suffice.
fn sup_norm(nodes: &[(f64, f64)], first_slope: f64, c: f64, theta: f64) -> ThetaQValue {
    let mut best: f64 = 0.0;
    for &(t, f) in &nodes[1..] {
        best = best.max(t.powf(-theta) * f);
    }
    if theta == 1.0 {
        best = best.max(first_slope);
    }
    let f_last = nodes[nodes.len() - 1].1;
    if c > 0.0 {
        if theta < 1.0 {
            return ThetaQValue::divergent(DivergentEnd::Infinity);
        }
        best = best.max(c);
    } else if theta == 0.0 {
        best = best.max(f_last);
    }
    ThetaQValue::finite(best)
}

/// `∫_{t0}^{t1} ((a + b t) t^{-θ})^q dt / t`.
fn piece_integral(a: f64, b: f64, t0: f64, t1: f64, theta: f64, q: f64, rel_tol: f64) -> f64 {
    if a == 0.0 {
        return b.powf(q) * power_integral(q * (1.0 - theta) - 1.0, t0, t1);
    }
    if b == 0.0 {
        return a.powf(q) * power_integral(-theta * q - 1.0, t0, t1);
    }
    if q == 1.0 {
        return a * power_integral(-theta - 1.0, t0, t1) + b * power_integral(-theta, t0, t1);
    }
    if q == 2.0 {
        let e = -2.0 * theta - 1.0;
        return a * a * power_integral(e, t0, t1)
            + 2.0 * a * b * power_integral(e + 1.0, t0, t1)
            + b * b * power_integral(e + 2.0, t0, t1);
    }
    // Substituting t = e^u turns dt/t into du and smooths the integrand.
    let g = |u: f64| {
        let t = u.exp();
        ((a + b * t) * t.powf(-theta)).powf(q)
    };
    adaptive_simpson(&g, t0.ln(), t1.ln(), rel_tol)
}

/// `∫_{lo}^{hi} t^e dt` for `0 < lo < hi < ∞`.
fn power_integral(e: f64, lo: f64, hi: f64) -> f64 {
    if e == -1.0 {
        (hi / lo).ln()
    } else {
        (hi.powf(e + 1.0) - lo.powf(e + 1.0)) / (e + 1.0)
    }
}

fn adaptive_simpson(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        g: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (g(lm), g(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * eps {
            return left + right + diff / 15.0;
        }
        recurse(g, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + recurse(g, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
    let (fa, fm, fb) = (g(lo), g(0.5 * (lo + hi)), g(hi));
    let whole = simpson(fa, fm, fb, hi - lo);
    let eps = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    recurse(g, lo, hi, fa, fm, fb, whole, eps, 48)
}

/// `‖x‖_{θ,q} = Φ_{θ,q}(K(·, x))`.
pub fn k_theta_q_norm(x: &StepFunction, theta: f64, q: f64) -> Result<ThetaQValue> {
    phi_theta_q(&KProfile::of(x)?, theta, q)
}

/// How a function is measured in an operator-norm estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measurement {
    Norm {
        spec: NormSpec,
    },
    /// `K_{θ,q}`; an absent `q` means `∞`.
    KThetaQ {
        theta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
    },
}

impl Measurement {
    pub fn norm(spec: NormSpec) -> Self {
        Measurement::Norm { spec }
    }

    pub fn k_theta_q(theta: f64, q: f64) -> Self {
        Measurement::KThetaQ {
            theta,
            q: q.is_finite().then_some(q),
        }
    }

    pub fn measure(&self, x: &StepFunction) -> Result<f64> {
        match self {
            Measurement::Norm { spec } => Ok(norm(spec, x)?),
            Measurement::KThetaQ { theta, q } => {
                Ok(k_theta_q_norm(x, *theta, q.unwrap_or(f64::INFINITY))?.value)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
}

/// `max_probes ‖Tx‖_Y / ‖x‖_X`: a lower bound of the operator norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    pub value: f64,
    pub probes: usize,
    pub witness_id: Option<usize>,
    pub bound_kind: BoundKind,
}

/// Probe-set estimate of `‖T‖_{B(X, Y)}`.
pub fn operator_norm_estimate(
    op: &OperatorExpr,
    source: &Measurement,
    target: &Measurement,
    probes: &[StepFunction],
) -> Result<OperatorNormEstimate> {
    estimate_with(|x| Ok(op.apply(x)?), source, target, probes)
}

/// Probe-set estimate of `‖T − S‖_{B(X, Y)}`, with the difference taken at
/// the function level.
pub fn difference_norm_estimate(
    t: &OperatorExpr,
    s: &OperatorExpr,
    source: &Measurement,
    target: &Measurement,
    probes: &[StepFunction],
) -> Result<OperatorNormEstimate> {
    estimate_with(
        |x| Ok(t.apply(x)?.sub(&s.apply(x)?)?),
        source,
        target,
        probes,
    )
}

fn estimate_with(
    image: impl Fn(&StepFunction) -> Result<StepFunction>,
    source: &Measurement,
    target: &Measurement,
    probes: &[StepFunction],
) -> Result<OperatorNormEstimate> {
    if probes.is_empty() {
        return Err(InterpolationError::NoProbes);
    }
    let mut value = 0.0;
    let mut witness_id = None;
    for (index, x) in probes.iter().enumerate() {
        let denom = source.measure(x)?;
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(InterpolationError::DegenerateProbe { index });
        }
        let ratio = target.measure(&image(x)?)? / denom;
        if witness_id.is_none() || ratio > value {
            value = ratio;
            witness_id = Some(index);
        }
    }
    Ok(OperatorNormEstimate {
        value,
        probes: probes.len(),
        witness_id,
        bound_kind: BoundKind::Lower,
    })
}
