//! Symmetric-space norms over `L¹ + L∞`, fundamental functions and
//! quasiconcavity diagnostics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{MeasureError, MeasureSpace, StepFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("Lp needs p in (1, inf), got {0}")]
    InvalidExponent(f64),
    #[error("invalid quasiconcave function: {0}")]
    InvalidPhi(String),
    #[error("unknown norm variant {0:?}")]
    UnknownVariant(String),
    #[error("norm variant {variant} needs field {field:?}")]
    MissingField {
        variant: &'static str,
        field: &'static str,
    },
    #[error("argument must be positive, got {0}")]
    NonPositive(f64),
    #[error("need at least two probes, got {0}")]
    TooFewProbes(usize),
}

pub type Result<T> = std::result::Result<T, SpaceError>;

/// A quasiconcave function: `t^a`, or a table interpolated linearly from the
/// origin through its nodes and extended by its last value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
#[serde(try_from = "PhiRepr")]
pub enum QuasiconcavePhi {
    Power { a: f64 },
    Table { t: Vec<f64>, v: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
enum PhiRepr {
    Power { a: f64 },
    Table { t: Vec<f64>, v: Vec<f64> },
}

impl TryFrom<PhiRepr> for QuasiconcavePhi {
    type Error = SpaceError;

    fn try_from(r: PhiRepr) -> Result<Self> {
        match r {
            PhiRepr::Power { a } => QuasiconcavePhi::power(a),
            PhiRepr::Table { t, v } => QuasiconcavePhi::table(t, v),
        }
    }
}

impl QuasiconcavePhi {
    pub fn power(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(SpaceError::InvalidPhi(format!(
                "exponent {a} outside [0, 1]"
            )));
        }
        Ok(QuasiconcavePhi::Power { a })
    }

    /// Table form. Abscissae must be positive and strictly increasing and
    /// values positive; monotonicity of `φ` and `φ(t)/t` is checked by
    /// [`quasiconcave_check`], not here.
    pub fn table(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != v.len() {
            return Err(SpaceError::InvalidPhi(
                "table needs equally many abscissae and values".into(),
            ));
        }
        if t.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(SpaceError::InvalidPhi(
                "table entries must be finite".into(),
            ));
        }
        if t[0] <= 0.0 || t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SpaceError::InvalidPhi(
                "abscissae must be positive and strictly increasing".into(),
            ));
        }
        if v.iter().any(|&x| x <= 0.0) {
            return Err(SpaceError::InvalidPhi("values must be positive".into()));
        }
        Ok(QuasiconcavePhi::Table { t, v })
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            QuasiconcavePhi::Power { a } => {
                if s.is_infinite() {
                    return if *a > 0.0 { f64::INFINITY } else { 1.0 };
                }
                s.powf(*a)
            }
            QuasiconcavePhi::Table { t, v } => {
                let idx = t.partition_point(|&x| x <= s);
                if idx == t.len() {
                    return v[v.len() - 1];
                }
                let (t0, v0) = if idx == 0 {
                    (0.0, 0.0)
                } else {
                    (t[idx - 1], v[idx - 1])
                };
                if s == t0 {
                    return v0;
                }
                v0 + (v[idx] - v0) * ((s - t0) / (t[idx] - t0))
            }
        }
    }

    /// `lim_{t→0⁺} φ(t)`.
    pub fn at_zero(&self) -> f64 {
        match self {
            QuasiconcavePhi::Power { a } if *a == 0.0 => 1.0,
            _ => 0.0,
        }
    }

    /// `lim_{t→∞} φ(t)`.
    pub fn at_infinity(&self) -> f64 {
        self.eval(f64::INFINITY)
    }

    /// `lim_{t→∞} φ(t)/t`.
    pub fn slope_at_infinity(&self) -> f64 {
        match self {
            QuasiconcavePhi::Power { a } if *a == 1.0 => 1.0,
            _ => 0.0,
        }
    }

    /// Interior table nodes, empty for power forms.
    pub fn nodes(&self) -> &[f64] {
        match self {
            QuasiconcavePhi::Power { .. } => &[],
            QuasiconcavePhi::Table { t, .. } => t,
        }
    }

    /// `sup φ` over `[lo, hi]`; `hi` may be infinite.
    fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        let mut best = self.eval(lo).max(self.eval(hi));
        for &t in self.nodes() {
            if t > lo && t < hi {
                best = best.max(self.eval(t));
            }
        }
        best
    }

    /// Linear pieces `φ(t) = p + q t` on `[start, end]` between table nodes.
    fn linear_segments(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        if let QuasiconcavePhi::Table { t, v } = self {
            let mut prev = (0.0, 0.0);
            for (&ti, &vi) in t.iter().zip(v) {
                let q = (vi - prev.1) / (ti - prev.0);
                out.push((prev.0, ti, prev.1 - q * prev.0, q));
                prev = (ti, vi);
            }
        }
        out
    }
}

impl fmt::Display for QuasiconcavePhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuasiconcavePhi::Power { a } => write!(f, "t^{a}"),
            QuasiconcavePhi::Table { t, .. } => write!(f, "table[{}]", t.len()),
        }
    }
}

/// One of the implemented symmetric norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecRepr", into = "NormSpecRepr")]
pub enum NormSpec {
    L1,
    LInf,
    L1PlusLInf,
    Lp(f64),
    MarcinkiewiczStar(QuasiconcavePhi),
    Marcinkiewicz(QuasiconcavePhi),
}

#[derive(Serialize, Deserialize)]
struct NormSpecRepr {
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<QuasiconcavePhi>,
}

impl TryFrom<NormSpecRepr> for NormSpec {
    type Error = SpaceError;

    fn try_from(r: NormSpecRepr) -> Result<Self> {
        let phi = |variant| {
            r.phi.clone().ok_or(SpaceError::MissingField {
                variant,
                field: "phi",
            })
        };
        match r.variant.as_str() {
            "L1" => Ok(NormSpec::L1),
            "LInf" => Ok(NormSpec::LInf),
            "L1+LInf" => Ok(NormSpec::L1PlusLInf),
            "Lp" => NormSpec::lp(r.p.ok_or(SpaceError::MissingField {
                variant: "Lp",
                field: "p",
            })?),
            "Mstar" => Ok(NormSpec::MarcinkiewiczStar(phi("Mstar")?)),
            "M" => Ok(NormSpec::Marcinkiewicz(phi("M")?)),
            other => Err(SpaceError::UnknownVariant(other.to_string())),
        }
    }
}

impl From<NormSpec> for NormSpecRepr {
    fn from(s: NormSpec) -> Self {
        let (variant, p, phi) = match s {
            NormSpec::L1 => ("L1", None, None),
            NormSpec::LInf => ("LInf", None, None),
            NormSpec::L1PlusLInf => ("L1+LInf", None, None),
            NormSpec::Lp(p) => ("Lp", Some(p), None),
            NormSpec::MarcinkiewiczStar(phi) => ("Mstar", None, Some(phi)),
            NormSpec::Marcinkiewicz(phi) => ("M", None, Some(phi)),
        };
        NormSpecRepr {
            variant: variant.to_string(),
            p,
            phi,
        }
    }
}

impl NormSpec {
    pub fn lp(p: f64) -> Result<Self> {
        if p > 1.0 && p.is_finite() {
            Ok(NormSpec::Lp(p))
        } else {
            Err(SpaceError::InvalidExponent(p))
        }
    }

    /// Re-checks the variant invariants (useful after manual construction).
    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::Lp(p) => NormSpec::lp(*p).map(|_| ()),
            NormSpec::MarcinkiewiczStar(phi) | NormSpec::Marcinkiewicz(phi) => match phi {
                QuasiconcavePhi::Power { a } => QuasiconcavePhi::power(*a).map(|_| ()),
                QuasiconcavePhi::Table { t, v } => {
                    QuasiconcavePhi::table(t.clone(), v.clone()).map(|_| ())
                }
            },
            _ => Ok(()),
        }
    }

    /// All variants with a few representative parameters.
    pub fn catalogue() -> Vec<NormSpec> {
        vec![
            NormSpec::L1,
            NormSpec::LInf,
            NormSpec::L1PlusLInf,
            NormSpec::Lp(2.0),
            NormSpec::Lp(3.5),
            NormSpec::MarcinkiewiczStar(QuasiconcavePhi::Power { a: 0.5 }),
            NormSpec::MarcinkiewiczStar(QuasiconcavePhi::Power { a: 1.0 }),
            NormSpec::Marcinkiewicz(QuasiconcavePhi::Power { a: 0.5 }),
            NormSpec::Marcinkiewicz(QuasiconcavePhi::Power { a: 0.0 }),
            NormSpec::Marcinkiewicz(QuasiconcavePhi::Table {
                t: vec![0.5, 2.0, 8.0],
                v: vec![1.0, 2.0, 3.0],
            }),
        ]
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::L1 => write!(f, "L1"),
            NormSpec::LInf => write!(f, "LInf"),
            NormSpec::L1PlusLInf => write!(f, "L1+LInf"),
            NormSpec::Lp(p) => write!(f, "L{p}"),
            NormSpec::MarcinkiewiczStar(phi) => write!(f, "M*({phi})"),
            NormSpec::Marcinkiewicz(phi) => write!(f, "M({phi})"),
        }
    }
}

/// `‖x‖_E`. Every variant except `L∞` is evaluated on `x*`, so
/// `norm(x) == norm(x*)` holds bit for bit.
pub fn norm(spec: &NormSpec, x: &StepFunction) -> Result<f64> {
    let infinite_tail = x.has_tail_region() && x.tail() != 0.0;
    match spec {
        NormSpec::LInf => return Ok(x.sup_abs()),
        NormSpec::L1 | NormSpec::Lp(_) if infinite_tail => return Ok(f64::INFINITY),
        _ => {}
    }
    let star = x.rearrange()?;
    Ok(match spec {
        NormSpec::L1 => star.pieces().map(|(a, b, v)| v * (b - a)).sum(),
        NormSpec::LInf => unreachable!(),
        NormSpec::L1PlusLInf => star.cumulative_profile()?.eval(1.0),
        NormSpec::Lp(p) => star
            .pieces()
            .map(|(a, b, v)| v.powf(*p) * (b - a))
            .sum::<f64>()
            .powf(1.0 / p),
        NormSpec::MarcinkiewiczStar(phi) => marcinkiewicz_star(&star, phi),
        NormSpec::Marcinkiewicz(phi) => marcinkiewicz(&star, phi)?,
    })
}

/// `sup x*(t) φ(t)`: on each piece `x*` is constant and `φ` nondecreasing,
/// so the supremum sits at the right end (or at a table node inside).
fn marcinkiewicz_star(star: &StepFunction, phi: &QuasiconcavePhi) -> f64 {
    if star.is_zero() {
        return 0.0;
    }
    let mut best = star.sup_abs() * phi.at_zero();
    for (a, b, v) in star.pieces() {
        best = best.max(v * phi.sup_on(a, b));
    }
    if star.has_tail_region() && star.tail() != 0.0 {
        best = best.max(star.tail() * phi.sup_on(star.last_breakpoint(), star.space().alpha()));
    }
    best
}

/// `sup x**(t) φ(t)` with `x** = c + d/t` on each piece of `x*`.
///
/// For `φ = t^a` the product `c t^a + d t^{a−1}` has only an interior
/// minimum, so the supremum is at piece endpoints or at the limits. For
/// tables, each linear segment `p + q t` gives the extra critical point
/// `t = √(dp / cq)`.
fn marcinkiewicz(star: &StepFunction, phi: &QuasiconcavePhi) -> Result<f64> {
    if star.is_zero() {
        return Ok(0.0);
    }
    let alpha = star.space().alpha();
    let maximal = star.maximal_profile()?;
    let mut best = maximal.at_zero() * phi.at_zero();

    let mut candidates: Vec<f64> = star.breakpoints()[1..].to_vec();
    candidates.extend(phi.nodes().iter().copied().filter(|&t| t < alpha));
    if alpha.is_finite() {
        candidates.push(alpha);
    }
    let segments = phi.linear_segments();
    let pieces = maximal
        .pieces()
        .iter()
        .chain(std::iter::once(maximal.tail()));
    for piece in pieces {
        let (c, d) = (piece.constant, piece.coefficient);
        for &(lo, hi, p, q) in &segments {
            let (lo, hi) = (lo.max(piece.start), hi.min(piece.end).min(alpha));
            if c * q > 0.0 && d * p > 0.0 {
                let t = (d * p / (c * q)).sqrt();
                if t > lo && t < hi {
                    candidates.push(t);
                }
            }
        }
    }
    for t in candidates {
        best = best.max(maximal.eval(t)? * phi.eval(t));
    }
    if !alpha.is_finite() {
        let tail = maximal.tail();
        let at_inf = if tail.constant > 0.0 {
            tail.constant * phi.at_infinity()
        } else {
            0.0
        } + tail.coefficient * phi.slope_at_infinity();
        best = best.max(at_inf);
    }
    Ok(best)
}

/// `φ_E(t) = ‖χ_[0,t)‖_E`, evaluated on `[0, ∞)`.
pub fn fundamental_function(spec: &NormSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(SpaceError::NonPositive(t));
    }
    let chi = StepFunction::indicator(MeasureSpace::HalfLine, 0.0, t, 1.0)?;
    norm(spec, &chi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiconcaveCondition {
    Nondecreasing,
    RatioNonincreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiconcaveViolation {
    pub condition: QuasiconcaveCondition,
    pub t0: f64,
    pub t1: f64,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiconcaveReport {
    pub passed: bool,
    pub probes: usize,
    pub first_violation: Option<QuasiconcaveViolation>,
}

const PROBE_LO: f64 = 1e-6;
const PROBE_HI: f64 = 1e6;
const RELATIVE_SLACK: f64 = 1e-12;

/// Checks that `φ` is nondecreasing and `φ(t)/t` nonincreasing on a
/// geometric grid over `[1e-6, 1e6]` together with any table nodes there.
pub fn quasiconcave_check(phi: &QuasiconcavePhi, probes: usize) -> Result<QuasiconcaveReport> {
    if probes < 2 {
        return Err(SpaceError::TooFewProbes(probes));
    }
    let ratio = (PROBE_HI / PROBE_LO).powf(1.0 / (probes - 1) as f64);
    let mut ts: Vec<f64> = (0..probes)
        .map(|k| PROBE_LO * ratio.powi(k as i32))
        .collect();
    ts.extend(
        phi.nodes()
            .iter()
            .copied()
            .filter(|t| (PROBE_LO..=PROBE_HI).contains(t)),
    );
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let mut first_violation = None;
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (p0, p1) = (phi.eval(t0), phi.eval(t1));
        if p1 < p0 - RELATIVE_SLACK * p0.abs() {
            first_violation = Some(QuasiconcaveViolation {
                condition: QuasiconcaveCondition::Nondecreasing,
                t0,
                t1,
                before: p0,
                after: p1,
            });
            break;
        }
        let (r0, r1) = (p0 / t0, p1 / t1);
        if r1 > r0 + RELATIVE_SLACK * r0.abs() {
            first_violation = Some(QuasiconcaveViolation {
                condition: QuasiconcaveCondition::RatioNonincreasing,
                t0,
                t1,
                before: r0,
                after: r1,
            });
            break;
        }
    }
    Ok(QuasiconcaveReport {
        passed: first_violation.is_none(),
        probes: ts.len(),
        first_violation,
    })
}

/// Behaviour of `t / φ_E(t)` as `t → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "c", rename_all = "snake_case")]
pub enum LimitVerdict {
    Zero,
    Positive(f64),
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IukmLimit {
    pub verdict: LimitVerdict,
    /// Last probe value of `t / φ_E(t)` (the exact limit for analytic cases).
    pub estimate: f64,
    pub analytic: bool,
}

const LIMIT_PROBES: i32 = 40;
const LIMIT_STABLE: f64 = 1e-6;

/// `lim_{t→0⁺} t / φ_E(t)`. Power-type fundamental functions are resolved
/// analytically; tables are probed along `t = 2^{-k}`, `k = 1..40`.
pub fn iukm_limit(spec: &NormSpec) -> Result<IukmLimit> {
    let exponent = match spec {
        NormSpec::L1 | NormSpec::L1PlusLInf => Some(1.0),
        NormSpec::LInf => Some(0.0),
        NormSpec::Lp(p) => Some(1.0 / p),
        NormSpec::MarcinkiewiczStar(QuasiconcavePhi::Power { a })
        | NormSpec::Marcinkiewicz(QuasiconcavePhi::Power { a }) => Some(*a),
        _ => None,
    };
    if let Some(a) = exponent {
        let (verdict, estimate) = if a == 1.0 {
            (LimitVerdict::Positive(1.0), 1.0)
        } else {
            (LimitVerdict::Zero, 0.0)
        };
        return Ok(IukmLimit {
            verdict,
            estimate,
            analytic: true,
        });
    }
    let mut ratios = Vec::with_capacity(LIMIT_PROBES as usize);
    for k in 1..=LIMIT_PROBES {
        let t = 2f64.powi(-k);
        ratios.push(t / fundamental_function(spec, t)?);
    }
    let first = ratios[0];
    let last = ratios[ratios.len() - 1];
    let prev = ratios[ratios.len() - 2];
    let verdict = if last <= LIMIT_STABLE * first {
        LimitVerdict::Zero
    } else if (last - prev).abs() <= LIMIT_STABLE * prev.abs() {
        LimitVerdict::Positive(last)
    } else if last > prev {
        LimitVerdict::Divergent
    } else {
        LimitVerdict::Zero
    };
    Ok(IukmLimit {
        verdict,
        estimate: last,
        analytic: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blocks() -> StepFunction {
        StepFunction::from_cells(MeasureSpace::HalfLine, 1.0, &[3.0, 1.0]).unwrap()
    }

    #[test]
    fn l1_of_counterexample_difference() {
        for n in [1.0, 3.0, 16.0, 1000.0] {
            let x = StepFunction::indicator(MeasureSpace::Unit, 0.0, 1.0 / n, n).unwrap();
            let y =
                StepFunction::indicator(MeasureSpace::Unit, 0.0, 1.0 / (2.0 * n), 2.0 * n).unwrap();
            let diff = y.rearrange().unwrap().sub(&x.rearrange().unwrap()).unwrap();
            let v = norm(&NormSpec::L1, &diff).unwrap();
            assert!((v - 1.0).abs() <= 1e-12, "n = {n}: {v}");
        }
    }

    #[test]
    fn marcinkiewicz_star_of_indicator() {
        let chi = StepFunction::indicator(MeasureSpace::HalfLine, 0.0, 1.0, 1.0).unwrap();
        let spec = NormSpec::MarcinkiewiczStar(QuasiconcavePhi::Power { a: 0.5 });
        assert_eq!(norm(&spec, &chi).unwrap(), 1.0);
    }

    #[test]
    fn sum_norm_is_profile_at_one() {
        assert_eq!(norm(&NormSpec::L1PlusLInf, &two_blocks()).unwrap(), 3.0);
    }

    #[test]
    fn marcinkiewicz_hand_values() {
        // x** is 3 on (0,1], 1 + 2/t on [1,2] and 4/t afterwards; times √t
        // this peaks at t = 1.
        let x = two_blocks();
        let spec = NormSpec::Marcinkiewicz(QuasiconcavePhi::Power { a: 0.5 });
        assert_eq!(norm(&spec, &x).unwrap(), 3.0);
        let phi = QuasiconcavePhi::Power { a: 1.0 };
        // With φ(t) = t the product x** t is the profile, maximal at its end.
        assert_eq!(
            norm(&NormSpec::Marcinkiewicz(phi.clone()), &x).unwrap(),
            4.0
        );
        assert_eq!(norm(&NormSpec::MarcinkiewiczStar(phi), &x).unwrap(), 3.0);
    }

    #[test]
    fn marcinkiewicz_table_uses_critical_point() {
        // Compared against a dense scan of x** φ.
        let phi = QuasiconcavePhi::table(vec![1.0, 4.0], vec![1.0, 2.5]).unwrap();
        let x = StepFunction::from_cells(MeasureSpace::HalfLine, 0.5, &[4.0, 1.0, 1.0]).unwrap();
        let spec = NormSpec::Marcinkiewicz(phi.clone());
        let v = norm(&spec, &x).unwrap();
        let maximal = x.maximal_profile().unwrap();
        let scan = (1..200_000)
            .map(|k| k as f64 * 1e-4)
            .map(|t| maximal.eval(t).unwrap() * phi.eval(t))
            .fold(0.0, f64::max);
        assert!(v >= scan - 1e-12);
        assert!(v - scan < 1e-6);
    }

    #[test]
    fn fundamental_functions() {
        assert_eq!(fundamental_function(&NormSpec::L1, 0.25).unwrap(), 0.25);
        let v = fundamental_function(&NormSpec::Lp(2.0), 0.3).unwrap();
        assert!((v - 0.3f64.sqrt()).abs() < 1e-15);
        let phi = QuasiconcavePhi::Power { a: 0.3 };
        for t in [0.1, 1.0, 7.0] {
            let m = fundamental_function(&NormSpec::Marcinkiewicz(phi.clone()), t).unwrap();
            assert!((m - phi.eval(t)).abs() < 1e-15);
        }
        assert!(fundamental_function(&NormSpec::L1, 0.0).is_err());
    }

    #[test]
    fn quasiconcave_examples() {
        assert!(
            quasiconcave_check(&QuasiconcavePhi::Power { a: 0.5 }, 100)
                .unwrap()
                .passed
        );
        assert!(
            quasiconcave_check(&QuasiconcavePhi::Power { a: 1.0 }, 100)
                .unwrap()
                .passed
        );
        let bad = QuasiconcavePhi::table(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let report = quasiconcave_check(&bad, 50).unwrap();
        assert!(!report.passed);
        assert_eq!(
            report.first_violation.unwrap().condition,
            QuasiconcaveCondition::RatioNonincreasing
        );
    }

    #[test]
    fn iukm_examples() {
        assert_eq!(
            iukm_limit(&NormSpec::L1).unwrap().verdict,
            LimitVerdict::Positive(1.0)
        );
        assert_eq!(
            iukm_limit(&NormSpec::Lp(2.0)).unwrap().verdict,
            LimitVerdict::Zero
        );
        let m1 = NormSpec::MarcinkiewiczStar(QuasiconcavePhi::Power { a: 1.0 });
        assert_eq!(
            iukm_limit(&m1).unwrap().verdict,
            LimitVerdict::Positive(1.0)
        );
        let table = NormSpec::Marcinkiewicz(QuasiconcavePhi::table(vec![0.5], vec![2.0]).unwrap());
        let lim = iukm_limit(&table).unwrap();
        assert_eq!(lim.verdict, LimitVerdict::Positive(0.25));
        assert!(!lim.analytic);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"variant":"Lp","p":2.0}"#;
        let spec: NormSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec, NormSpec::Lp(2.0));
        assert_eq!(serde_json::to_string(&spec).unwrap(), text);
        let m: NormSpec =
            serde_json::from_str(r#"{"variant":"M","phi":{"form":"table","t":[1,2],"v":[1,1.5]}}"#)
                .unwrap();
        assert!(matches!(
            m,
            NormSpec::Marcinkiewicz(QuasiconcavePhi::Table { .. })
        ));
        assert!(serde_json::from_str::<NormSpec>(r#"{"variant":"Lp","p":1}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(r#"{"variant":"Mstar"}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(
            r#"{"variant":"M","phi":{"form":"power","a":2}}"#
        )
        .is_err());
    }

    #[test]
    fn linf_only_tail() {
        let x = StepFunction::new(MeasureSpace::HalfLine, vec![0.0, 1.0], vec![3.0], 1.0)
            .unwrap()
            .with_linf_only(true);
        assert_eq!(norm(&NormSpec::LInf, &x).unwrap(), 3.0);
        assert_eq!(norm(&NormSpec::L1, &x).unwrap(), f64::INFINITY);
        assert_eq!(norm(&NormSpec::L1PlusLInf, &x).unwrap(), 3.0);
        let m0 = NormSpec::Marcinkiewicz(QuasiconcavePhi::Power { a: 0.0 });
        assert_eq!(norm(&m0, &x).unwrap(), 3.0);
        let m = NormSpec::Marcinkiewicz(QuasiconcavePhi::Power { a: 0.5 });
        assert_eq!(norm(&m, &x).unwrap(), f64::INFINITY);
    }
}
