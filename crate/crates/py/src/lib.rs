//! Python bindings. Structured inputs (norm specs, operators, configs) travel
//! as JSON strings in the same wire format the CLI reads.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rik_core::interpolation;
use rik_core::majorization;
use rik_core::operators::{self, OperatorExpr};
use rik_core::scenarios::{self, ScenarioConfig};
use rik_core::spaces::{self, NormSpec};
use rik_core::MeasureSpace;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(value_error)
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(value_error)
}

/// A right-continuous step function on `[0, 1)` (`alpha="1"`) or
/// `[0, inf)` (`alpha="inf"`).
#[pyclass(name = "StepFunction", module = "rik", frozen, from_py_object)]
#[derive(Clone)]
struct PyStepFunction {
    inner: rik_core::StepFunction,
}

#[pymethods]
impl PyStepFunction {
    #[new]
    #[pyo3(signature = (alpha, breakpoints, values, tail = 0.0))]
    fn new(alpha: &str, breakpoints: Vec<f64>, values: Vec<f64>, tail: f64) -> PyResult<Self> {
        let space: MeasureSpace = parse(&format!("{alpha:?}"))?;
        let inner =
            rik_core::StepFunction::new(space, breakpoints, values, tail).map_err(value_error)?;
        Ok(PyStepFunction { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyStepFunction {
            inner: parse(text)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn tail(&self) -> f64 {
        self.inner.tail()
    }

    fn eval(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    fn rearrange(&self) -> PyResult<Self> {
        let inner = self.inner.rearrange().map_err(value_error)?;
        Ok(PyStepFunction { inner })
    }

    fn l1_norm(&self) -> f64 {
        self.inner.l1_norm()
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("StepFunction({})", self.to_json()?))
    }
}

/// `‖x‖_E` for a norm spec given as JSON, e.g. `{"variant": "Lp", "p": 2}`.
#[pyfunction]
fn norm(spec: &str, x: &PyStepFunction) -> PyResult<f64> {
    let spec: NormSpec = parse(spec)?;
    spaces::norm(&spec, &x.inner).map_err(value_error)
}

/// Decides `f ≺ g`; returns `(holds, witness_t, margin)`.
#[pyfunction]
#[pyo3(signature = (f, g, tol = majorization::DEFAULT_TOL))]
fn hlp_leq(f: &PyStepFunction, g: &PyStepFunction, tol: f64) -> PyResult<(bool, Option<f64>, f64)> {
    let c = majorization::hlp_leq(&f.inner, &g.inner, tol).map_err(value_error)?;
    Ok((c.holds, c.witness_t, c.margin))
}

/// `K(t, x; L1, L∞)`.
#[pyfunction]
fn k_functional(t: f64, x: &PyStepFunction) -> PyResult<f64> {
    interpolation::k_functional(t, &x.inner).map_err(value_error)
}

/// `Φ_{θ,q}(K(·, x))`; `q = None` means `q = ∞`.
#[pyfunction]
#[pyo3(signature = (x, theta, q = None))]
fn k_theta_q_norm(x: &PyStepFunction, theta: f64, q: Option<f64>) -> PyResult<f64> {
    let v = interpolation::k_theta_q_norm(&x.inner, theta, q.unwrap_or(f64::INFINITY))
        .map_err(value_error)?;
    Ok(v.value)
}

/// A doubly (sub)stochastic `D` with `D g = f`; returns `(rows, transforms)`.
#[pyfunction]
fn construct_doubly_stochastic(f: Vec<f64>, g: Vec<f64>) -> PyResult<(Vec<Vec<f64>>, usize)> {
    let t = majorization::construct_doubly_stochastic(&f, &g).map_err(value_error)?;
    Ok((t.matrix.rows().to_vec(), t.transforms))
}

/// Applies an operator tree given as JSON.
#[pyfunction]
fn apply_operator(operator: &str, x: &PyStepFunction) -> PyResult<PyStepFunction> {
    let op = OperatorExpr::from_json(operator).map_err(value_error)?;
    let inner = op.apply(&x.inner).map_err(value_error)?;
    Ok(PyStepFunction { inner })
}

/// Runs `certify_substochastic`; returns the certificate as JSON.
#[pyfunction]
#[pyo3(signature = (operator, probes, tol = majorization::DEFAULT_TOL))]
fn certify_substochastic(
    operator: &str,
    probes: Vec<PyStepFunction>,
    tol: f64,
) -> PyResult<String> {
    let op = OperatorExpr::from_json(operator).map_err(value_error)?;
    let probes: Vec<_> = probes.into_iter().map(|p| p.inner).collect();
    let cert = operators::certify_substochastic(&op, &probes, tol).map_err(value_error)?;
    to_json(&cert)
}

/// Runs a scenario from a JSON config; returns the report as JSON.
#[pyfunction]
fn run_scenario(config: &str) -> PyResult<String> {
    let config = ScenarioConfig::from_json(config).map_err(value_error)?;
    let report = scenarios::run_scenario(&config).map_err(value_error)?;
    Ok(report.to_json())
}

#[pymodule]
fn rik(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyStepFunction>()?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(hlp_leq, m)?)?;
    m.add_function(wrap_pyfunction!(k_functional, m)?)?;
    m.add_function(wrap_pyfunction!(k_theta_q_norm, m)?)?;
    m.add_function(wrap_pyfunction!(construct_doubly_stochastic, m)?)?;
    m.add_function(wrap_pyfunction!(apply_operator, m)?)?;
    m.add_function(wrap_pyfunction!(certify_substochastic, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
