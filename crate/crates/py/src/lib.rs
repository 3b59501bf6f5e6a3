//! Python bindings. Structured inputs and results (credal sets, metric
//! specs, test reports) cross the boundary as plain JSON-compatible dicts.

use gsd_core::credal::{contains, extreme_points, CredalSet, Pmf};
use gsd_core::gsd::{choice_max, choice_und, dominance_margin, gsd_compare, Act};
use gsd_core::order::ElementId;
use gsd_core::preference::{build_system, check_consistency, Pair, PreferenceSystem, ScaleSpec};
use gsd_core::stats::{
    embed_samples, front_membership_test, gsd_front, permutation_test, robust_test, Design, EvaluationTable,
    MembershipConfig, TestConfig,
};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(gsd, GsdError, PyException);

fn err(e: gsd_core::Error) -> PyErr {
    GsdError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(value).map_err(|e| GsdError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(|e| GsdError::new_err(format!("bad input: {e}")))
}

fn id(s: &str) -> PyResult<ElementId> {
    ElementId::new(s).map_err(err)
}

fn design(s: &str) -> PyResult<Design> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| GsdError::new_err(format!("unknown design {s:?} (paired or two-sample)")))
}

#[pyclass(name = "PreferenceSystem", frozen)]
struct PyPreferenceSystem {
    inner: PreferenceSystem,
}

#[pymethods]
impl PyPreferenceSystem {
    /// `r1` holds pairs `(a, b)` read "a is at least as good as b"; `r2`
    /// holds `((a, b), (c, d))` read "the exchange a over b is at least as
    /// intense as c over d".
    #[new]
    #[pyo3(signature = (elements, r1, r2 = Vec::new(), bounds = None))]
    fn new(
        elements: Vec<String>,
        r1: Vec<(String, String)>,
        r2: Vec<((String, String), (String, String))>,
        bounds: Option<(String, String)>,
    ) -> PyResult<Self> {
        let els = elements.iter().map(|e| id(e)).collect::<PyResult<Vec<_>>>()?;
        let pair = |(a, b): &(String, String)| -> PyResult<Pair> { Ok((id(a)?, id(b)?)) };
        let r1 = r1.iter().map(pair).collect::<PyResult<Vec<_>>>()?;
        let r2 = r2
            .iter()
            .map(|(p, q)| Ok((pair(p)?, pair(q)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let mut ps = build_system(els, &r1, &r2).map_err(err)?;
        if let Some((bottom, top)) = bounds {
            ps = ps.with_bounds(&id(&bottom)?, &id(&top)?).map_err(err)?;
        }
        Ok(Self { inner: ps })
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.inner.elements().iter().map(|e| e.to_string()).collect()
    }

    /// `(bottom, top)`, or None if the system is unbounded.
    #[getter]
    fn bounds(&self) -> Option<(String, String)> {
        self.inner.bounds().map(|b| (b.bottom.to_string(), b.top.to_string()))
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes().to_vec()
    }

    #[pyo3(signature = (delta = 0.0))]
    fn check_consistency(&self, py: Python<'_>, delta: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &check_consistency(&self.inner, delta).map_err(err)?)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PreferenceSystem({} elements, |R1| = {}, |R2| = {})",
            self.inner.len(),
            self.inner.r1().matrix().count(),
            self.inner.r2().matrix().count()
        )
    }
}

#[pyclass(name = "CredalSet", frozen)]
struct PyCredalSet {
    inner: CredalSet,
}

#[pymethods]
impl PyCredalSet {
    #[staticmethod]
    fn singleton(states: Vec<String>, probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CredalSet::singleton(Pmf::new(states, probs).map_err(err)?),
        })
    }

    #[staticmethod]
    fn linear_vacuous(states: Vec<String>, probs: Vec<f64>, zeta: f64) -> PyResult<Self> {
        let base = Pmf::new(states, probs).map_err(err)?;
        Ok(Self {
            inner: CredalSet::linear_vacuous(base, zeta).map_err(err)?,
        })
    }

    /// `{pi : pi(chain[0]) >= pi(chain[1]) >= ...}`.
    #[staticmethod]
    #[pyo3(signature = (chain, states = None))]
    fn ordering_chain(chain: Vec<String>, states: Option<Vec<String>>) -> PyResult<Self> {
        let states = states.unwrap_or_else(|| chain.clone());
        Ok(Self {
            inner: CredalSet::ordering_chain(states, chain).map_err(err)?,
        })
    }

    /// Any credal-set dict, e.g. `{"kind": "vertices", "vertices": [...]}`.
    #[staticmethod]
    fn from_dict(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner: CredalSet = from_py(obj)?;
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.states().to_vec()
    }

    /// Probability vectors of the extreme points, in `states` order.
    fn extreme_points(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(extreme_points(&self.inner)
            .map_err(err)?
            .into_iter()
            .map(|p| p.probs().to_vec())
            .collect())
    }

    fn contains(&self, probs: Vec<f64>) -> PyResult<bool> {
        let pmf = Pmf::new(self.inner.states().to_vec(), probs).map_err(err)?;
        contains(&self.inner, &pmf).map_err(err)
    }
}

fn act(name: &str, mapping: &Bound<'_, PyDict>) -> PyResult<Act> {
    let mut states = Vec::new();
    let mut outcomes = Vec::new();
    for (k, v) in mapping.iter() {
        states.push(k.extract::<String>()?);
        outcomes.push(id(&v.extract::<String>()?)?);
    }
    Act::new(name, &states, &outcomes).map_err(err)
}

fn parse_acts(obj: &Bound<'_, PyDict>) -> PyResult<Vec<Act>> {
    obj.iter()
        .map(|(k, v)| act(&k.extract::<String>()?, v.cast::<PyDict>()?))
        .collect()
}

/// Verdict dict with both margins and the relation between `x` and `y`.
#[pyfunction]
#[pyo3(signature = (ps, credal, x, y, delta = 0.0))]
fn compare(
    py: Python<'_>,
    ps: &PyPreferenceSystem,
    credal: &PyCredalSet,
    x: &Bound<'_, PyDict>,
    y: &Bound<'_, PyDict>,
    delta: f64,
) -> PyResult<Py<PyAny>> {
    let v = gsd_compare(&act("x", x)?, &act("y", y)?, &ps.inner, &credal.inner, delta).map_err(err)?;
    to_py(py, &v)
}

/// Worst-case expected-utility advantage of `x` over `y`.
#[pyfunction]
#[pyo3(signature = (ps, credal, x, y, delta = 0.0))]
fn margin(
    ps: &PyPreferenceSystem,
    credal: &PyCredalSet,
    x: &Bound<'_, PyDict>,
    y: &Bound<'_, PyDict>,
    delta: f64,
) -> PyResult<f64> {
    dominance_margin(&act("x", x)?, &act("y", y)?, &ps.inner, &credal.inner, delta).map_err(err)
}

/// Names of the undominated acts; `acts` maps names to `{state: outcome}`.
#[pyfunction(name = "choice_und")]
#[pyo3(signature = (ps, credal, acts, delta = 0.0))]
fn py_choice_und(ps: &PyPreferenceSystem, credal: &PyCredalSet, acts: &Bound<'_, PyDict>, delta: f64) -> PyResult<Vec<String>> {
    let a = parse_acts(acts)?;
    let idx = choice_und(&a, &ps.inner, &credal.inner, delta).map_err(err)?;
    Ok(idx.into_iter().map(|i| a[i].name.clone()).collect())
}

/// Names of the acts that dominate every other act.
#[pyfunction(name = "choice_max")]
#[pyo3(signature = (ps, credal, acts, delta = 0.0))]
fn py_choice_max(ps: &PyPreferenceSystem, credal: &PyCredalSet, acts: &Bound<'_, PyDict>, delta: f64) -> PyResult<Vec<String>> {
    let a = parse_acts(acts)?;
    let idx = choice_max(&a, &ps.inner, &credal.inner, delta).map_err(err)?;
    Ok(idx.into_iter().map(|i| a[i].name.clone()).collect())
}

#[pyclass(name = "EvaluationTable", frozen)]
struct PyEvaluationTable {
    inner: EvaluationTable,
}

impl PyEvaluationTable {
    fn samples(&self, x: &str, y: &str) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let t = &self.inner;
        let rows = |s: usize| (0..t.instances().len()).map(|d| t.coords(s, d).to_vec()).collect();
        let sx = t.subject_index(x).map_err(err)?;
        let sy = t.subject_index(y).map_err(err)?;
        Ok((rows(sx), rows(sy)))
    }
}

#[pymethods]
impl PyEvaluationTable {
    /// `metrics` is a list of metric dicts (`name`, `scale`, `direction`,
    /// `levels` for ordinal ones); `values[s][d]` lists the metric values of
    /// subject `s` on instance `d` (numbers or level names).
    #[new]
    fn new(
        subjects: Vec<String>,
        instances: Vec<String>,
        metrics: &Bound<'_, PyAny>,
        values: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        let spec: ScaleSpec = from_py(metrics)?;
        let values = from_py(values)?;
        Ok(Self {
            inner: EvaluationTable::new(subjects, instances, spec, values).map_err(err)?,
        })
    }

    #[getter]
    fn subjects(&self) -> Vec<String> {
        self.inner.subjects().to_vec()
    }

    #[getter]
    fn instances(&self) -> Vec<String> {
        self.inner.instances().to_vec()
    }

    /// Permutation test of "x does not strictly dominate y".
    #[pyo3(signature = (x, y, delta = 0.0, design = "paired", replicates = 199, seed = 0))]
    fn permutation_test(
        &self,
        py: Python<'_>,
        x: &str,
        y: &str,
        delta: f64,
        design: &str,
        replicates: usize,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let cfg = TestConfig {
            delta,
            design: self::design(design)?,
            replicates,
            seed,
        };
        let (vx, vy) = self.samples(x, y)?;
        let (e, xi, yi) = embed_samples(&vx, &vy, self.inner.spec()).map_err(err)?;
        to_py(py, &permutation_test(&xi, &yi, &e.system, &cfg).map_err(err)?)
    }

    #[pyo3(signature = (x, y, zeta_grid, alpha = 0.05, delta = 0.0, design = "paired", replicates = 199, seed = 0))]
    #[allow(clippy::too_many_arguments)]
    fn robust_test(
        &self,
        py: Python<'_>,
        x: &str,
        y: &str,
        zeta_grid: Vec<f64>,
        alpha: f64,
        delta: f64,
        design: &str,
        replicates: usize,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let cfg = TestConfig {
            delta,
            design: self::design(design)?,
            replicates,
            seed,
        };
        let (vx, vy) = self.samples(x, y)?;
        let (e, xi, yi) = embed_samples(&vx, &vy, self.inner.spec()).map_err(err)?;
        to_py(py, &robust_test(&xi, &yi, &e.system, &cfg, &zeta_grid, alpha).map_err(err)?)
    }

    #[pyo3(signature = (delta = 0.0, epsilon = 0.0))]
    fn gsd_front(&self, py: Python<'_>, delta: f64, epsilon: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &gsd_front(&self.inner, delta, epsilon).map_err(err)?)
    }

    #[pyo3(signature = (candidate, opponents = None, delta = 0.0, replicates = 199, seed = 0, alpha = 0.05))]
    fn membership_test(
        &self,
        py: Python<'_>,
        candidate: &str,
        opponents: Option<Vec<String>>,
        delta: f64,
        replicates: usize,
        seed: u64,
        alpha: f64,
    ) -> PyResult<Py<PyAny>> {
        let cfg = MembershipConfig {
            delta,
            replicates,
            seed,
            alpha,
        };
        let r = front_membership_test(&self.inner, candidate, opponents.as_deref(), &cfg).map_err(err)?;
        to_py(py, &r)
    }
}

#[pymodule]
fn gsd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GsdError", m.py().get_type::<GsdError>())?;
    m.add_class::<PyPreferenceSystem>()?;
    m.add_class::<PyCredalSet>()?;
    m.add_class::<PyEvaluationTable>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(margin, m)?)?;
    m.add_function(wrap_pyfunction!(py_choice_und, m)?)?;
    m.add_function(wrap_pyfunction!(py_choice_max, m)?)?;
    Ok(())
}
