//! Python bindings. Budget overruns raise `vclab.BudgetExceeded`; every
//! other library error raises `ValueError`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use vclab_core::bits::BitSet;
use vclab_core::estimator::{fit_report, Sample, ShatterProfile};
use vclab_core::{BiRelation, Budget, Error, FamilySpec, Generated, SetSystem};

create_exception!(vclab, BudgetExceeded, PyRuntimeError);

fn err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetExceeded::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn budget(b: Option<u64>) -> Budget {
    b.map(Budget).unwrap_or_default()
}

#[pyclass(name = "SetSystem", module = "vclab")]
struct PySetSystem {
    inner: SetSystem,
}

#[pymethods]
impl PySetSystem {
    #[new]
    fn new(ground_size: usize, members: Vec<Vec<usize>>) -> PyResult<Self> {
        let inner = SetSystem::from_index_sets(ground_size, members).map_err(err)?;
        Ok(PySetSystem { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySetSystem { inner: SetSystem::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    /// Members as sorted index lists, in canonical order.
    fn members(&self) -> Vec<Vec<usize>> {
        self.inner.members().iter().map(|m| m.iter().collect()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn trace(&self, subset: Vec<usize>) -> PyResult<Self> {
        let a = BitSet::from_indices(self.inner.ground_size(), subset).map_err(err)?;
        Ok(PySetSystem { inner: self.inner.trace(&a).map_err(err)? })
    }

    fn dual(&self) -> Self {
        PySetSystem { inner: self.inner.dual() }
    }

    #[pyo3(signature = (t, budget=None))]
    fn shatter_function(&self, t: usize, budget: Option<u64>) -> PyResult<u128> {
        Ok(self.inner.shatter_function(t, self::budget(budget)).map_err(err)?.value)
    }

    #[pyo3(signature = (t, budget=None))]
    fn dual_shatter(&self, t: usize, budget: Option<u64>) -> PyResult<u128> {
        Ok(self.inner.dual_shatter(t, self::budget(budget)).map_err(err)?.value)
    }

    #[pyo3(signature = (budget=None))]
    fn vc_dimension(&self, budget: Option<u64>) -> PyResult<i64> {
        self.inner.vc_dimension(self::budget(budget)).map_err(err)
    }

    #[pyo3(signature = (budget=None))]
    fn independence_dimension(&self, budget: Option<u64>) -> PyResult<usize> {
        self.inner.independence_dimension(self::budget(budget)).map_err(err)
    }

    #[pyo3(signature = (budget=None))]
    fn breadth(&self, budget: Option<u64>) -> PyResult<usize> {
        self.inner.breadth(self::budget(budget)).map_err(err)
    }

    #[pyo3(signature = (budget=None))]
    fn helly_number(&self, budget: Option<u64>) -> PyResult<usize> {
        self.inner.helly_number(self::budget(budget)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("SetSystem(ground_size={}, members={})", self.inner.ground_size(), self.inner.len())
    }
}

#[pyclass(name = "BiRelation", module = "vclab")]
struct PyBiRelation {
    inner: BiRelation,
}

#[pymethods]
impl PyBiRelation {
    /// `rows[a][b]` says whether object `a` is related to parameter `b`.
    #[new]
    fn new(rows: Vec<Vec<bool>>) -> PyResult<Self> {
        let x = rows.len();
        let y = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != y) {
            return Err(PyValueError::new_err("rows have different lengths"));
        }
        Ok(PyBiRelation { inner: BiRelation::from_fn(x, y, |a, b| rows[a][b]) })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyBiRelation { inner: BiRelation::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.x_size(), self.inner.y_size())
    }

    fn holds(&self, a: usize, b: usize) -> bool {
        a < self.inner.x_size() && b < self.inner.y_size() && self.inner.holds(a, b)
    }

    fn dualize(&self) -> Self {
        PyBiRelation { inner: self.inner.dualize() }
    }

    fn system(&self) -> PySetSystem {
        PySetSystem { inner: self.inner.system_of() }
    }

    #[pyo3(signature = (t, budget=None))]
    fn shatter(&self, t: usize, budget: Option<u64>) -> PyResult<u128> {
        Ok(self.inner.shatter(t, self::budget(budget)).map_err(err)?.value)
    }

    #[pyo3(signature = (t, budget=None))]
    fn dual_shatter(&self, t: usize, budget: Option<u64>) -> PyResult<u128> {
        Ok(self.inner.dual_shatter(t, self::budget(budget)).map_err(err)?.value)
    }

    #[pyo3(signature = (budget=None))]
    fn ladder_dimension(&self, budget: Option<u64>) -> PyResult<usize> {
        self.inner.ladder_dimension(self::budget(budget)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("BiRelation({}x{}, edges={})", self.inner.x_size(), self.inner.y_size(), self.inner.edge_count())
    }
}

/// Builds a family from a JSON spec such as `{"family": "intervals", "points": 6, "k": 1}`.
#[pyfunction]
fn generate(py: Python<'_>, spec: &str) -> PyResult<Py<PyAny>> {
    let spec: FamilySpec = serde_json::from_str(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(match spec.build().map_err(err)? {
        Generated::System(s) => Py::new(py, PySetSystem { inner: s })?.into_any(),
        Generated::Relation(r) => Py::new(py, PyBiRelation { inner: r })?.into_any(),
    })
}

#[pyfunction]
fn sauer_shelah_bound(n: u64, d: u64) -> PyResult<u128> {
    vclab_core::sauer_shelah_bound(n, d).map_err(err)
}

/// Log-log fit of `(t, value)` pairs; returns `(slope, intercept, r2, classification)`.
#[pyfunction]
#[pyo3(signature = (points, t_min=1))]
fn fit_exponent(points: Vec<(usize, u128)>, t_min: usize) -> PyResult<(f64, f64, f64, String)> {
    let samples = points.into_iter().map(|(t, value)| Sample { t, value, exact: true }).collect();
    let profile = ShatterProfile::new(samples, "python").map_err(err)?;
    let r = fit_report(&profile, t_min, false).map_err(err)?;
    Ok((r.slope, r.intercept, r.r2, r.classification))
}

#[pymodule]
fn vclab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySetSystem>()?;
    m.add_class::<PyBiRelation>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(sauer_shelah_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
