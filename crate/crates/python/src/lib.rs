//! Python bindings: `import carlitz`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use ::carlitz as core;
use core::acceptance::{self, SuiteConfig};
use core::carlitz as cf;
use core::expr::{parse, Context};
use core::motive::{anderson_det, MotivePresentation};
use core::relations::{relation_report, SearchBounds};
use core::{FieldConfig, LocalElement, TateSeries};

create_exception!(carlitz, CarlitzError, PyValueError);
create_exception!(carlitz, ExtensionRequired, CarlitzError);

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::ExtensionRequired(_) => ExtensionRequired::new_err(e.to_string()),
        _ => CarlitzError::new_err(e.to_string()),
    }
}

fn json_value<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| CarlitzError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// F_{q^e}((pi)) with theta = -pi^{-ram}.
#[pyclass(name = "Field", module = "carlitz", frozen)]
#[derive(Clone)]
struct PyField(core::Field);

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p=3, m=1, e=1, ram=2, prec=200))]
    fn new(p: u32, m: u32, e: u32, ram: i64, prec: i64) -> PyResult<Self> {
        FieldConfig::new(p, m, e, ram, prec).map(PyField).map_err(err)
    }

    #[getter]
    fn q(&self) -> u64 {
        self.0.q()
    }

    #[getter]
    fn ram(&self) -> i64 {
        self.0.ram
    }

    #[getter]
    fn prec(&self) -> i64 {
        self.0.default_prec
    }

    /// Evaluate an expression in th, z, pi and integers.
    fn element(&self, expr: &str) -> PyResult<PyElement> {
        let e = parse(expr, Context::Field).map_err(err)?;
        e.eval_element(&self.0).map(PyElement).map_err(err)
    }

    fn theta(&self) -> PyElement {
        PyElement(LocalElement::theta(&self.0))
    }

    fn zeta(&self) -> PyElement {
        PyElement(LocalElement::zeta(&self.0))
    }

    fn pi(&self) -> PyElement {
        PyElement(LocalElement::pi(&self.0))
    }

    #[pyo3(signature = (prec=None))]
    fn pi_tilde(&self, prec: Option<i64>) -> PyElement {
        PyElement(cf::pi_tilde(&self.0, prec.unwrap_or(self.0.default_prec)))
    }

    #[pyo3(signature = (t_deg=40, prec=None))]
    fn omega(&self, t_deg: usize, prec: Option<i64>) -> PySeries {
        PySeries(cf::omega(&self.0, t_deg, prec.unwrap_or(self.0.default_prec)))
    }

    fn element_from_json(&self, text: &str) -> PyResult<PyElement> {
        let j = serde_json::from_str(text).map_err(|e| CarlitzError::new_err(e.to_string()))?;
        LocalElement::from_json(&self.0, &j).map(PyElement).map_err(err)
    }

    fn __repr__(&self) -> String {
        let f = &self.0;
        format!("Field(p={}, m={}, e={}, ram={}, prec={})", f.p, f.m, f.e, f.ram, f.default_prec)
    }
}

/// An element of the local field with absolute precision.
#[pyclass(name = "Element", module = "carlitz", frozen)]
#[derive(Clone)]
struct PyElement(LocalElement);

impl PyElement {
    fn prec_or_default(&self, prec: Option<i64>) -> i64 {
        prec.unwrap_or(self.0.field().default_prec)
    }
}

#[pymethods]
impl PyElement {
    #[getter]
    fn valuation(&self) -> Option<i64> {
        self.0.valuation()
    }

    /// None for exact elements.
    #[getter]
    fn prec(&self) -> Option<i64> {
        (!self.0.is_exact()).then(|| self.0.prec())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coefficients as (exponent, digit) pairs; digits index F_{q^e}.
    fn terms(&self) -> Vec<(i64, u32)> {
        self.0.terms().collect()
    }

    #[pyo3(signature = (prec=None))]
    fn exp(&self, prec: Option<i64>) -> PyElement {
        PyElement(cf::carlitz_exp(&self.0, self.prec_or_default(prec)))
    }

    #[pyo3(signature = (prec=None))]
    fn log(&self, prec: Option<i64>) -> PyResult<PyElement> {
        cf::carlitz_log(&self.0, self.prec_or_default(prec)).map(PyElement).map_err(err)
    }

    /// C_a(x) for a polynomial expression in t with F_q coefficients.
    fn carlitz_action(&self, a: &str) -> PyResult<PyElement> {
        let p = parse(a, Context::TPoly).and_then(|e| e.eval_poly(self.0.field())).map_err(err)?;
        let fa = p.to_fq().ok_or_else(|| CarlitzError::new_err(format!("{p}: coefficients must lie in F_q")))?;
        Ok(PyElement(cf::carlitz_action(&fa, &self.0)))
    }

    fn twist(&self, n: i64) -> PyResult<PyElement> {
        self.0.twist(n).map(PyElement).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0.to_json()).map_err(|e| CarlitzError::new_err(e.to_string()))
    }

    fn __add__(&self, o: &PyElement) -> PyElement {
        PyElement(self.0.add_ref(&o.0))
    }

    fn __sub__(&self, o: &PyElement) -> PyElement {
        PyElement(self.0.sub_ref(&o.0))
    }

    fn __mul__(&self, o: &PyElement) -> PyElement {
        PyElement(self.0.mul_ref(&o.0))
    }

    fn __truediv__(&self, o: &PyElement) -> PyResult<PyElement> {
        self.0.div(&o.0).map(PyElement).map_err(err)
    }

    fn __neg__(&self) -> PyElement {
        PyElement(self.0.neg_ref())
    }

    fn __pow__(&self, n: i64, _modulo: Option<i64>) -> PyResult<PyElement> {
        self.0.pow(n).map(PyElement).map_err(err)
    }

    /// Same digits and same precision.
    fn __eq__(&self, o: &PyElement) -> bool {
        self.0 == o.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Element({})", self.0)
    }
}

/// A series in t with coefficients in the local field and a tail bound.
#[pyclass(name = "Series", module = "carlitz", frozen)]
#[derive(Clone)]
struct PySeries(TateSeries);

#[pymethods]
impl PySeries {
    #[getter]
    fn t_deg(&self) -> usize {
        self.0.t_deg()
    }

    fn coeffs(&self) -> Vec<PyElement> {
        self.0.coeffs().iter().cloned().map(PyElement).collect()
    }

    /// (valuation or None, log_q as a fraction string, upper_bound).
    fn gauss_norm(&self) -> (Option<i64>, String, bool) {
        let n = self.0.gauss_norm();
        (n.valuation, n.log_q.to_string(), n.upper_bound)
    }

    fn eval(&self, a: &PyElement) -> PyResult<PyElement> {
        self.0.eval_entire(&a.0).map(PyElement).map_err(err)
    }

    fn twist(&self, n: i64) -> PyResult<PySeries> {
        self.0.twist(n).map(PySeries).map_err(err)
    }

    fn __add__(&self, o: &PySeries) -> PySeries {
        PySeries(self.0.add(&o.0))
    }

    fn __sub__(&self, o: &PySeries) -> PySeries {
        PySeries(self.0.sub(&o.0))
    }

    fn __mul__(&self, o: &PySeries) -> PySeries {
        PySeries(self.0.mul(&o.0))
    }

    fn __repr__(&self) -> String {
        format!("Series(t_deg={}, min_prec={})", self.0.t_deg(), self.0.min_prec())
    }
}

/// A t-motive presentation (Phi, Psi).
#[pyclass(name = "Motive", module = "carlitz", frozen)]
#[derive(Clone)]
struct PyMotive(MotivePresentation);

#[pymethods]
impl PyMotive {
    #[staticmethod]
    #[pyo3(signature = (field, t_deg=40))]
    fn one(field: &PyField, t_deg: usize) -> PyMotive {
        PyMotive(MotivePresentation::one(&field.0, t_deg))
    }

    #[staticmethod]
    #[pyo3(signature = (field, n, t_deg=40, prec=None))]
    fn carlitz_power(field: &PyField, n: i64, t_deg: usize, prec: Option<i64>) -> PyResult<PyMotive> {
        let prec = prec.unwrap_or(field.0.default_prec);
        MotivePresentation::carlitz_power(&field.0, n, t_deg, prec).map(PyMotive).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (alphas, t_deg=40, prec=None))]
    fn x_alphas(alphas: Vec<PyElement>, t_deg: usize, prec: Option<i64>) -> PyResult<PyMotive> {
        let a: Vec<LocalElement> = alphas.into_iter().map(|x| x.0).collect();
        let prec = prec.or_else(|| a.first().map(|x| x.field().default_prec)).unwrap_or(200);
        MotivePresentation::x_alphas(&a, t_deg, prec).map(PyMotive).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn tensor(&self, o: &PyMotive) -> PyResult<PyMotive> {
        self.0.tensor(&o.0).map(PyMotive).map_err(err)
    }

    fn dual(&self) -> PyResult<PyMotive> {
        self.0.dual().map(PyMotive).map_err(err)
    }

    /// Residual of the trivialization; passes at `floor` (default prec / 2).
    #[pyo3(signature = (floor=None))]
    fn check_trivialization<'py>(&self, py: Python<'py>, floor: Option<i64>) -> PyResult<Bound<'py, PyDict>> {
        let floor = floor.unwrap_or(self.0.prec / acceptance::MOTIVE_FLOOR_DIVISOR);
        let r = self.0.check_trivialization(floor).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("pass", r.pass)?;
        d.set_item("certified_prec", r.certified_prec)?;
        d.set_item("valuation", r.residual.valuation)?;
        d.set_item("upper_bound", r.residual.upper_bound)?;
        Ok(d)
    }

    /// (c, s) with det Phi = c (t - theta)^s, or None.
    fn anderson_det(&self) -> PyResult<Option<(PyElement, i64)>> {
        Ok(anderson_det(&self.0.phi).map_err(err)?.map(|(c, s)| (PyElement(c), s)))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0.to_json()).map_err(|e| CarlitzError::new_err(e.to_string()))
    }
}

#[pyfunction]
#[pyo3(signature = (alpha, t_deg=40, prec=None))]
fn l_alpha(alpha: &PyElement, t_deg: usize, prec: Option<i64>) -> PyResult<PySeries> {
    cf::l_alpha(&alpha.0, t_deg, alpha.prec_or_default(prec)).map(PySeries).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (beta, prec=None, min_steps=0))]
fn reduce_log<'py>(
    py: Python<'py>,
    beta: &PyElement,
    prec: Option<i64>,
    min_steps: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let r = cf::reduce_log_with(&beta.0, beta.prec_or_default(prec), min_steps).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("alpha", PyElement(r.alpha))?;
    d.set_item("n", r.n)?;
    d.set_item("action_residual", PyElement(r.action_residual))?;
    d.set_item("exp_residual", PyElement(r.exp_residual))?;
    Ok(d)
}

/// Relation report as a dict, in the same layout as `carlitz relations --json`.
#[pyfunction]
#[pyo3(signature = (field, alphas, dt=1, vlo=-1, vhi=0, prec=None, t_deg=40, margin=2))]
#[allow(clippy::too_many_arguments)]
fn relations<'py>(
    py: Python<'py>,
    field: &PyField,
    alphas: Vec<PyElement>,
    dt: usize,
    vlo: i64,
    vhi: i64,
    prec: Option<i64>,
    t_deg: usize,
    margin: i64,
) -> PyResult<Bound<'py, PyAny>> {
    let a: Vec<LocalElement> = alphas.into_iter().map(|x| x.0).collect();
    let bounds = SearchBounds::new(dt, vlo, vhi, prec.unwrap_or(field.0.default_prec), t_deg).with_margin(margin);
    let rep = py.allow_threads(|| relation_report(&field.0, &a, &bounds)).map_err(err)?;
    json_value(py, &rep.to_json())
}

/// Run the acceptance suite; one dict per criterion.
#[pyfunction]
#[pyo3(signature = (field, t_deg=40, seed=1, only=None))]
fn selftest<'py>(
    py: Python<'py>,
    field: &PyField,
    t_deg: usize,
    seed: u64,
    only: Option<u8>,
) -> PyResult<Bound<'py, PyList>> {
    let cfg = SuiteConfig { field: field.0.clone(), prec: field.0.default_prec, t_deg, seed };
    let outcomes = py.allow_threads(|| match only {
        Some(id @ 1..=12) => Ok(vec![acceptance::run_one(&cfg, id)]),
        Some(id) => Err(id),
        None => Ok(acceptance::run_all(&cfg)),
    });
    let outcomes = outcomes.map_err(|id| CarlitzError::new_err(format!("criterion {id} does not exist")))?;
    let list = PyList::empty(py);
    for o in outcomes {
        let d = PyDict::new(py);
        d.set_item("id", o.id)?;
        d.set_item("name", o.name)?;
        d.set_item("pass", o.pass)?;
        d.set_item("detail", &o.detail)?;
        d.set_item("known_failure", o.known_failure())?;
        list.append(d)?;
    }
    Ok(list)
}

#[pymodule]
#[pyo3(name = "carlitz")]
fn carlitz_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyElement>()?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyMotive>()?;
    m.add_function(wrap_pyfunction!(l_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_log, m)?)?;
    m.add_function(wrap_pyfunction!(relations, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("CarlitzError", m.py().get_type::<CarlitzError>())?;
    m.add("ExtensionRequired", m.py().get_type::<ExtensionRequired>())?;
    Ok(())
}
