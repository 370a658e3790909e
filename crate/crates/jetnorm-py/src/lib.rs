//! Python bindings. The module is importable as `jetnorm`.
//!
//! Matrices carry their variable names so they print the way they were
//! written. Structured reports come back as plain dicts, shaped like the JSON
//! the command-line tool emits.

use jetnorm::gradedlin::{Limits, DEFAULT_MAX_COLUMNS};
use jetnorm::normalform::scalar_constant;
use jetnorm::{
    check_pde, determinacy_report, jet_equivalence, normal_form, one_variable_nf, parse_poly_matrix,
    verify_certificate, Error, Field, GroupElementJet, GroupKind, MatrixJet, NormalFormOptions, ParseOptions,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

pyo3::create_exception!(jetnorm, JetnormError, PyValueError, "Invalid input or an unsupported request.");
pyo3::create_exception!(jetnorm, ParseError, JetnormError, "Matrix text that does not parse.");
pyo3::create_exception!(jetnorm, GuardrailError, JetnormError, "The Lie basis column limit was exceeded.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Guardrail { .. } => GuardrailError::new_err(e.to_string()),
        Error::Parse { .. } => ParseError::new_err(e.to_string()),
        _ => JetnormError::new_err(e.to_string()),
    }
}

fn kind(group: &str) -> PyResult<GroupKind> {
    group.parse().map_err(py_err)
}

fn limits(max_columns: Option<usize>) -> Limits {
    Limits { max_columns: max_columns.unwrap_or(DEFAULT_MAX_COLUMNS) }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| JetnormError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A matrix of truncated power series with exact coefficients.
#[pyclass(name = "Matrix", module = "jetnorm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    jet: MatrixJet,
    vars: Vec<String>,
}

impl PyMatrix {
    fn wrap(&self, jet: MatrixJet) -> PyMatrix {
        PyMatrix { jet, vars: self.vars.clone() }
    }

    fn same_ring(&self, other: &PyMatrix) -> PyResult<()> {
        if self.vars != other.vars {
            return Err(JetnormError::new_err(format!(
                "variables differ: {} vs {}",
                self.vars.join(","),
                other.vars.join(",")
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl PyMatrix {
    /// Parse `[a, b; c, d]` with polynomial entries. Terms above `order` are
    /// dropped; see `Matrix.parse` to get the warnings too.
    #[new]
    #[pyo3(signature = (text, vars = None, order = 6, field = "rational"))]
    fn new(text: &str, vars: Option<Vec<String>>, order: u32, field: &str) -> PyResult<Self> {
        Ok(Self::parse(text, vars, order, field)?.0)
    }

    /// Like the constructor, also returning the parser's warnings.
    #[staticmethod]
    #[pyo3(signature = (text, vars = None, order = 6, field = "rational"))]
    fn parse(text: &str, vars: Option<Vec<String>>, order: u32, field: &str) -> PyResult<(Self, Vec<String>)> {
        let vars = vars.unwrap_or_else(|| vec!["x".into()]);
        let field: Field = field.parse().map_err(py_err)?;
        let opts = ParseOptions::new(vars, order, field).map_err(py_err)?;
        let parsed = parse_poly_matrix(text, &opts).map_err(py_err)?;
        Ok((PyMatrix { jet: parsed.matrix, vars: opts.vars }, parsed.warnings))
    }

    #[staticmethod]
    #[pyo3(signature = (n, vars = None, order = 6))]
    fn identity(n: usize, vars: Option<Vec<String>>, order: u32) -> Self {
        let vars = vars.unwrap_or_else(|| vec!["x".into()]);
        PyMatrix { jet: MatrixJet::identity(n, vars.len(), order), vars }
    }

    #[getter]
    fn rows(&self) -> usize {
        self.jet.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.jet.cols()
    }

    #[getter]
    fn order(&self) -> u32 {
        self.jet.truncation()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.vars.clone()
    }

    /// Lowest degree with a nonzero coefficient, `None` for zero.
    fn valuation(&self) -> Option<u32> {
        self.jet.valuation()
    }

    fn is_zero(&self) -> bool {
        self.jet.valuation().is_none()
    }

    fn truncate(&self, order: u32) -> Self {
        self.wrap(self.jet.truncate(order))
    }

    /// The Hermitian pairing `sum a * conj(b) * I!`, as an exact string.
    fn inner(&self, other: &PyMatrix) -> PyResult<String> {
        Ok(self.jet.inner_product(&other.jet).map_err(py_err)?.to_string())
    }

    /// Sparse coefficient layout: rows, cols, nvars, truncation, entries.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.jet.to_json())
    }

    fn __add__(&self, other: &PyMatrix) -> PyResult<Self> {
        self.same_ring(other)?;
        Ok(self.wrap(self.jet.add(&other.jet).map_err(py_err)?))
    }

    fn __sub__(&self, other: &PyMatrix) -> PyResult<Self> {
        self.same_ring(other)?;
        Ok(self.wrap(self.jet.sub(&other.jet).map_err(py_err)?))
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        self.same_ring(other)?;
        Ok(self.wrap(self.jet.mul(&other.jet).map_err(py_err)?))
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other.cast::<PyMatrix>().is_ok_and(|o| o.get().jet == self.jet)
    }

    fn __str__(&self) -> String {
        self.jet.to_text(&self.vars)
    }

    fn __repr__(&self) -> String {
        format!("Matrix('{}', vars={:?}, order={})", self.jet.to_text(&self.vars), self.vars, self.jet.truncation())
    }
}

/// A group element `(U, V)`; see `act` for how it moves a matrix.
#[pyclass(name = "GroupElement", module = "jetnorm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGroupElement {
    g: GroupElementJet,
    vars: Vec<String>,
}

#[pymethods]
impl PyGroupElement {
    #[new]
    #[pyo3(signature = (group, u, v))]
    fn new(group: &str, u: &PyMatrix, v: &PyMatrix) -> PyResult<Self> {
        u.same_ring(v)?;
        let g = GroupElementJet::new(kind(group)?, u.jet.clone(), v.jet.clone()).map_err(py_err)?;
        Ok(PyGroupElement { g, vars: u.vars.clone() })
    }

    #[getter]
    fn group(&self) -> String {
        self.g.kind().to_string()
    }

    #[getter]
    fn u(&self) -> PyMatrix {
        PyMatrix { jet: self.g.u().clone(), vars: self.vars.clone() }
    }

    #[getter]
    fn v(&self) -> PyMatrix {
        PyMatrix { jet: self.g.v().clone(), vars: self.vars.clone() }
    }

    fn act(&self, a: &PyMatrix) -> PyResult<PyMatrix> {
        Ok(a.wrap(self.g.act(&a.jet).map_err(py_err)?))
    }

    /// `self` after `other`.
    fn compose(&self, other: &PyGroupElement) -> PyResult<Self> {
        Ok(PyGroupElement { g: self.g.compose(&other.g).map_err(py_err)?, vars: self.vars.clone() })
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.g.to_json())
    }

    fn __repr__(&self) -> String {
        format!("GroupElement('{}', U='{}', V='{}')", self.g.kind(), self.g.u().to_text(&self.vars), self.g.v().to_text(&self.vars))
    }
}

/// Outcome of `normal_form`.
#[pyclass(name = "NormalForm", module = "jetnorm", frozen, skip_from_py_object)]
struct PyNormalForm {
    #[pyo3(get)]
    normal_form: PyMatrix,
    #[pyo3(get)]
    certificate: PyGroupElement,
    #[pyo3(get)]
    preprocessing: Option<PyGroupElement>,
    /// `certificate` composed with `preprocessing`; takes the input to the
    /// normal form.
    #[pyo3(get)]
    full_certificate: PyGroupElement,
    #[pyo3(get)]
    warnings: Vec<String>,
    #[pyo3(get)]
    explain: Vec<String>,
    #[pyo3(get)]
    verified: bool,
    #[pyo3(get)]
    issues: Vec<String>,
    log: String,
}

#[pymethods]
impl PyNormalForm {
    /// Per-degree dimensions and the squared norm removed.
    #[getter]
    fn log<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        py.import("json")?.call_method1("loads", (self.log.as_str(),))
    }

    fn __repr__(&self) -> String {
        format!("NormalForm('{}', verified={})", self.normal_form.__str__(), self.verified)
    }
}

/// Normal form of `a` under `group`, with a certificate checked exactly.
#[pyfunction]
#[pyo3(name = "normal_form", signature = (a, group = "two-sided", full_g = false, explain = false, max_columns = None))]
fn normal_form_py(
    py: Python<'_>,
    a: &PyMatrix,
    group: &str,
    full_g: bool,
    explain: bool,
    max_columns: Option<usize>,
) -> PyResult<PyNormalForm> {
    let kind = kind(group)?;
    let opts = NormalFormOptions { limits: limits(max_columns), explain, full_g };
    let jet = a.jet.clone();
    let (r, check, full) = py
        .detach(move || -> jetnorm::Result<_> {
            let r = normal_form(&jet, kind, &opts)?;
            let check = verify_certificate(&r);
            let full = r.full_certificate()?;
            Ok((r, check, full))
        })
        .map_err(py_err)?;
    let el = |g: &GroupElementJet| PyGroupElement { g: g.clone(), vars: a.vars.clone() };
    Ok(PyNormalForm {
        normal_form: a.wrap(r.normal_form.clone()),
        certificate: el(&r.certificate),
        preprocessing: r.preprocessing.as_ref().map(el),
        full_certificate: el(&full),
        warnings: r.warnings.clone(),
        explain: r.explain.clone(),
        verified: check.ok,
        issues: check.issues,
        log: serde_json::to_string(&r.log).map_err(|e| JetnormError::new_err(e.to_string()))?,
    })
}

/// Check the differential relations a normal form satisfies. `k` defaults to
/// the leading degree, after removing the scalar part under conjugacy.
#[pyfunction]
#[pyo3(name = "check_pde", signature = (b, k = None, group = "two-sided"))]
fn check_pde_py<'py>(py: Python<'py>, b: &PyMatrix, k: Option<u32>, group: &str) -> PyResult<Bound<'py, PyAny>> {
    let kind = kind(group)?;
    let k = k.unwrap_or_else(|| leading_degree(&b.jet, kind));
    let report = check_pde(&b.jet, k, kind).map_err(py_err)?.with_names(&b.vars);
    to_py(py, &report)
}

fn leading_degree(b: &MatrixJet, kind: GroupKind) -> u32 {
    let shifted = match (kind, scalar_constant(b)) {
        (GroupKind::Conjugacy, Some(l)) => {
            b.sub(&MatrixJet::identity(b.rows(), b.nvars(), b.truncation()).scale(&l)).unwrap_or_else(|_| b.clone())
        }
        _ => b.clone(),
    };
    shifted.valuation().unwrap_or(0)
}

/// Per-degree image test for finite determinacy.
#[pyfunction]
#[pyo3(signature = (a, group = "two-sided", k = 0, j_max = None, max_columns = None))]
fn determinacy<'py>(
    py: Python<'py>,
    a: &PyMatrix,
    group: &str,
    k: u32,
    j_max: Option<u32>,
    max_columns: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = kind(group)?;
    let j_max = j_max.unwrap_or(a.jet.truncation());
    let jet = a.jet.clone();
    let report = py.detach(move || determinacy_report(&jet, kind, k, j_max, &limits(max_columns))).map_err(py_err)?;
    to_py(py, &report.with_names(&a.vars))
}

/// A group element taking the `j`-jet of `a` to that of `b`, or `None`.
#[pyfunction]
#[pyo3(signature = (a, b, group = "two-sided", j = None))]
fn equivalence(a: &PyMatrix, b: &PyMatrix, group: &str, j: Option<u32>) -> PyResult<Option<PyGroupElement>> {
    a.same_ring(b)?;
    let j = j.unwrap_or(a.jet.truncation());
    let g = jet_equivalence(&a.jet, &b.jet, kind(group)?, j).map_err(py_err)?;
    Ok(g.map(|g| PyGroupElement { g, vars: a.vars.clone() }))
}

/// Diagonal form in one variable: `(B, U, V, orders)` with `U·A·V⁻¹ = B`.
/// An order is `None` when that diagonal entry vanishes at this truncation.
#[pyfunction]
fn smith(a: &PyMatrix) -> PyResult<(PyMatrix, PyMatrix, PyMatrix, Vec<Option<u32>>)> {
    let r = one_variable_nf(&a.jet).map_err(py_err)?;
    Ok((a.wrap(r.normal_form), a.wrap(r.u), a.wrap(r.v), r.orders))
}

#[pymodule]
#[pyo3(name = "jetnorm")]
fn jetnorm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyGroupElement>()?;
    m.add_class::<PyNormalForm>()?;
    m.add_function(wrap_pyfunction!(normal_form_py, m)?)?;
    m.add_function(wrap_pyfunction!(check_pde_py, m)?)?;
    m.add_function(wrap_pyfunction!(determinacy, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(smith, m)?)?;
    m.add("JetnormError", py.get_type::<JetnormError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("GuardrailError", py.get_type::<GuardrailError>())?;
    m.add("GROUPS", ["left", "right", "two-sided", "congruence", "conjugacy"])?;
    Ok(())
}
