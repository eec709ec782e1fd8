//! Python bindings. Structured results cross the boundary as JSON and come
//! back as plain dicts and lists.

use num::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde::Serialize;

use pstab_core::cli::{run, Document};
use pstab_core::curve::{self, CurveCtx};
use pstab_core::elliptic::{self, labels, Atom, EllipticObject};
use pstab_core::numerics::{self, Rat};
use pstab_core::pstability::{self as ps, TestObject};
use pstab_core::{sheaf, surface};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "CurveClass", module = "pstab", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
struct PyCurveClass(curve::CurveClass);

#[pymethods]
impl PyCurveClass {
    #[new]
    fn new(rank: BigInt, degree: BigInt) -> Self {
        PyCurveClass(curve::CurveClass::new(rank, degree))
    }

    #[getter]
    fn rank(&self) -> BigInt {
        self.0.rank.clone()
    }

    #[getter]
    fn degree(&self) -> BigInt {
        self.0.degree.clone()
    }

    /// Slope as a `(numerator, denominator)` pair in lowest terms.
    fn slope(&self) -> PyResult<(BigInt, BigInt)> {
        let s = self.0.slope().map_err(err)?;
        Ok((s.numer().clone(), s.denom().clone()))
    }

    fn is_sheaf_class(&self) -> bool {
        self.0.is_sheaf_class()
    }

    fn shifted(&self, n: i64) -> Self {
        PyCurveClass(self.0.shifted(n))
    }

    fn fm(&self) -> Self {
        PyCurveClass(elliptic::fm_kclass(&self.0))
    }

    fn __add__(&self, other: &Self) -> Self {
        PyCurveClass(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyCurveClass(&self.0 - &other.0)
    }

    fn __neg__(&self) -> Self {
        PyCurveClass(-&self.0)
    }

    fn __repr__(&self) -> String {
        format!("CurveClass({}, {})", self.0.rank, self.0.degree)
    }
}

#[pyclass(name = "SurfaceClass", module = "pstab", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
struct PySurfaceClass(surface::SurfaceClass);

#[pymethods]
impl PySurfaceClass {
    /// `a0 + aq f_q + ap f_p + (a4_num / a4_den) z`.
    #[new]
    #[pyo3(signature = (a0, aq, ap, a4_num, a4_den = BigInt::from(1)))]
    fn new(a0: BigInt, aq: BigInt, ap: BigInt, a4_num: BigInt, a4_den: BigInt) -> PyResult<Self> {
        if a4_den == BigInt::from(0) {
            return Err(err("zero denominator"));
        }
        Ok(PySurfaceClass(surface::SurfaceClass::new(a0, aq, ap, Rat::new(a4_num, a4_den))))
    }

    #[staticmethod]
    fn polarisation() -> Self {
        PySurfaceClass(surface::SurfaceClass::polarisation())
    }

    #[staticmethod]
    fn todd() -> Self {
        PySurfaceClass(surface::SurfaceClass::todd())
    }

    #[staticmethod]
    fn chern_character(rank: BigInt, c1_q: i64, c1_p: i64, c2: BigInt) -> PyResult<Self> {
        let c1 = surface::SurfaceClass::divisor(c1_q, c1_p);
        surface::SurfaceClass::chern_character(rank, &c1, &Rat::from_integer(c2)).map(PySurfaceClass).map_err(err)
    }

    /// `(a0, aq, ap, a4)` with `a4` as a string when it is not an integer.
    fn components(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    fn c1(&self) -> Self {
        PySurfaceClass(self.0.c1())
    }

    fn c2(&self) -> String {
        self.0.c2().to_string()
    }

    fn cup(&self, other: &Self) -> Self {
        PySurfaceClass(surface::cup(&self.0, &other.0))
    }

    fn intersect(&self, other: &Self) -> PyResult<String> {
        surface::intersect(&self.0, &other.0).map(|r| r.to_string()).map_err(err)
    }

    fn hrr_chi(&self) -> PyResult<BigInt> {
        surface::hrr_chi(&self.0).map_err(err)
    }

    fn euler_pairing(&self, other: &Self) -> PyResult<BigInt> {
        surface::surface_euler_pairing(&self.0, &other.0).map_err(err)
    }

    fn twist(&self, k: BigInt) -> PyResult<Self> {
        surface::twist_by(&self.0, &k, &surface::SurfaceClass::polarisation()).map(PySurfaceClass).map_err(err)
    }

    fn fm_relative(&self) -> PyResult<Self> {
        surface::fm_relative(&self.0).map(PySurfaceClass).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("SurfaceClass({})", self.0)
    }
}

#[pyclass(name = "PDatum", module = "pstab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPDatum(ps::PDatum);

fn object_from_json(text: &str) -> PyResult<TestObject> {
    let doc: Document = serde_json::from_str(text).map_err(err)?;
    match (doc.objects, doc.table) {
        (Some(atoms), None) => Ok(TestObject::Atoms { object: EllipticObject::new(atoms) }),
        (None, Some(table)) => Ok(TestObject::Table { table }),
        _ => Err(err("the document needs exactly one of objects and table")),
    }
}

#[pymethods]
impl PyPDatum {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let datum: ps::PDatum = serde_json::from_str(text).map_err(err)?;
        datum.validate().map_err(err)?;
        Ok(PyPDatum(datum))
    }

    #[staticmethod]
    #[pyo3(name = "prop12")]
    fn gen_prop12(g: u32, big_d: i64, r: i64, d: i64) -> PyResult<Self> {
        let ctx = CurveCtx::with_polarisation(g, big_d).map_err(err)?;
        ps::gen_datum_prop12(&ctx, r, d).map(PyPDatum).map_err(err)
    }

    #[staticmethod]
    #[pyo3(name = "prop14")]
    fn gen_prop14(g: u32, r: i64, d: i64) -> PyResult<Self> {
        ps::gen_datum_prop14(&CurveCtx::new(g), r, d).map(PyPDatum).map_err(err)
    }

    #[staticmethod]
    fn elliptic_torsion(r: i64) -> PyResult<Self> {
        ps::gen_datum_elliptic_torsion(r).map(PyPDatum).map_err(err)
    }

    #[staticmethod]
    fn elliptic_bundle(r: i64) -> PyResult<Self> {
        ps::gen_datum_elliptic_bundle(r).map(PyPDatum).map_err(err)
    }

    fn fm_push(&self) -> PyResult<Self> {
        ps::fm_push_datum(&self.0).map(PyPDatum).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.0).map_err(err)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    /// Verdict for a torsion sheaf supported on the named points.
    fn check_points(&self, py: Python<'_>, points: Vec<String>) -> PyResult<Py<PyAny>> {
        let pts = labels(points).map_err(err)?;
        let object = EllipticObject::torsion_from_points(&pts).map_err(err)?;
        to_py(py, &ps::check_object(&self.0, &TestObject::Atoms { object }).map_err(err)?)
    }

    /// Verdict for a single sheaf `(rank, degree)` placed in cohomological degree `shift`.
    #[pyo3(signature = (rank, degree, shift = 0, support = Vec::new()))]
    fn check_sheaf(
        &self,
        py: Python<'_>,
        rank: i64,
        degree: i64,
        shift: i64,
        support: Vec<String>,
    ) -> PyResult<Py<PyAny>> {
        let atom =
            Atom::new(curve::CurveClass::from_i64(rank, degree), shift, labels(support).map_err(err)?).map_err(err)?;
        let object = EllipticObject::single(atom);
        to_py(py, &ps::check_object(&self.0, &TestObject::Atoms { object }).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("PDatum({:?})", self.0.name)
    }
}

#[pyfunction]
fn euler_pairing(genus: u32, a: &PyCurveClass, b: &PyCurveClass) -> BigInt {
    curve::euler_pairing(&CurveCtx::new(genus), &a.0, &b.0)
}

#[pyfunction]
fn fm_kclass(c: &PyCurveClass) -> PyCurveClass {
    PyCurveClass(elliptic::fm_kclass(&c.0))
}

#[pyfunction]
fn theta_degree_general(genus: u32, r: i64, d: i64) -> PyResult<BigInt> {
    elliptic::theta_degree_general(genus, r, d).map_err(err)
}

#[pyfunction]
fn partition_count(r: u64) -> BigInt {
    numerics::partition_count(r)
}

#[pyfunction]
fn binomial(n: i64, k: i64) -> BigInt {
    numerics::binomial(n, k)
}

#[pyfunction]
fn f_rd_class(py: Python<'_>, genus: u32, r: i64, d: i64) -> PyResult<Py<PyAny>> {
    to_py(py, &sheaf::f_rd_class(&CurveCtx::new(genus), r, d).map_err(err)?)
}

#[pyfunction]
fn sm_rank_det(py: Python<'_>, dim_v: u32, m: u32) -> PyResult<Py<PyAny>> {
    to_py(py, &sheaf::sm_rank_det(dim_v, m).map_err(err)?)
}

/// Verdict of a datum against an object document (`objects` or `table`) given as JSON.
#[pyfunction]
fn check(py: Python<'_>, datum: &PyPDatum, object_json: &str) -> PyResult<Py<PyAny>> {
    let object = object_from_json(object_json)?;
    to_py(py, &ps::check_object(&datum.0, &object).map_err(err)?)
}

#[pyfunction]
fn verify_surface(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let exa = surface::verify_exa_sheaf_lemma().map_err(err)?;
    let tf = surface::verify_torsionfree_lemma().map_err(err)?;
    let moduli = surface::m1_m2_invariants().map_err(err)?;
    to_py(py, &serde_json::json!({ "exa_sheaf": exa, "torsion_free": tf, "moduli": moduli }))
}

/// Runs the command-line front end in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_command(args: &Bound<'_, PyList>) -> PyResult<(i32, String, String)> {
    let mut argv = vec!["pstab".to_string()];
    for a in args.iter() {
        argv.push(a.extract()?);
    }
    let out = run(argv);
    Ok((out.code, out.stdout, out.stderr))
}

#[pymodule]
fn pstab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurveClass>()?;
    m.add_class::<PySurfaceClass>()?;
    m.add_class::<PyPDatum>()?;
    m.add_function(wrap_pyfunction!(euler_pairing, m)?)?;
    m.add_function(wrap_pyfunction!(fm_kclass, m)?)?;
    m.add_function(wrap_pyfunction!(theta_degree_general, m)?)?;
    m.add_function(wrap_pyfunction!(partition_count, m)?)?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(f_rd_class, m)?)?;
    m.add_function(wrap_pyfunction!(sm_rank_det, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(verify_surface, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
