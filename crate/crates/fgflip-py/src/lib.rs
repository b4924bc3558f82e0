//! Python bindings. Structured results come back as plain dicts decoded from
//! the same JSON documents the command-line tool emits.

use fgflip::braidgraph::{self, snake_reduce_doubled, standard_graph, FaceId, Family, LabeledBraidGraph};
use fgflip::triangle::{self as tri, Side};
use fgflip::wordalgebra::{self as wa, FlipAlgebra};
use fgflip::{modulardata, qdilog, SkewVector};
use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde_json::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// Vector of a triangle space, with exact rational coefficients.
#[pyclass(name = "Vector", module = "fgflip_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVector {
    inner: SkewVector,
}

#[pymethods]
impl PyVector {
    /// Pairing ε(self, other) as a string fraction.
    fn pair(&self, other: &PyVector) -> PyResult<String> {
        if !self.inner.same_space(&other.inner) {
            return Err(err("vectors live in different spaces"));
        }
        Ok(self.inner.pair(&other.inner).to_string())
    }

    /// `{label: "p/q"}` for the nonzero coordinates.
    fn terms(&self) -> Vec<(String, String)> {
        self.inner.terms().map(|(i, x)| (self.inner.space().label(i).to_string(), x.to_string())).collect()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __add__(&self, other: &PyVector) -> PyResult<PyVector> {
        self.inner.checked_add(&other.inner).map(|inner| PyVector { inner }).map_err(err)
    }

    fn __sub__(&self, other: &PyVector) -> PyResult<PyVector> {
        self.inner.checked_add(&-other.inner.clone()).map(|inner| PyVector { inner }).map_err(err)
    }

    fn __neg__(&self) -> PyVector {
        PyVector { inner: -self.inner.clone() }
    }

    fn __eq__(&self, other: &PyVector) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Vector({})", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// The triangle space ∇_N.
#[pyclass(name = "Triangle", module = "fgflip_py", frozen)]
struct PyTriangle {
    inner: tri::Triangle,
}

#[pymethods]
impl PyTriangle {
    #[new]
    fn new(big_n: usize) -> PyResult<Self> {
        tri::Triangle::new(big_n).map(|inner| PyTriangle { inner }).map_err(err)
    }

    #[getter(N)]
    fn big_n(&self) -> usize {
        self.inner.big_n()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.space().dim()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.space().labels().iter().map(|l| l.to_string()).collect()
    }

    /// Basis vector e_{abc}.
    fn e(&self, a: usize, b: usize, c: usize) -> PyResult<PyVector> {
        self.inner
            .index(a, b, c)
            .map(|i| PyVector { inner: self.inner.space().basis(i) })
            .ok_or_else(|| err(format!("({a}, {b}, {c}) is not in C_{}", self.inner.big_n())))
    }

    /// Named vector such as `"ne_{2,1}"` or `"sw_2"`.
    fn vector(&self, name: &str) -> PyResult<PyVector> {
        self.inner.special_vectors().remove(name).map(|inner| PyVector { inner }).ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    fn special_vectors(&self) -> Vec<(String, PyVector)> {
        self.inner.special_vectors().into_iter().map(|(k, inner)| (k, PyVector { inner })).collect()
    }

    /// Fundamental weights on one side: "ne", "se", "nw" or "sw".
    fn fundamental_weights(&self, side: &str) -> PyResult<Vec<PyVector>> {
        let side = match side {
            "ne" => Side::Ne,
            "se" => Side::Se,
            "nw" => Side::Nw,
            "sw" => Side::Sw,
            _ => return Err(err(format!("unknown side {side:?}"))),
        };
        Ok(self.inner.fundamental_weights(side).into_iter().map(|inner| PyVector { inner }).collect())
    }

    /// The full pairing matrix as string fractions.
    fn pairing_matrix(&self) -> Vec<Vec<String>> {
        self.inner.space().matrix().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    /// Determinant of the B⁻ × B⁺ pairing, as a string fraction.
    fn borel_determinant(&self) -> String {
        self.inner.borel_nondegeneracy().to_string()
    }

    /// Pairing-law tables; returns the number of pairings checked.
    fn verify_tables(&self) -> PyResult<usize> {
        let r = tri::pairing_table_report(&self.inner);
        match r.first_mismatch {
            None => Ok(r.checked),
            Some(m) => Err(err(m)),
        }
    }

    fn __repr__(&self) -> String {
        format!("Triangle(N={})", self.inner.big_n())
    }
}

/// Labeled braid graph.
#[pyclass(name = "BraidGraph", module = "fgflip_py", frozen)]
struct PyBraidGraph {
    inner: LabeledBraidGraph,
}

fn family(s: &str) -> PyResult<Family> {
    s.parse().map_err(err)
}

#[pymethods]
impl PyBraidGraph {
    /// Γ_E or Γ_F on ∇_N.
    #[staticmethod]
    #[pyo3(signature = (big_n, family = "E"))]
    fn standard(big_n: usize, family: &str) -> PyResult<Self> {
        let t = tri::Triangle::new(big_n).map_err(err)?;
        Ok(PyBraidGraph { inner: standard_graph(&t, self::family(family)?) })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let v: Value = serde_json::from_str(s).map_err(err)?;
        LabeledBraidGraph::from_json(&v).map(|inner| PyBraidGraph { inner }).map_err(err)
    }

    fn word(&self) -> String {
        self.inner.word().to_string()
    }

    /// `[(strip, cell, move kind)]`.
    fn mutable_faces(&self) -> Vec<(usize, usize, String)> {
        self.inner.mutable_faces().into_iter().map(|(f, k)| (f.strip, f.cell, format!("{k:?}"))).collect()
    }

    fn label(&self, strip: usize, cell: usize) -> PyResult<PyVector> {
        self.inner.label(FaceId::new(strip, cell)).map(|v| PyVector { inner: v.clone() }).map_err(err)
    }

    fn mutate(&self, strip: usize, cell: usize) -> PyResult<PyBraidGraph> {
        self.inner.mutate(FaceId::new(strip, cell)).map(|inner| PyBraidGraph { inner }).map_err(err)
    }

    /// Terms of the partition function between boundary levels a < b.
    fn partition_function(&self, a: usize, b: usize) -> PyResult<Vec<PyVector>> {
        let z = self.inner.partition_function(a, b).map_err(err)?;
        Ok(z.terms().iter().cloned().map(|inner| PyVector { inner }).collect())
    }

    /// Whether conjugating by the face's dilogarithm matches the mutated graph.
    fn check_mutation(&self, strip: usize, cell: usize, a: usize, b: usize) -> PyResult<bool> {
        wa::verify_zmut(&self.inner, FaceId::new(strip, cell), a, b).map(|c| c.passed).map_err(err)
    }

    fn is_coloring(&self) -> bool {
        self.inner.check_coloring().is_ok()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!("BraidGraph({})", self.inner.word())
    }
}

/// Runs one verification ("pentagon", "mu", "zmut", "serre", "r-eq-f",
/// "decomposition", "symmetry") and returns its report.
#[pyfunction]
fn verify<'py>(py: Python<'py>, kind: &str, big_n: usize) -> PyResult<Bound<'py, PyAny>> {
    let v = match kind {
        "pentagon" => {
            let t = wa::verify_braided_pentagon(big_n).map_err(err)?;
            t.replay().map_err(err)?;
            let mut j = t.to_json();
            j["passed"] = Value::Bool(true);
            j
        }
        "mu" => {
            let m = wa::verify_mu_pentagon(big_n).map_err(err)?;
            let mut j = m.report.to_json();
            j["pentagon_steps"] = m.pentagon.len().into();
            j
        }
        "zmut" => wa::verify_zmut_standard(big_n).map_err(err)?.to_json(),
        "serre" => {
            let mut r = wa::Report::new(format!("Serre relations, N={big_n}"));
            for i in 2..big_n {
                r.absorb("", wa::verify_serre(big_n, i).map_err(err)?);
            }
            r.to_json()
        }
        "r-eq-f" => wa::verify_r_equals_f(big_n).map_err(err)?.to_json(),
        "decomposition" => wa::verify_rank_one_decomposition(big_n).map_err(err)?.to_json(),
        "symmetry" => wa::verify_symmetry_maps(big_n).map_err(err)?.to_json(),
        _ => return Err(err(format!("unknown verification {kind:?}"))),
    };
    to_py(py, &v)
}

/// Letters of a flip word ("F", "F''", "K", "Ft", "tF'", "tF''", "tK", "dual").
#[pyfunction]
fn flip_word(big_n: usize, variant: &str) -> PyResult<Vec<String>> {
    let fa = FlipAlgebra::new(big_n).map_err(err)?;
    let v = variant.parse().map_err(err)?;
    Ok(fa.factors(v).letters().iter().map(|l| l.to_string()).collect())
}

/// Doubled snake reduction; returns `(reached P_n, number of mutations)`.
#[pyfunction]
fn snake_reduce(n: usize) -> PyResult<(bool, usize)> {
    let r = snake_reduce_doubled(n).map_err(err)?;
    Ok((r.reached_target(), r.schedule.len()))
}

/// Exponents of the standard generator 𝔼_{r,s} or 𝔽_{r,s} on ∇_N.
#[pyfunction]
#[pyo3(signature = (big_n, r, s, family = "E"))]
fn standard_generator(big_n: usize, r: usize, s: usize, family: &str) -> PyResult<Vec<PyVector>> {
    let t = tri::Triangle::new(big_n).map_err(err)?;
    let z = braidgraph::standard_generator(&t, self::family(family)?, r, s).map_err(err)?;
    Ok(z.terms().iter().cloned().map(|inner| PyVector { inner }).collect())
}

/// `W_θ(z)` on the strip |Im z| < π(1 + 1/θ).
#[pyfunction]
fn w(theta: f64, z: Complex64) -> PyResult<Complex64> {
    let p = qdilog::QdParams::new(theta).map_err(err)?;
    if z.im == 0.0 {
        return qdilog::w_real(&p, z.re).map(|r| Complex64::new(r.value, 0.0)).map_err(err);
    }
    qdilog::w_complex(&p, z).map_err(err)
}

/// `V_θ(z) = exp(W_θ(z)/2πi)`.
#[pyfunction]
fn v(theta: f64, z: Complex64) -> PyResult<Complex64> {
    let p = qdilog::QdParams::new(theta).map_err(err)?;
    qdilog::v(&p, z).map_err(err)
}

#[pyfunction]
fn phi(hbar: f64, z: Complex64) -> PyResult<Complex64> {
    qdilog::phi_complex(hbar, z).map_err(err)
}

/// `F_ℏ(r)` for r > 0.
#[pyfunction]
fn quantum_exp(hbar: f64, r: f64) -> PyResult<Complex64> {
    qdilog::quantum_exp(hbar, r).map_err(err)
}

/// Residual table of the functional equations ("quick" or "all").
#[pyfunction]
#[pyo3(signature = (theta, suite = "quick"))]
fn check_functional_equations<'py>(py: Python<'py>, theta: f64, suite: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = match suite {
        "quick" => qdilog::Suite::Quick,
        "all" => qdilog::Suite::All,
        _ => return Err(err(format!("unknown suite {suite:?}"))),
    };
    let r = qdilog::check_functional_equations(theta, s).map_err(err)?;
    let mut j = serde_json::to_value(&r).map_err(err)?;
    j["passed"] = r.passed().into();
    to_py(py, &j)
}

#[pyfunction]
fn modular_report<'py>(py: Python<'py>, big_n: usize, hbar: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = modulardata::modular_report(big_n, hbar).map_err(err)?;
    let mut j = r.to_json();
    j["passed"] = r.passed().into();
    to_py(py, &j)
}

/// Runs the command-line front end in-process; returns `(exit code, output)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let r = fgflip::cli::run(std::iter::once("fgflip".to_string()).chain(args));
    (r.exit_code(), r.render())
}

#[pymodule]
fn fgflip_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA", fgflip::SCHEMA)?;
    m.add_class::<PyVector>()?;
    m.add_class::<PyTriangle>()?;
    m.add_class::<PyBraidGraph>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(flip_word, m)?)?;
    m.add_function(wrap_pyfunction!(snake_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(standard_generator, m)?)?;
    m.add_function(wrap_pyfunction!(w, m)?)?;
    m.add_function(wrap_pyfunction!(v, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_exp, m)?)?;
    m.add_function(wrap_pyfunction!(check_functional_equations, m)?)?;
    m.add_function(wrap_pyfunction!(modular_report, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
