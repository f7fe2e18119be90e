//! Python bindings. Matrices cross the boundary as nested lists of `complex`,
//! reports and profiles as plain dicts.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gapforge::estimator::{self, OptimizerConfig};
use gapforge::liealg::{self, LieAlgebraBasis};
use gapforge::numkernel::{ComplexMatrix, ComplexVector, C64, DEFAULT_RANK_TOL};
use gapforge::pipeline::{self, AnalysisOptions, CartanWeights, DeclaredStructure};
use gapforge::system::{self, QuantumSystem};
use gapforge::{repkit, witness, Error};

create_exception!(gapforge, GapforgeError, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        3 => PyRuntimeError::new_err(e.to_string()),
        _ => GapforgeError::new_err(e.to_string()),
    }
}

type Rows = Vec<Vec<C64>>;

fn matrix(rows: &Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(to_py)
}

fn matrices(list: &[Rows]) -> PyResult<Vec<ComplexMatrix>> {
    list.iter().map(matrix).collect()
}

fn vector(v: Vec<C64>) -> PyResult<ComplexVector> {
    ComplexVector::new(v).map_err(to_py)
}

fn rows_of(list: &[ComplexMatrix]) -> Vec<Rows> {
    list.iter().map(ComplexMatrix::to_rows).collect()
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn config(seed: u64, starts: usize, max_iters: usize) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        starts,
        max_iters,
        ..Default::default()
    }
}

/// Bilinear control system `ẋ = (A + Σ uᵢBᵢ)x` with `‖A‖ = 1`.
#[pyclass(name = "QuantumSystem", frozen)]
struct PyQuantumSystem {
    inner: QuantumSystem,
}

#[pymethods]
impl PyQuantumSystem {
    #[new]
    fn new(drift: Rows, controls: Vec<Rows>) -> PyResult<Self> {
        let inner = QuantumSystem::new(matrix(&drift)?, matrices(&controls)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Reads a system file; returns the system and the load notes.
    #[staticmethod]
    #[pyo3(signature = (path, normalize = false))]
    fn load(path: PathBuf, normalize: bool) -> PyResult<(Self, Vec<String>)> {
        let (inner, notes) = system::load_system(&path, normalize).map_err(to_py)?;
        Ok((Self { inner }, notes))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn drift(&self) -> Rows {
        self.inner.drift().to_rows()
    }

    #[getter]
    fn controls(&self) -> Vec<Rows> {
        rows_of(self.inner.controls())
    }

    fn __repr__(&self) -> String {
        format!(
            "QuantumSystem(n={}, controls={})",
            self.inner.n(),
            self.inner.controls().len()
        )
    }
}

/// Orthonormal basis of a matrix Lie algebra.
#[pyclass(name = "LieAlgebra", frozen)]
struct PyLieAlgebra {
    inner: LieAlgebraBasis,
}

#[pymethods]
impl PyLieAlgebra {
    /// Bracket closure of the generators.
    #[staticmethod]
    #[pyo3(signature = (generators, tol = DEFAULT_RANK_TOL))]
    fn closure(generators: Vec<Rows>, tol: f64) -> PyResult<Self> {
        let inner = liealg::bracket_closure(&matrices(&generators)?, tol).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn elements(&self) -> Vec<Rows> {
        rows_of(self.inner.elements())
    }

    fn is_closed(&self) -> bool {
        self.inner.is_closed()
    }

    fn orbit_tangent_dim(&self, x: Vec<C64>) -> PyResult<usize> {
        liealg::orbit_tangent_dim(&self.inner, &vector(x)?).map_err(to_py)
    }

    #[pyo3(signature = (trials = 8, seed = 0))]
    fn is_transitive(&self, trials: usize, seed: u64) -> PyResult<bool> {
        liealg::is_transitive(&self.inner, trials, seed).map_err(to_py)
    }

    #[pyo3(signature = (trials = 8, seed = 0))]
    fn profile<'py>(
        &self,
        py: Python<'py>,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = liealg::profile(&self.inner, trials, seed).map_err(to_py)?;
        let text = serde_json::to_string(&p).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }

    fn __repr__(&self) -> String {
        format!("LieAlgebra(n={}, dim={})", self.inner.n(), self.inner.dim())
    }
}

/// Witness pair with its certified bounds.
#[pyclass(name = "WitnessCertificate", frozen)]
struct PyCertificate {
    inner: witness::WitnessCertificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn x(&self) -> Vec<C64> {
        self.inner.x.as_slice().to_vec()
    }

    #[getter]
    fn y(&self) -> Vec<C64> {
        self.inner.y.as_slice().to_vec()
    }

    /// Overlap bound `λ`, or `None` when the certificate is exact.
    #[getter]
    fn overlap_bound(&self) -> Option<f64> {
        self.inner.lambda
    }

    #[getter]
    fn diameter_bound(&self) -> f64 {
        self.inner.diameter_bound
    }

    #[getter]
    fn time_bound(&self) -> f64 {
        self.inner.time_bound
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "WitnessCertificate(kind={}, diameter_bound={}, time_bound={})",
            self.inner.kind.as_str(),
            self.inner.diameter_bound,
            self.inner.time_bound
        )
    }
}

fn cert(r: gapforge::Result<witness::WitnessCertificate>) -> PyResult<PyCertificate> {
    r.map(|inner| PyCertificate { inner }).map_err(to_py)
}

#[pyfunction]
fn su_standard(n: usize) -> PyResult<Vec<Rows>> {
    repkit::su_standard(n).map(|b| rows_of(&b)).map_err(to_py)
}

#[pyfunction]
fn so_embedded(n: usize) -> PyResult<Vec<Rows>> {
    repkit::so_embedded(n).map(|b| rows_of(&b)).map_err(to_py)
}

#[pyfunction]
fn product_lift(a: Vec<Rows>, b: Vec<Rows>) -> PyResult<Vec<Rows>> {
    repkit::product_lift(&matrices(&a)?, &matrices(&b)?)
        .map(|m| rows_of(&m))
        .map_err(to_py)
}

#[pyfunction]
fn wedge_lift_algebra(l: Rows, k: usize) -> PyResult<Rows> {
    repkit::wedge_lift_algebra(&matrix(&l)?, k)
        .map(|m| m.to_rows())
        .map_err(to_py)
}

#[pyfunction]
fn wedge_lift_group(g: Rows, k: usize) -> PyResult<Rows> {
    repkit::wedge_lift_group(&matrix(&g)?, k)
        .map(|m| m.to_rows())
        .map_err(to_py)
}

#[pyfunction]
fn sym_power_su2(m: usize) -> PyResult<Vec<Rows>> {
    repkit::sym_power_su2(m).map(|b| rows_of(&b)).map_err(to_py)
}

#[pyfunction]
fn bound_from_m(lam: f64) -> PyResult<f64> {
    witness::bound_from_m(lam).map_err(to_py)
}

#[pyfunction]
fn time_bound_from_d(delta: f64) -> PyResult<f64> {
    witness::time_bound_from_d(delta).map_err(to_py)
}

#[pyfunction]
fn transitive_certificate(n: usize) -> PyResult<PyCertificate> {
    cert(witness::WitnessCertificate::transitive(n))
}

#[pyfunction]
fn tensor_witness(p: usize, q: usize) -> PyResult<PyCertificate> {
    cert(witness::tensor_witness(p, q))
}

/// Wedge witness for `Λᵏ(ℂⁿ)`; degrees above `n/2` use the Hodge dual.
#[pyfunction]
fn wedge_witness(n: usize, k: usize) -> PyResult<PyCertificate> {
    cert(witness::dual_wedge_witness(n, k))
}

#[pyfunction]
fn cartan_witness(
    h1: Vec<C64>,
    l1: Vec<C64>,
    h2: Vec<C64>,
    l2: Vec<C64>,
) -> PyResult<PyCertificate> {
    cert(witness::cartan_witness(
        &vector(h1)?,
        &vector(l1)?,
        &vector(h2)?,
        &vector(l2)?,
    ))
}

#[pyfunction]
fn reducible_certificate(algebra: &PyLieAlgebra) -> PyResult<Option<PyCertificate>> {
    let Some(split) = liealg::invariant_real_splitting(&algebra.inner).map_err(to_py)? else {
        return Ok(None);
    };
    cert(witness::reducible_witness(
        &split.first,
        &split.second,
        &algebra.inner,
    ))
    .map(Some)
}

/// Returns `(sampled_max, grid_max)`.
#[pyfunction]
#[pyo3(signature = (k, samples = 100_000, grid = 101, seed = 0))]
fn det_sum_oracle(
    py: Python<'_>,
    k: usize,
    samples: u64,
    grid: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let o = py
        .detach(|| witness::det_sum_oracle(k, samples, grid, seed))
        .map_err(to_py)?;
    Ok((o.sampled_max, o.grid_max))
}

#[pyfunction]
#[pyo3(signature = (p = 2, q = 2, samples = 100_000, seed = 0))]
fn tensor_bound_oracle(
    py: Python<'_>,
    p: usize,
    q: usize,
    samples: u64,
    seed: u64,
) -> PyResult<f64> {
    py.detach(|| witness::tensor_bound_oracle(p, q, samples, seed))
        .map_err(to_py)
}

#[pyfunction]
fn dimension_class(n: u64) -> PyResult<&'static str> {
    witness::dimension_class(n)
        .map(|c| c.as_str())
        .map_err(to_py)
}

#[pyfunction]
fn dimension_notes(n: u64) -> PyResult<Vec<String>> {
    witness::dimension_notes(n).map_err(to_py)
}

/// Returns `(abs_max, re_max)` for `sup_g |<gX,Y>|` and `sup_g Re<gX,Y>`.
#[pyfunction]
#[pyo3(signature = (algebra, x, y, seed = 0, starts = 32, max_iters = 500))]
fn sup_overlap(
    py: Python<'_>,
    algebra: &PyLieAlgebra,
    x: Vec<C64>,
    y: Vec<C64>,
    seed: u64,
    starts: usize,
    max_iters: usize,
) -> PyResult<(f64, f64)> {
    let (x, y) = (vector(x)?, vector(y)?);
    let cfg = config(seed, starts, max_iters);
    let o = py
        .detach(|| estimator::sup_overlap(&algebra.inner, &x, &y, &cfg))
        .map_err(to_py)?;
    Ok((o.abs_max, o.re_max))
}

#[pyfunction]
#[pyo3(signature = (algebra, seed = 0, starts = 32, max_iters = 500))]
fn estimate_m(
    py: Python<'_>,
    algebra: &PyLieAlgebra,
    seed: u64,
    starts: usize,
    max_iters: usize,
) -> PyResult<f64> {
    let cfg = config(seed, starts, max_iters);
    py.detach(|| estimator::estimate_m(&algebra.inner, &cfg))
        .map_err(to_py)
}

/// Returns a dict with `D_est`, `M_est`, `R_est` and `converged`.
#[pyfunction]
#[pyo3(signature = (algebra, seed = 0, starts = 32, max_iters = 500))]
fn estimate_d<'py>(
    py: Python<'py>,
    algebra: &PyLieAlgebra,
    seed: u64,
    starts: usize,
    max_iters: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(seed, starts, max_iters);
    let e = py
        .detach(|| estimator::estimate_d(&algebra.inner, &cfg))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("D_est", e.d_est)?;
    d.set_item("M_est", e.m_est)?;
    d.set_item("R_est", e.r_est)?;
    d.set_item("converged", e.converged)?;
    Ok(d)
}

/// Full analysis; returns the report as a dict in the CLI's JSON layout.
#[pyfunction]
#[pyo3(signature = (
    system, seed = 0, starts = 32, max_iters = 500, tol = DEFAULT_RANK_TOL,
    skip_estimate = false, tensor = None, wedge = None, cartan = None
))]
#[allow(clippy::too_many_arguments)]
fn analyze<'py>(
    py: Python<'py>,
    system: &PyQuantumSystem,
    seed: u64,
    starts: usize,
    max_iters: usize,
    tol: f64,
    skip_estimate: bool,
    tensor: Option<(usize, usize)>,
    wedge: Option<(usize, usize)>,
    cartan: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let structure = match (tensor, wedge, cartan) {
        (Some((p, q)), None, None) => Some(DeclaredStructure::Tensor { p, q }),
        (None, Some((n, k)), None) => Some(DeclaredStructure::Wedge { n, k }),
        (None, None, Some(path)) => Some(DeclaredStructure::Cartan(
            CartanWeights::load(&path).map_err(to_py)?,
        )),
        (None, None, None) => None,
        _ => {
            return Err(GapforgeError::new_err(
                "declare at most one of tensor, wedge, cartan",
            ))
        }
    };
    let options = AnalysisOptions {
        tol,
        skip_estimate,
        structure,
        normalize: false,
    };
    let cfg = config(seed, starts, max_iters);
    let text = py
        .detach(|| pipeline::analyze(&system.inner, &cfg, &options).map(|r| r.to_json_string()))
        .map_err(to_py)?;
    json_to_py(py, &text)
}

#[pymodule(name = "gapforge")]
fn gapforge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GapforgeError", m.py().get_type::<GapforgeError>())?;
    m.add_class::<PyQuantumSystem>()?;
    m.add_class::<PyLieAlgebra>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(su_standard, m)?)?;
    m.add_function(wrap_pyfunction!(so_embedded, m)?)?;
    m.add_function(wrap_pyfunction!(product_lift, m)?)?;
    m.add_function(wrap_pyfunction!(wedge_lift_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(wedge_lift_group, m)?)?;
    m.add_function(wrap_pyfunction!(sym_power_su2, m)?)?;
    m.add_function(wrap_pyfunction!(bound_from_m, m)?)?;
    m.add_function(wrap_pyfunction!(time_bound_from_d, m)?)?;
    m.add_function(wrap_pyfunction!(transitive_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_witness, m)?)?;
    m.add_function(wrap_pyfunction!(wedge_witness, m)?)?;
    m.add_function(wrap_pyfunction!(cartan_witness, m)?)?;
    m.add_function(wrap_pyfunction!(reducible_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(det_sum_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_bound_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_class, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_notes, m)?)?;
    m.add_function(wrap_pyfunction!(sup_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_m, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_d, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
