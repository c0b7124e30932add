//! Python bindings for `lattice_theta`.
//!
//! Points of the upper half-plane are passed as separate `x, y` floats; every function that
//! sums a series takes an optional `tol` for the tail tolerance. Domain errors raise
//! `ValueError`.

use std::collections::BTreeMap;

use lattice_theta::competing_functionals::{self as cf, FunctionalKind};
use lattice_theta::modular_domain::{self as md, GroupId};
use lattice_theta::mueller_ho::{self as mh, Displacement};
use lattice_theta::report;
use lattice_theta::theta_kernel::{self as tk, HalfPlanePoint, SeriesTruncation};
use lattice_theta::verifier::{self, Suite, SuiteGrids};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: lattice_theta::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn trunc(tol: Option<f64>) -> PyResult<SeriesTruncation> {
    match tol {
        Some(t) => SeriesTruncation::new(SeriesTruncation::DEFAULT_MAX_INDEX, t).map_err(py_err),
        None => Ok(SeriesTruncation::default()),
    }
}

fn point(x: f64, y: f64) -> PyResult<HalfPlanePoint> {
    HalfPlanePoint::new(x, y).map_err(py_err)
}

fn kind(name: &str) -> PyResult<FunctionalKind> {
    match name {
        "W1" | "w1" => Ok(FunctionalKind::W1),
        "W2" | "w2" => Ok(FunctionalKind::W2),
        other => Err(PyValueError::new_err(format!("kind must be 'W1' or 'W2', got {other:?}"))),
    }
}

/// A point of the minimizer trajectory of `W1` or `W2`.
#[pyclass(frozen, get_all, module = "lattice_theta_py")]
#[derive(Clone)]
struct TrajectoryPoint {
    rho: f64,
    x: f64,
    y: f64,
    branch: String,
}

#[pymethods]
impl TrajectoryPoint {
    fn __repr__(&self) -> String {
        format!("TrajectoryPoint(rho={}, x={}, y={}, branch='{}')", self.rho, self.x, self.y, self.branch)
    }
}

/// `J(z;a,b)` with its first and second `(a,b)`-derivatives.
#[pyclass(frozen, get_all, module = "lattice_theta_py")]
#[derive(Clone)]
struct JJet {
    value: f64,
    da: f64,
    db: f64,
    daa: f64,
    dab: f64,
    dbb: f64,
    tail: f64,
}

#[pymethods]
impl JJet {
    fn gradient_norm(&self) -> f64 {
        self.da.hypot(self.db)
    }

    fn hessian_det(&self) -> f64 {
        self.daa * self.dbb - self.dab * self.dab
    }

    fn __repr__(&self) -> String {
        format!("JJet(value={}, da={}, db={}, tail={})", self.value, self.da, self.db, self.tail)
    }
}

/// One row of the Mueller-Ho phase diagram.
#[pyclass(frozen, get_all, module = "lattice_theta_py")]
#[derive(Clone)]
struct PhaseRow {
    alpha: f64,
    shape: String,
    x: f64,
    y: f64,
    angle_or_ratio: f64,
    energy: f64,
    a: f64,
    b: f64,
    below_alpha0: bool,
}

#[pymethods]
impl PhaseRow {
    fn __repr__(&self) -> String {
        format!(
            "PhaseRow(alpha={}, shape='{}', x={}, y={}, a={}, b={})",
            self.alpha, self.shape, self.x, self.y, self.a, self.b
        )
    }
}

/// One verification check.
#[pyclass(frozen, get_all, module = "lattice_theta_py")]
#[derive(Clone)]
struct Check {
    name: String,
    expected: Option<f64>,
    computed: f64,
    tolerance: f64,
    passed: bool,
}

#[pymethods]
impl Check {
    fn __repr__(&self) -> String {
        format!("Check(name='{}', computed={}, passed={})", self.name, self.computed, self.passed)
    }
}

impl From<report::Check> for Check {
    fn from(c: report::Check) -> Self {
        Check { name: c.name, expected: c.expected, computed: c.computed, tolerance: c.tolerance, passed: c.pass }
    }
}

/// `θ(s;z)` on the lattice `ℤ ⊕ zℤ` normalized to unit covolume.
#[pyfunction]
#[pyo3(signature = (s, x, y, tol=None))]
fn theta(s: f64, x: f64, y: f64, tol: Option<f64>) -> PyResult<f64> {
    tk::theta2d(s, point(x, y)?, trunc(tol)?).map_err(py_err)
}

/// The midpoint-shifted companion `θ(s; (z+1)/2)`.
#[pyfunction]
#[pyo3(signature = (s, x, y, tol=None))]
fn theta_shifted(s: f64, x: f64, y: f64, tol: Option<f64>) -> PyResult<f64> {
    tk::theta2d_shifted(s, point(x, y)?, trunc(tol)?).map_err(py_err)
}

/// `(value, tail bound)` of `θ(s;z)`, or of its shifted companion when `shifted` is set.
#[pyfunction]
#[pyo3(signature = (s, x, y, shifted=false, tol=None))]
fn theta_estimate(s: f64, x: f64, y: f64, shifted: bool, tol: Option<f64>) -> PyResult<(f64, f64)> {
    let z = point(x, y)?;
    let e = if shifted { tk::theta2d_shifted_estimate(s, z, trunc(tol)?) } else { tk::theta2d_estimate(s, z, trunc(tol)?) };
    e.map(|e| (e.value, e.tail)).map_err(py_err)
}

/// `W1,ρ(z)` or `W2,ρ(z)`.
#[pyfunction]
#[pyo3(signature = (which, rho, x, y, tol=None))]
fn w_eval(which: &str, rho: f64, x: f64, y: f64, tol: Option<f64>) -> PyResult<f64> {
    cf::w_eval(kind(which)?, rho, point(x, y)?, trunc(tol)?).map_err(py_err)
}

/// Closed-form minimizer of `W1,ρ` or `W2,ρ`.
#[pyfunction]
fn minimizer(which: &str, rho: f64) -> PyResult<TrajectoryPoint> {
    let p = cf::minimizer(kind(which)?, rho).map_err(py_err)?;
    Ok(TrajectoryPoint { rho: p.rho, x: p.z.x(), y: p.z.y(), branch: p.branch.to_string() })
}

/// The branch thresholds `ρ₁, ρ₂, σ₁ₐ, σ₁ᵦ, σ₂ₐ, σ₂ᵦ` in binary64.
#[pyfunction]
fn thresholds() -> BTreeMap<&'static str, f64> {
    let t = cf::thresholds();
    BTreeMap::from([
        ("rho1", t.rho1),
        ("rho2", t.rho2),
        ("sigma1a", t.sigma1a),
        ("sigma1b", t.sigma1b),
        ("sigma2a", t.sigma2a),
        ("sigma2b", t.sigma2b),
    ])
}

/// Thresholds as decimal strings from the extended-precision engine.
#[pyfunction]
#[pyo3(signature = (digits=32))]
fn thresholds_extended(digits: usize) -> PyResult<BTreeMap<&'static str, String>> {
    let e = lattice_theta::extended::thresholds_extended(digits).map_err(py_err)?;
    Ok(e.rows().into_iter().map(|(k, v)| (k, v.to_string())).collect())
}

/// Reduce `z` into the fundamental domain of `group` ('Gamma', 'G1' or 'G2').
/// Returns the reduced `(x, y)` and the applied transformation as text.
#[pyfunction]
#[pyo3(signature = (x, y, group="G1"))]
fn reduce(x: f64, y: f64, group: &str) -> PyResult<(f64, f64, String)> {
    let g = match group {
        "Gamma" | "gamma" => GroupId::Gamma,
        "G1" | "g1" => GroupId::G1,
        "G2" | "g2" => GroupId::G2,
        other => return Err(PyValueError::new_err(format!("group must be 'Gamma', 'G1' or 'G2', got {other:?}"))),
    };
    let (w, word) = md::reduce(point(x, y)?, g).map_err(py_err)?;
    Ok((w.x(), w.y(), word.to_string()))
}

/// `J(z;a,b)` with derivatives.
#[pyfunction]
#[pyo3(signature = (x, y, a, b, tol=None))]
fn j_jet(x: f64, y: f64, a: f64, b: f64, tol: Option<f64>) -> PyResult<JJet> {
    let d = Displacement::new(a, b).map_err(py_err)?;
    let j = mh::j_jet(point(x, y)?, d, trunc(tol)?).map_err(py_err)?;
    Ok(JJet { value: j.value, da: j.da, db: j.db, daa: j.daa, dab: j.dab, dbb: j.dbb, tail: j.tail })
}

/// The Mueller-Ho energy `θ(1;z) + αJ(z;a,b)`.
#[pyfunction]
#[pyo3(signature = (alpha, x, y, a, b, tol=None))]
fn energy(alpha: f64, x: f64, y: f64, a: f64, b: f64, tol: Option<f64>) -> PyResult<f64> {
    let d = Displacement::new(a, b).map_err(py_err)?;
    mh::energy(alpha, point(x, y)?, d, trunc(tol)?).map_err(py_err)
}

/// `(α₁, α₂)`.
#[pyfunction]
fn alpha_thresholds() -> (f64, f64) {
    mh::alpha_thresholds()
}

/// `(α₀, θ_{α₀}, rough upper bound)`.
#[pyfunction]
#[pyo3(signature = (tol=None))]
fn solve_alpha0(tol: Option<f64>) -> PyResult<(f64, f64, f64)> {
    let a = mh::solve_alpha0(trunc(tol)?).map_err(py_err)?;
    Ok((a.alpha0, a.theta_alpha0, a.rough_bound))
}

/// Phase rows for each `α` in `alphas`.
#[pyfunction]
#[pyo3(signature = (alphas, tol=None))]
fn phase_sweep(alphas: Vec<f64>, tol: Option<f64>) -> PyResult<Vec<PhaseRow>> {
    let rows = mh::phase_sweep(&alphas, trunc(tol)?).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| PhaseRow {
            alpha: r.alpha,
            shape: r.shape.to_string(),
            x: r.z.x(),
            y: r.z.y(),
            angle_or_ratio: r.angle_or_ratio,
            energy: r.energy,
            a: r.displacement.a(),
            b: r.displacement.b(),
            below_alpha0: r.below_alpha0,
        })
        .collect())
}

/// Grid search with local refinement; returns `(x, y, value, mesh_x, mesh_y)`.
#[pyfunction]
#[pyo3(signature = (which, rho, grid=400, tol=None))]
fn brute_minimize(which: &str, rho: f64, grid: usize, tol: Option<f64>) -> PyResult<(f64, f64, f64, f64, f64)> {
    let m = verifier::brute_minimize(kind(which)?, rho, grid, trunc(tol)?).map_err(py_err)?;
    Ok((m.z.x(), m.z.y(), m.value, m.mesh_x, m.mesh_y))
}

/// Run a verification suite: 'identities', 'thresholds', 'appendix', 'oracle' or 'all'.
#[pyfunction]
#[pyo3(signature = (suite, grid=400, tol=None))]
fn verify(suite: &str, grid: usize, tol: Option<f64>) -> PyResult<Vec<Check>> {
    let s = match suite {
        "identities" => Suite::Identities,
        "thresholds" => Suite::Thresholds,
        "appendix" => Suite::Appendix,
        "oracle" => Suite::Oracle,
        "all" => Suite::All,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    let grids = SuiteGrids { brute: grid, ..SuiteGrids::default() };
    let checks = verifier::run_suite(s, grids, trunc(tol)?).map_err(py_err)?;
    Ok(checks.into_iter().map(Check::from).collect())
}

#[pymodule]
fn lattice_theta_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TrajectoryPoint>()?;
    m.add_class::<JJet>()?;
    m.add_class::<PhaseRow>()?;
    m.add_class::<Check>()?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(theta_shifted, m)?)?;
    m.add_function(wrap_pyfunction!(theta_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(w_eval, m)?)?;
    m.add_function(wrap_pyfunction!(minimizer, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds_extended, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(j_jet, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(solve_alpha0, m)?)?;
    m.add_function(wrap_pyfunction!(phase_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(brute_minimize, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
