use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use std::sync::Arc;
use trapped_core::harness::{self, ExperimentConfig, OracleTable};
use trapped_core::oracle::{self, HolomorphicPoly, Part};
use trapped_core::sphere::{self, CapDomain, ScalarField};
use trapped_core::surface::{self, build_immersion};
use trapped_core::variational::{self, ClampedBoundaryData, Tolerances};
use trapped_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::SolverFailure { .. } | Error::EigenNoConvergence { .. } | Error::Bracket(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_part(part: &str) -> PyResult<Part> {
    match part {
        "re" => Ok(Part::Re),
        "im" => Ok(Part::Im),
        other => Err(PyValueError::new_err(format!("part must be 're' or 'im', got {other:?}"))),
    }
}

/// Polar grid on the cap `{θ < theta0}` of the unit sphere.
#[pyclass(frozen, module = "trapped")]
struct Grid {
    inner: Arc<sphere::Grid>,
}

#[pymethods]
impl Grid {
    #[new]
    #[pyo3(signature = (theta0, nr = 24, ntheta = 48))]
    fn new(theta0: f64, nr: usize, ntheta: usize) -> PyResult<Self> {
        let domain = CapDomain::new(theta0).map_err(py_err)?;
        Ok(Self {
            inner: sphere::Grid::shared(domain, nr, ntheta).map_err(py_err)?,
        })
    }

    #[getter]
    fn theta0(&self) -> f64 {
        self.inner.domain().theta0()
    }

    #[getter]
    fn nr(&self) -> usize {
        self.inner.nr()
    }

    #[getter]
    fn ntheta(&self) -> usize {
        self.inner.ntheta()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Unit normals `ν` at the nodes, one `[ν₁, ν₂, ν₃]` per node.
    fn nu(&self) -> Vec<[f64; 3]> {
        self.inner.nodes().iter().map(|n| n.sphere.nu).collect()
    }

    /// Quadrature weights of the bulk rule on the sphere.
    fn weights(&self) -> Vec<f64> {
        self.inner.nodes().iter().map(|n| n.weight).collect()
    }

    /// Stereographic chart coordinates `(u, v)` of the nodes.
    fn chart(&self) -> Vec<(f64, f64)> {
        self.inner.nodes().iter().map(|n| (n.chart.u, n.chart.v)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid(theta0={}, nr={}, ntheta={})", self.theta0(), self.nr(), self.ntheta())
    }
}

/// Scalar field on a grid, stored in exact modal form.
#[pyclass(frozen, module = "trapped")]
struct Field {
    inner: ScalarField,
}

impl Field {
    fn wrap(inner: ScalarField) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl Field {
    /// Fit nodal values, ordered ring by ring from the pole.
    #[staticmethod]
    fn from_values(grid: &Grid, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self::wrap(ScalarField::new(grid.inner.clone(), values).map_err(py_err)?))
    }

    #[staticmethod]
    fn constant(grid: &Grid, c: f64) -> Self {
        Self::wrap(ScalarField::constant(&grid.inner, c))
    }

    /// `a · ν`.
    #[staticmethod]
    fn linear(grid: &Grid, a: [f64; 3]) -> Self {
        Self::wrap(ScalarField::linear(&grid.inner, a))
    }

    /// `Re` or `Im` of `w̄ p(w)/(1+|w|²)` for `p` with complex (or real)
    /// coefficients, constant term first.
    #[staticmethod]
    #[pyo3(signature = (grid, coeffs, part = "re"))]
    fn holomorphic(grid: &Grid, coeffs: Vec<Complex64>, part: &str) -> PyResult<Self> {
        let poly = HolomorphicPoly::new(coeffs).map_err(py_err)?;
        let exact = oracle::q_from_holomorphic(&poly, parse_part(part)?, grid.inner.domain()).map_err(py_err)?;
        Ok(Self::wrap(exact.field(&grid.inner)))
    }

    /// Clamped bump `(1 − r²/R²)³ (c₀ + c₁ν₁ + c₂ν₂ + c₃ν₃)`.
    #[staticmethod]
    #[pyo3(signature = (grid, modulation = [1.0, 0.0, 0.0, 0.0]))]
    fn bump(grid: &Grid, modulation: [f64; 4]) -> Self {
        Self::wrap(harness::bump(&grid.inner, modulation))
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    fn __add__(&self, other: &Field) -> PyResult<Self> {
        Ok(Self::wrap(self.inner.axpy(1.0, &other.inner).map_err(py_err)?))
    }

    fn __sub__(&self, other: &Field) -> PyResult<Self> {
        Ok(Self::wrap(self.inner.axpy(-1.0, &other.inner).map_err(py_err)?))
    }

    fn __mul__(&self, t: f64) -> Self {
        Self::wrap(self.inner.scale(t))
    }

    fn __rmul__(&self, t: f64) -> Self {
        self.__mul__(t)
    }

    /// Laplace–Beltrami operator of the sphere.
    fn hat_laplacian(&self) -> Self {
        Self::wrap(sphere::hat_laplacian(&self.inner))
    }

    /// `Δ̂(Δ̂ + 2)`.
    fn el_operator(&self) -> Self {
        Self::wrap(sphere::el_operator(&self.inner))
    }

    fn integrate(&self) -> f64 {
        sphere::integrate_bulk(&self.inner)
    }

    /// Bulk, boundary and total area of the induced graph.
    fn area<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &variational::area(&self.inner))
    }

    /// `∫Δ̂f(Δ̂+2)f`.
    fn dirichlet_energy(&self) -> f64 {
        variational::dirichlet_energy(&self.inner)
    }

    /// `∫|Df|²`.
    fn gradient_energy(&self) -> f64 {
        variational::gradient_energy(&self.inner)
    }

    /// Summary of the immersion into R⁴₁ built from this field.
    fn immersion<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let imm = build_immersion(&self.inner);
        let y: Vec<[f64; 4]> = imm.samples().iter().map(|s| s.y.0).collect();
        let density: Vec<f64> = imm.samples().iter().map(|s| s.density).collect();
        let report = serde_json::json!({
            "y": y,
            "density": density,
            "degenerate_nodes": imm.degenerate_count(),
            "fully_degenerate": imm.is_fully_degenerate(),
            "mt_residual": surface::mt_residual(&imm).max,
            "mean_curvature_residual": surface::mean_curvature_residual(&imm).max,
            "conformality": surface::conformality_check(&imm).max_ratio,
        });
        to_py(py, &report)
    }

    /// Points `Df + fν` of the shadow surface in R³.
    fn shadow(&self) -> Vec<[f64; 3]> {
        surface::shadow_surface(&self.inner).points
    }

    /// Normalised weak residual of the Euler–Lagrange equation.
    fn weak_el_residual(&self) -> PyResult<f64> {
        variational::ClampedSpace::new(self.inner.grid())
            .weak_el_residual(&self.inner)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Field(nodes={}, max_abs={:.6e})", self.inner.values().len(), self.inner.max_abs())
    }
}

/// First buckling eigenvalue of the cap and its minimising mode.
#[pyfunction]
fn buckling_eigenvalue<'py>(py: Python<'py>, grid: &Grid) -> PyResult<Bound<'py, PyAny>> {
    let e = variational::buckling_eigenvalue(&grid.inner).map_err(py_err)?;
    let report = serde_json::json!({
        "beta1": e.beta1,
        "mode": e.mode,
        "oracle": e.oracle_value,
        "per_mode": e.per_mode,
        "rayleigh_residual": e.rayleigh_residual,
        "clamp_residual": e.clamp_residual,
    });
    to_py(py, &report)
}

/// Axisymmetric clamped buckling eigenvalue by shooting.
#[pyfunction]
fn cap_buckling_shooting(theta0: f64) -> PyResult<f64> {
    oracle::cap_buckling_shooting(theta0).map_err(py_err)
}

/// `j₁,₁² / R²` for the flat disk of radius `R`.
#[pyfunction]
fn flat_disk_buckling(radius: f64) -> PyResult<f64> {
    oracle::flat_disk_buckling(radius).map_err(py_err)
}

/// Solve the Euler–Lagrange equation with the boundary value and normal
/// derivative of `data`.
#[pyfunction]
fn solve_clamped(data: &Field) -> PyResult<Field> {
    let bc = ClampedBoundaryData::from_field(&data.inner);
    let sol = variational::solve_el_clamped(data.inner.grid(), &bc).map_err(py_err)?;
    Ok(Field::wrap(sol.field))
}

fn tolerances(overrides: Option<&Bound<'_, PyAny>>) -> PyResult<Tolerances> {
    let Some(obj) = overrides else {
        return Ok(Tolerances::default());
    };
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Dirichlet principle check for an EL solution `q` and a clamped
/// competitor `f`.
#[pyfunction]
#[pyo3(signature = (q, f, beta1, tolerances = None))]
fn dirichlet_principle_check<'py>(
    py: Python<'py>,
    q: &Field,
    f: &Field,
    beta1: f64,
    tolerances: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let tol = self::tolerances(tolerances)?;
    let r = variational::dirichlet_principle_check(&q.inner, &f.inner, beta1, &tol).map_err(py_err)?;
    to_py(py, &r)
}

/// Area comparison of the zero mean curvature graph of `q` with the
/// marginally trapped graph of a clamped competitor `f`.
#[pyfunction]
#[pyo3(signature = (q, f, beta1, tolerances = None))]
fn theorem1_check<'py>(
    py: Python<'py>,
    q: &Field,
    f: &Field,
    beta1: f64,
    tolerances: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let tol = self::tolerances(tolerances)?;
    let r = variational::theorem1_check(&q.inner, &f.inner, beta1, &tol).map_err(py_err)?;
    to_py(py, &r)
}

/// Run one harness command with `key=value` overrides and return its
/// report. Files are written to `out_dir`.
#[pyfunction]
#[pyo3(signature = (command, overrides = Vec::new(), table = "exact"))]
fn run<'py>(py: Python<'py>, command: &str, overrides: Vec<String>, table: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::resolve(None, &overrides).map_err(py_err)?;
    let outcome = match command {
        "verify" => harness::cmd_verify(&cfg),
        "theorem1" => harness::cmd_theorem1(&cfg),
        "eigen" => harness::cmd_eigen(&cfg),
        "export" => harness::cmd_export(&cfg),
        "solve" => harness::cmd_solve(&cfg),
        "oracle" => {
            let t = match table {
                "exact" => OracleTable::Exact,
                "buckling" => OracleTable::Buckling,
                other => return Err(PyValueError::new_err(format!("unknown oracle table {other:?}"))),
            };
            harness::cmd_oracle(&cfg, t)
        }
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    }
    .map_err(py_err)?;
    to_py(py, &outcome.report())
}

#[pymodule]
fn trapped(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Grid>()?;
    m.add_class::<Field>()?;
    m.add_function(wrap_pyfunction!(buckling_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(cap_buckling_shooting, m)?)?;
    m.add_function(wrap_pyfunction!(flat_disk_buckling, m)?)?;
    m.add_function(wrap_pyfunction!(solve_clamped, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_principle_check, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_check, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
