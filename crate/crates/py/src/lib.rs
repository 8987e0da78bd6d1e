//! `adamslab` — Python bindings for the higher-order Moser-Trudinger
//! toolkit: exact dimensional constants, the standard bubble, Green
//! functions of `(-Delta)^m - alpha`, glued concentration trials, the
//! constrained maximizer, and the acceptance checklist.
//!
//! Report-shaped results come back as plain dicts mirroring the JSON layout
//! of the `adams` command-line tool.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use adams_core::bubble::{self, BubbleLadder};
use adams_core::constants::{build_context, DimensionContext};
use adams_core::extremal::{
    blowup_diagnostics, extremal_report, maximize_subcritical, pohozaev_residual,
    supercritical_divergence_demo, ExtremalSolution, ProblemConfig,
};
use adams_core::greens::{green_energy_expansion, GreenFunction};
use adams_core::numerics::RadialGrid;
use adams_core::testfn::{assemble_test_function, test_function_report};
use adams_core::verify;

fn to_py_err(e: adams_core::Error) -> PyErr {
    match e {
        adams_core::Error::InvalidInput(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Convert a serde_json value into the matching Python object.
fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None().into_bound(py),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64()
                    .ok_or_else(|| PyRuntimeError::new_err("non-finite number in report"))?
                    .into_pyobject(py)?
                    .into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any()
        }
    })
}

fn report_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value)
        .map_err(|e| PyRuntimeError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &v)
}

/// Exact constants and identities for derivative order `m` (dimension `2m`).
#[pyclass(frozen)]
struct Dimension {
    ctx: DimensionContext,
}

#[pymethods]
impl Dimension {
    #[new]
    fn new(m: u32) -> PyResult<Self> {
        Ok(Self {
            ctx: build_context(m).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.ctx.m
    }

    #[getter]
    fn dim(&self) -> u32 {
        self.ctx.dim
    }

    /// Critical exponent `beta* = m (2m-1)! omega_{2m}`.
    fn beta_star(&self) -> f64 {
        self.ctx.beta_star.to_f64()
    }

    /// Exact rendering of `beta*`, e.g. `"4 pi"` for m=1.
    fn beta_star_exact(&self) -> String {
        self.ctx.beta_star.to_string()
    }

    /// Sharp spherical constant `gamma_m = beta*/(2m)`.
    fn gamma(&self) -> f64 {
        self.ctx.gamma_m.to_f64()
    }

    /// Volume of the unit ball in dimension 2m.
    fn omega_ball(&self) -> f64 {
        self.ctx.omega_even.to_f64()
    }

    /// Measure of the unit sphere in dimension 2m.
    fn omega_sphere(&self) -> f64 {
        self.ctx.omega_odd.to_f64()
    }

    /// Boundary constant of the bubble expansion.
    fn h_constant(&self) -> f64 {
        self.ctx.h_m.to_f64()
    }

    /// Bubble self-energy (quadrature, cached).
    fn self_energy(&self) -> f64 {
        self.ctx.i_m_or_compute()
    }

    fn __repr__(&self) -> String {
        format!("Dimension(m={}, beta_star={})", self.ctx.m, self.ctx.beta_star)
    }
}

/// Dirichlet fundamental solution of `(-Delta)^m - alpha` on a ball.
#[pyclass(frozen)]
struct Green {
    ctx: DimensionContext,
    inner: GreenFunction,
}

#[pymethods]
impl Green {
    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    /// Finite part at the singularity.
    fn c(&self) -> f64 {
        self.inner.c()
    }

    fn l2_norm_sq(&self) -> f64 {
        self.inner.l2_norm_sq()
    }

    fn value(&self, r: f64) -> f64 {
        self.inner.value(r)
    }

    /// Smooth remainder after subtracting the logarithmic kernel.
    fn psi(&self, r: f64) -> f64 {
        self.inner.psi(r)
    }

    fn dirichlet_residuals(&self) -> Vec<f64> {
        self.inner.dirichlet_residuals()
    }

    fn distributional_mass(&self, delta: f64) -> f64 {
        self.inner.distributional_mass(delta)
    }

    /// Punctured-ball energy identity at puncture radius `delta`.
    fn energy_expansion<'py>(&self, py: Python<'py>, delta: f64) -> PyResult<Bound<'py, PyAny>> {
        let rep = green_energy_expansion(&self.ctx, &self.inner, delta).map_err(to_py_err)?;
        report_dict(py, &rep)
    }

    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report_dict(py, &self.inner.report())
    }

    #[pyo3(signature = (n=256))]
    fn profile(&self, n: usize) -> Vec<(f64, f64, f64)> {
        self.inner.profile_rows(n)
    }

    fn __repr__(&self) -> String {
        format!(
            "Green(m={}, alpha={}, C={:.12e})",
            self.inner.m(),
            self.inner.alpha(),
            self.inner.c()
        )
    }
}

/// Converged maximizer of the exponential functional at subcritical
/// exponent.
#[pyclass(frozen)]
struct Extremal {
    ctx: DimensionContext,
    sol: ExtremalSolution,
}

#[pymethods]
impl Extremal {
    #[getter]
    fn m(&self) -> u32 {
        self.sol.m()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.sol.beta()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.sol.alpha()
    }

    /// Supremum value `F(u)` at the maximizer.
    fn s_value(&self) -> f64 {
        self.sol.f_value()
    }

    /// Lagrange multiplier of the constraint.
    fn multiplier(&self) -> f64 {
        self.sol.lambda()
    }

    /// Peak height `u(0)`.
    fn mu(&self) -> f64 {
        self.sol.mu()
    }

    fn el_residual(&self) -> f64 {
        self.sol.el_residual()
    }

    fn iterations(&self) -> usize {
        self.sol.iterations()
    }

    /// `(r, u(r))` samples on the solver grid.
    fn profile(&self) -> Vec<(f64, f64)> {
        self.sol.profile_rows()
    }

    /// Concentration diagnostics of the peak.
    fn blowup<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let d = blowup_diagnostics(&self.ctx, &self.sol).map_err(to_py_err)?;
        report_dict(py, &d)
    }

    /// Pohozaev identity balance at the converged solution.
    fn pohozaev<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rep = pohozaev_residual(&self.ctx, &self.sol).map_err(to_py_err)?;
        report_dict(py, &rep)
    }

    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rep = extremal_report(&self.ctx, &self.sol).map_err(to_py_err)?;
        report_dict(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!(
            "Extremal(m={}, beta={:.6}, S={:.9})",
            self.sol.m(),
            self.sol.beta(),
            self.sol.f_value()
        )
    }
}

/// Profile of the standard bubble at radius `r`.
#[pyfunction]
fn eta0(m: u32, r: f64) -> PyResult<f64> {
    let ctx = build_context(m).map_err(to_py_err)?;
    Ok(bubble::eta0(&ctx, r))
}

/// Liouville mass of the bubble inside radius `r_max` (total mass 1).
#[pyfunction]
fn bubble_mass(m: u32, r_max: f64) -> PyResult<f64> {
    let ctx = build_context(m).map_err(to_py_err)?;
    bubble::bubble_mass(&ctx, r_max).map_err(to_py_err)
}

/// Bubble mass/energy report truncated at `r_max`.
#[pyfunction]
#[pyo3(signature = (m, r_max=16.0))]
fn bubble_report(py: Python<'_>, m: u32, r_max: f64) -> PyResult<Bound<'_, PyAny>> {
    let ctx = build_context(m).map_err(to_py_err)?;
    let ladder = BubbleLadder::new(&ctx);
    let rep = bubble::bubble_energy(&ctx, &ladder, r_max).map_err(to_py_err)?;
    report_dict(py, &rep)
}

/// Solve for the Green function of `(-Delta)^m - alpha` on a ball.
#[pyfunction]
#[pyo3(signature = (m, alpha=0.0, ball_radius=1.0, tol=1e-12))]
fn solve_green(m: u32, alpha: f64, ball_radius: f64, tol: f64) -> PyResult<Green> {
    let ctx = build_context(m).map_err(to_py_err)?;
    let inner = adams_core::greens::solve_green(&ctx, alpha, ball_radius, tol).map_err(to_py_err)?;
    Ok(Green { ctx, inner })
}

/// First Dirichlet eigenvalue of `(-Delta)^m` on the ball.
#[pyfunction]
#[pyo3(signature = (m, ball_radius=1.0))]
fn lowest_eigenvalue(m: u32, ball_radius: f64) -> PyResult<f64> {
    let ctx = build_context(m).map_err(to_py_err)?;
    adams_core::greens::lowest_eigenvalue(&ctx, ball_radius).map_err(to_py_err)
}

/// Assemble the glued concentration trial and report its threshold gap.
#[pyfunction]
#[pyo3(signature = (m, alpha=0.0, eps=1e-4, ball_radius=1.0, tol=1e-12))]
fn threshold_gap(
    py: Python<'_>,
    m: u32,
    alpha: f64,
    eps: f64,
    ball_radius: f64,
    tol: f64,
) -> PyResult<Bound<'_, PyAny>> {
    let ctx = build_context(m).map_err(to_py_err)?;
    let green = adams_core::greens::solve_green(&ctx, alpha, ball_radius, tol).map_err(to_py_err)?;
    let tf = assemble_test_function(&ctx, &green, eps).map_err(to_py_err)?;
    let rep = test_function_report(&ctx, &tf).map_err(to_py_err)?;
    report_dict(py, &rep)
}

/// Maximize the exponential functional at `beta = beta_frac * beta*`.
#[pyfunction]
#[pyo3(signature = (m, alpha=0.0, beta_frac=0.9, ball_radius=1.0, grid_n=768, tol=1e-9))]
fn maximize(
    m: u32,
    alpha: f64,
    beta_frac: f64,
    ball_radius: f64,
    grid_n: usize,
    tol: f64,
) -> PyResult<Extremal> {
    let ctx = build_context(m).map_err(to_py_err)?;
    let beta = beta_frac * ctx.beta_star.to_f64();
    let mut cfg = ProblemConfig::new(&ctx, ball_radius, alpha, beta);
    cfg.grid = RadialGrid::graded(ball_radius, grid_n);
    cfg.residual_tol = tol;
    let sol = maximize_subcritical(&ctx, &cfg).map_err(to_py_err)?;
    Ok(Extremal { ctx, sol })
}

/// `(t, F(t phi_1))` scan showing divergence once `alpha` passes the first
/// eigenvalue; `alpha=None` uses 1.1 times the eigenvalue.
#[pyfunction]
#[pyo3(signature = (m, alpha=None, beta_frac=1.0, ball_radius=1.0))]
fn divergence_demo(
    m: u32,
    alpha: Option<f64>,
    beta_frac: f64,
    ball_radius: f64,
) -> PyResult<Vec<(f64, f64)>> {
    let ctx = build_context(m).map_err(to_py_err)?;
    let lam1 = adams_core::greens::lowest_eigenvalue(&ctx, ball_radius).map_err(to_py_err)?;
    let alpha = alpha.unwrap_or(1.1 * lam1);
    let beta = beta_frac * ctx.beta_star.to_f64();
    let ts = [0.0, 0.5, 1.0, 1.5, 2.0];
    supercritical_divergence_demo(&ctx, ball_radius, alpha, beta, &ts).map_err(to_py_err)
}

/// Run one acceptance criterion (1..=14) and return its report dict.
#[pyfunction]
fn run_criterion(py: Python<'_>, id: u32) -> PyResult<Bound<'_, PyAny>> {
    let rep = verify::criterion(id).map_err(to_py_err)?;
    report_dict(py, &rep)
}

#[pymodule]
fn adamslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Dimension>()?;
    m.add_class::<Green>()?;
    m.add_class::<Extremal>()?;
    m.add_function(wrap_pyfunction!(eta0, m)?)?;
    m.add_function(wrap_pyfunction!(bubble_mass, m)?)?;
    m.add_function(wrap_pyfunction!(bubble_report, m)?)?;
    m.add_function(wrap_pyfunction!(solve_green, m)?)?;
    m.add_function(wrap_pyfunction!(lowest_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_gap, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_demo, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    Ok(())
}
