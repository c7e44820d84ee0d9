//! Python module `esd`: couplings, single-qubit channels, two-qubit
//! trajectories, sudden-death verdicts and the coupling-space census.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use esd_core::census::run_census;
use esd_core::channel::{self, Vec3};
use esd_core::choi::{choi_of_channel, kraus_of_choi};
use esd_core::cli::CliError;
use esd_core::linalg::CMat;
use esd_core::pair::{self, TimeGrid};
use esd_core::sde;

fn py_err(e: esd_core::Error) -> PyErr {
    match CliError::from(e) {
        CliError::Validation(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn rows<const N: usize>(m: &CMat<N>) -> Vec<Vec<Complex64>> {
    m.0.iter().map(|r| r.to_vec()).collect()
}

/// Coupling `λ = u + i v` with `|u|² + |v|² = 1` and decay rate `gamma`.
#[pyclass(name = "Coupling", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyCoupling(channel::Coupling);

#[pymethods]
impl PyCoupling {
    #[new]
    #[pyo3(signature = (u, v, gamma = 1.0))]
    fn new(u: Vec3, v: Vec3, gamma: f64) -> PyResult<Self> {
        channel::Coupling::new(u, v, gamma).map(PyCoupling).map_err(py_err)
    }

    /// `u = x̂ sinφ cosθ + ẑ cosφ`, `v = -ŷ sinφ sinθ`.
    #[staticmethod]
    #[pyo3(signature = (theta, phi, gamma = 1.0))]
    fn family(theta: f64, phi: f64, gamma: f64) -> PyResult<Self> {
        channel::family(theta, phi).with_gamma(gamma).map(PyCoupling).map_err(py_err)
    }

    /// `u = x̂ cosθ`, `v = ŷ sinθ`.
    #[staticmethod]
    #[pyo3(signature = (theta, gamma = 1.0))]
    fn appc(theta: f64, gamma: f64) -> PyResult<Self> {
        channel::family_appc(theta).with_gamma(gamma).map(PyCoupling).map_err(py_err)
    }

    #[getter]
    fn u(&self) -> Vec3 {
        self.0.u()
    }

    #[getter]
    fn v(&self) -> Vec3 {
        self.0.v()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn w(&self) -> Vec3 {
        self.0.w()
    }

    /// `"flip"` or `"dissipative"`.
    fn classify(&self) -> PyResult<&'static str> {
        Ok(self.0.classify().map_err(py_err)?.name())
    }

    /// Bloch vector at time `t` starting from `r0`.
    fn evolve(&self, r0: Vec3, t: f64) -> PyResult<Vec3> {
        Ok(self.0.evolve(&channel::BlochVector(r0), t).map_err(py_err)?.0)
    }

    fn asymptote(&self, r0: Vec3) -> PyResult<Vec3> {
        Ok(channel::asymptote(&self.0, &channel::BlochVector(r0)).map_err(py_err)?.0)
    }

    /// 4×4 Choi matrix of the channel at time `t`.
    fn choi(&self, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(choi_of_channel(&self.0, t).map_err(py_err)?.matrix()))
    }

    /// Kraus operators (2×2 matrices) of the channel at time `t`.
    fn kraus(&self, t: f64) -> PyResult<Vec<Vec<Vec<Complex64>>>> {
        let k = kraus_of_choi(&choi_of_channel(&self.0, t).map_err(py_err)?).map_err(py_err)?;
        Ok(k.ops().iter().map(rows).collect())
    }

    fn __repr__(&self) -> String {
        format!("Coupling(u={:?}, v={:?}, gamma={})", self.0.u(), self.0.v(), self.0.gamma())
    }
}

/// Two-qubit density matrix in the basis |00⟩, |01⟩, |10⟩, |11⟩.
#[pyclass(name = "DensityMatrix", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyDensityMatrix(pair::DensityMatrix4);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(matrix: [[Complex64; 4]; 4]) -> PyResult<Self> {
        pair::DensityMatrix4::new(CMat(matrix)).map(PyDensityMatrix).map_err(py_err)
    }

    /// `α|00⟩ + β|11⟩` (`"plus"`) or `α|01⟩ + β|10⟩` (`"minus"`) with `α² = alpha_sq`.
    #[staticmethod]
    fn initial(kind: &str, alpha_sq: f64) -> PyResult<Self> {
        let kind = match kind {
            "plus" => pair::InitialKind::Plus,
            "minus" => pair::InitialKind::Minus,
            other => return Err(PyValueError::new_err(format!("unknown state kind {other:?}"))),
        };
        pair::initial_state(kind, alpha_sq).map(PyDensityMatrix).map_err(py_err)
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows(self.0.matrix())
    }

    fn concurrence(&self) -> PyResult<f64> {
        Ok(pair::concurrence(&self.0).map_err(py_err)?.concurrence)
    }

    /// `l1 - l2 - l3 - l4`, negative for separable states away from the boundary.
    fn lambda_value(&self) -> PyResult<f64> {
        Ok(pair::concurrence(&self.0).map_err(py_err)?.lambda)
    }

    /// State after both qubits evolve for time `t`.
    fn evolve(&self, c1: &PyCoupling, c2: &PyCoupling, t: f64) -> PyResult<Self> {
        pair::evolve_pair_at(&self.0, &c1.0, &c2.0, t).map(PyDensityMatrix).map_err(py_err)
    }
}

/// List of `(t, lambda, concurrence)` on the given times (first must be 0).
#[pyfunction]
fn lambda_trajectory(
    rho0: &PyDensityMatrix,
    c1: &PyCoupling,
    c2: &PyCoupling,
    times: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let grid = TimeGrid::new(times).map_err(py_err)?;
    let traj = pair::lambda_trajectory(&rho0.0, &c1.0, &c2.0, &grid).map_err(py_err)?;
    Ok(traj.into_iter().map(|p| (p.t, p.lambda, p.concurrence)).collect())
}

/// Sudden-death verdict as a dict with keys predicted, lambda_inf, tau, method.
#[pyfunction]
#[pyo3(signature = (rho0, c1, c2, end = 10.0, points = 400))]
fn sde_check<'py>(
    py: Python<'py>,
    rho0: &PyDensityMatrix,
    c1: &PyCoupling,
    c2: &PyCoupling,
    end: f64,
    points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = TimeGrid::uniform(0.0, end, points).map_err(py_err)?;
    let v = sde::assess(&rho0.0, &c1.0, &c2.0, &grid).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item(
        "predicted",
        match v.predicted {
            sde::Prediction::Yes => "yes",
            sde::Prediction::No => "no",
            sde::Prediction::NotCovered => "not-covered",
        },
    )?;
    d.set_item("lambda_inf", v.lambda_inf)?;
    d.set_item("tau", v.tau)?;
    d.set_item(
        "method",
        match v.method {
            sde::Method::Theorem1 => "theorem1",
            sde::Method::Theorem2 => "theorem2",
            sde::Method::Numerical => "numerical",
        },
    )?;
    Ok(d)
}

/// Monte Carlo census of the coupling space.
#[pyfunction]
#[pyo3(signature = (n, seed = 0, flip_tol = 1e-9, ad_tol = 1e-9))]
fn census<'py>(py: Python<'py>, n: u64, seed: u64, flip_tol: f64, ad_tol: f64) -> PyResult<Bound<'py, PyDict>> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be at least 1"));
    }
    let r = py.detach(|| run_census(n, seed, flip_tol, ad_tol));
    let d = PyDict::new(py);
    d.set_item("n_samples", r.n_samples)?;
    d.set_item("n_flip_hits", r.n_flip_hits)?;
    d.set_item("n_ad_hits", r.n_ad_hits)?;
    d.set_item("flip_tolerance", r.flip_tolerance)?;
    d.set_item("ad_tolerance", r.ad_tolerance)?;
    d.set_item("min_distance_to_ad", r.min_distance_to_ad)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

/// RK4 integration of the Bloch equation, for cross-checking `Coupling.evolve`.
#[pyfunction]
#[pyo3(signature = (r0, coupling, t_end, dt = 1e-3))]
fn oracle_rk4(r0: Vec3, coupling: &PyCoupling, t_end: f64, dt: f64) -> Vec3 {
    sde::oracle_rk4(&channel::BlochVector(r0), &coupling.0, t_end, dt).0
}

#[pymodule]
fn esd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoupling>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(lambda_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(sde_check, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_rk4, m)?)?;
    Ok(())
}
