//! Python bindings for the main optocorr types and operations.
//!
//! Build the shared library with `cargo build -p optocorr-py --release` and
//! rename `liboptocorr_py.so` to `optocorr_py.so` somewhere on `sys.path`
//! (see `python/smoke_test.py` at the repository root).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use optocorr::correlations::{CorrelationReport, Measured};
use optocorr::dynamics::Bipartition;
use optocorr::gaussian::TwoModeCM;
use optocorr::model::{PhysicalParams, ReducedParams};

fn err(e: optocorr::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_measured(which: &str) -> PyResult<Measured> {
    match which {
        "A" | "a" => Ok(Measured::A),
        "B" | "b" => Ok(Measured::B),
        other => Err(PyValueError::new_err(format!(
            "measured mode must be 'A' or 'B', got {other:?}"
        ))),
    }
}

fn parse_bipartition(which: &str) -> PyResult<Bipartition> {
    match which {
        "mechanical" => Ok(Bipartition::Mechanical),
        "optical" => Ok(Bipartition::Optical),
        other => Err(PyValueError::new_err(format!(
            "bipartition must be 'mechanical' or 'optical', got {other:?}"
        ))),
    }
}

/// Dimensionless quadruple (damping ratio, cooperativity, thermal occupation,
/// squeezing) that fully determines both subsystem covariance matrices.
#[pyclass(name = "ReducedParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyReducedParams {
    inner: ReducedParams,
}

#[pymethods]
impl PyReducedParams {
    #[new]
    fn new(gamma_ratio: f64, cooperativity: f64, n_th: f64, r: f64) -> PyResult<Self> {
        Ok(PyReducedParams {
            inner: ReducedParams::new(gamma_ratio, cooperativity, n_th, r).map_err(err)?,
        })
    }

    #[getter]
    fn gamma_ratio(&self) -> f64 {
        self.inner.gamma_ratio
    }

    #[getter]
    fn cooperativity(&self) -> f64 {
        self.inner.cooperativity
    }

    #[getter]
    fn n_th(&self) -> f64 {
        self.inner.n_th
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    fn __repr__(&self) -> String {
        format!(
            "ReducedParams(gamma_ratio={}, cooperativity={}, n_th={}, r={})",
            self.inner.gamma_ratio, self.inner.cooperativity, self.inner.n_th, self.inner.r
        )
    }
}

/// Standard-form two-mode covariance matrix (vacuum variance 1/2).
#[pyclass(name = "TwoModeCM", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyTwoModeCM {
    inner: TwoModeCM,
}

#[pymethods]
impl PyTwoModeCM {
    #[new]
    fn new(nu1: f64, nu2: f64, nu3: f64, nu3p: f64) -> PyResult<Self> {
        Ok(PyTwoModeCM { inner: TwoModeCM::new(nu1, nu2, nu3, nu3p).map_err(err)? })
    }

    #[staticmethod]
    fn vacuum() -> Self {
        PyTwoModeCM { inner: TwoModeCM::vacuum() }
    }

    #[staticmethod]
    fn thermal(n_a: f64, n_b: f64) -> Self {
        PyTwoModeCM { inner: TwoModeCM::thermal(n_a, n_b) }
    }

    #[staticmethod]
    fn two_mode_squeezed_vacuum(r: f64) -> Self {
        PyTwoModeCM { inner: TwoModeCM::two_mode_squeezed_vacuum(r) }
    }

    #[staticmethod]
    fn squeezed_thermal(n_a: f64, n_b: f64, r: f64) -> Self {
        PyTwoModeCM { inner: TwoModeCM::squeezed_thermal(n_a, n_b, r) }
    }

    #[getter]
    fn nu1(&self) -> f64 {
        self.inner.nu1
    }

    #[getter]
    fn nu2(&self) -> f64 {
        self.inner.nu2
    }

    #[getter]
    fn nu3(&self) -> f64 {
        self.inner.nu3
    }

    #[getter]
    fn nu3p(&self) -> f64 {
        self.inner.nu3p
    }

    fn det(&self) -> f64 {
        self.inner.det()
    }

    /// The full 4x4 matrix as a nested list, row ordering (q_a, p_a, q_b, p_b).
    fn matrix(&self) -> Vec<Vec<f64>> {
        let m = self.inner.matrix();
        (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "TwoModeCM(nu1={}, nu2={}, nu3={}, nu3p={})",
            self.inner.nu1, self.inner.nu2, self.inner.nu3, self.inner.nu3p
        )
    }
}

/// Per-bipartition bundle of every correlation measure.
#[pyclass(name = "CorrelationReport", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyCorrelationReport {
    inner: CorrelationReport,
}

#[pymethods]
impl PyCorrelationReport {
    #[getter]
    fn e2(&self) -> f64 {
        self.inner.e2
    }

    #[getter]
    fn d2_a_given_b(&self) -> f64 {
        self.inner.d2_a_given_b
    }

    #[getter]
    fn d2_b_given_a(&self) -> f64 {
        self.inner.d2_b_given_a
    }

    #[getter]
    fn i2(&self) -> f64 {
        self.inner.i2
    }

    #[getter]
    fn j2(&self) -> f64 {
        self.inner.j2
    }

    #[getter]
    fn det_v3(&self) -> f64 {
        self.inner.det_v3
    }

    #[getter]
    fn nu_minus(&self) -> f64 {
        self.inner.nu_minus
    }

    #[getter]
    fn entangled(&self) -> bool {
        self.inner.entangled
    }

    fn __repr__(&self) -> String {
        format!(
            "CorrelationReport(e2={:.6e}, d2_a_given_b={:.6e}, i2={:.6e}, entangled={})",
            self.inner.e2, self.inner.d2_a_given_b, self.inner.i2, self.inner.entangled
        )
    }
}

/// SI-unit cavity/mirror/laser/environment parameters.
#[pyclass(name = "PhysicalParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyPhysicalParams {
    inner: PhysicalParams,
}

#[pymethods]
impl PyPhysicalParams {
    #[allow(clippy::too_many_arguments)]
    #[new]
    fn new(
        omega_mu: f64,
        m_mu: f64,
        gamma: f64,
        l: f64,
        omega_c: f64,
        kappa: f64,
        omega_l: f64,
        power: f64,
        temperature: f64,
        r: f64,
    ) -> PyResult<Self> {
        let inner = PhysicalParams {
            omega_mu,
            m_mu,
            gamma,
            l,
            omega_c,
            kappa,
            omega_l,
            power,
            temperature,
            r,
        };
        inner.validate().map_err(err)?;
        Ok(PyPhysicalParams { inner })
    }

    /// Parameter set of a typical membrane-in-cavity experiment.
    #[staticmethod]
    fn typical() -> Self {
        PyPhysicalParams { inner: PhysicalParams::typical() }
    }

    #[getter]
    fn omega_mu(&self) -> f64 {
        self.inner.omega_mu
    }

    /// Maps onto the dimensionless quadruple.
    fn reduce(&self) -> PyResult<PyReducedParams> {
        Ok(PyReducedParams { inner: optocorr::model::reduce(&self.inner).map_err(err)? })
    }

    /// Cooperativity from the closed formula.
    fn cooperativity(&self) -> PyResult<f64> {
        optocorr::model::cooperativity(&self.inner).map_err(err)
    }
}

/// Mean thermal occupation 1/(exp(hbar omega / kB T) - 1).
#[pyfunction]
fn thermal_occupation(omega_mu: f64, temperature: f64) -> PyResult<f64> {
    optocorr::model::thermal_occupation(omega_mu, temperature).map_err(err)
}

/// Steady-state CM of the mechanical-mechanical bipartition.
#[pyfunction]
fn mechanical_cm(rp: &PyReducedParams) -> PyResult<PyTwoModeCM> {
    Ok(PyTwoModeCM { inner: optocorr::model::mechanical_cm(&rp.inner).map_err(err)? })
}

/// Steady-state CM of the optical-optical bipartition.
#[pyfunction]
fn optical_cm(rp: &PyReducedParams) -> PyResult<PyTwoModeCM> {
    Ok(PyTwoModeCM { inner: optocorr::model::optical_cm(&rp.inner).map_err(err)? })
}

/// Ordered symplectic eigenvalues (nu_minus, nu_plus).
#[pyfunction]
fn symplectic_eigenvalues(cm: &PyTwoModeCM) -> PyResult<(f64, f64)> {
    let s = optocorr::gaussian::symplectic_eigenvalues(&cm.inner).map_err(err)?;
    Ok((s.nu_minus, s.nu_plus))
}

/// True iff nu_minus >= 1/2 - tol.
#[pyfunction]
#[pyo3(signature = (cm, tol = 1e-10))]
fn is_physical(cm: &PyTwoModeCM, tol: f64) -> PyResult<bool> {
    optocorr::gaussian::is_physical(&cm.inner, tol).map_err(err)
}

/// Rényi-2 entropy of the two-mode state, in nats.
#[pyfunction]
fn renyi2_entropy(cm: &PyTwoModeCM) -> PyResult<f64> {
    optocorr::gaussian::renyi2_entropy(&cm.inner).map_err(err)
}

/// Rényi-2 mutual information I2.
#[pyfunction]
fn mutual_information(cm: &PyTwoModeCM) -> PyResult<f64> {
    optocorr::gaussian::mutual_information_r2(&cm.inner).map_err(err)
}

/// Gaussian Rényi-2 entanglement of a squeezed-thermal-class state.
#[pyfunction]
fn gr2_entanglement(cm: &PyTwoModeCM) -> PyResult<f64> {
    optocorr::correlations::gr2_entanglement(&cm.inner).map_err(err)
}

/// Gaussian Rényi-2 discord, measuring mode `measured` ('A' or 'B').
#[pyfunction]
#[pyo3(signature = (cm, measured = "B"))]
fn gr2_discord(cm: &PyTwoModeCM, measured: &str) -> PyResult<f64> {
    optocorr::correlations::gr2_discord(&cm.inner, parse_measured(measured)?).map_err(err)
}

/// Discord via numerical optimisation over Gaussian measurements; the
/// independent cross-check of `gr2_discord`.
#[pyfunction]
#[pyo3(signature = (cm, measured = "B", tol = 1e-8))]
fn discord_oracle(cm: &PyTwoModeCM, measured: &str, tol: f64) -> PyResult<f64> {
    optocorr::correlations::discord_oracle(&cm.inner, parse_measured(measured)?, tol).map_err(err)
}

/// Every correlation measure of the state at once.
#[pyfunction]
fn analyze(cm: &PyTwoModeCM) -> PyResult<PyCorrelationReport> {
    Ok(PyCorrelationReport { inner: optocorr::correlations::analyze(&cm.inner).map_err(err)? })
}

/// Both bipartition CMs rebuilt through the steady-state Lyapunov solve of
/// the linearised dynamics; returns (mechanical, optical).
#[pyfunction]
fn lyapunov_bipartitions(rp: &PyReducedParams) -> PyResult<(PyTwoModeCM, PyTwoModeCM)> {
    let dynamics = optocorr::dynamics::build_dynamics(&rp.inner).map_err(err)?;
    let full = optocorr::dynamics::lyapunov_cm(&dynamics).map_err(err)?;
    let mech = optocorr::dynamics::extract_bipartition(&full, Bipartition::Mechanical).map_err(err)?;
    let opt = optocorr::dynamics::extract_bipartition(&full, Bipartition::Optical).map_err(err)?;
    Ok((PyTwoModeCM { inner: mech }, PyTwoModeCM { inner: opt }))
}

/// Both bipartition CMs rebuilt by integrating the frequency-domain spectral
/// densities; returns (mechanical, optical).
#[pyfunction]
#[pyo3(signature = (rp, tol = 1e-9))]
fn spectral_bipartitions(rp: &PyReducedParams, tol: f64) -> PyResult<(PyTwoModeCM, PyTwoModeCM)> {
    let dynamics = optocorr::dynamics::build_dynamics(&rp.inner).map_err(err)?;
    let full = optocorr::dynamics::spectral_cm(&dynamics, tol).map_err(err)?;
    let mech = optocorr::dynamics::extract_bipartition(&full, Bipartition::Mechanical).map_err(err)?;
    let opt = optocorr::dynamics::extract_bipartition(&full, Bipartition::Optical).map_err(err)?;
    Ok((PyTwoModeCM { inner: mech }, PyTwoModeCM { inner: opt }))
}

/// Smallest temperature (K) at which the selected bipartition disentangles,
/// bisected on the bracket (t_low, t_high).
#[pyfunction]
#[pyo3(signature = (rp, which, omega_mu, bracket = (1e-5, 1e-1)))]
fn critical_temperature(
    rp: &PyReducedParams,
    which: &str,
    omega_mu: f64,
    bracket: (f64, f64),
) -> PyResult<f64> {
    optocorr::sweep::critical_temperature(&rp.inner, parse_bipartition(which)?, omega_mu, bracket)
        .map_err(err)
}

#[pymodule]
fn optocorr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReducedParams>()?;
    m.add_class::<PyTwoModeCM>()?;
    m.add_class::<PyCorrelationReport>()?;
    m.add_class::<PyPhysicalParams>()?;
    m.add_function(wrap_pyfunction!(thermal_occupation, m)?)?;
    m.add_function(wrap_pyfunction!(mechanical_cm, m)?)?;
    m.add_function(wrap_pyfunction!(optical_cm, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(is_physical, m)?)?;
    m.add_function(wrap_pyfunction!(renyi2_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(gr2_entanglement, m)?)?;
    m.add_function(wrap_pyfunction!(gr2_discord, m)?)?;
    m.add_function(wrap_pyfunction!(discord_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_bipartitions, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_bipartitions, m)?)?;
    m.add_function(wrap_pyfunction!(critical_temperature, m)?)?;
    m.add("DEFAULT_OMEGA_MU", optocorr::sweep::DEFAULT_OMEGA_MU)?;
    Ok(())
}
