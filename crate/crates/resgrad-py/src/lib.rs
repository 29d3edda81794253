//! Python bindings for the resgrad core: states, systems, one-step
//! integrators, the closed-form oscillator solution and the empirical-order
//! harness.
//!
//! Build with `cargo build -p resgrad-py --release`; the resulting
//! `libresgrad_py.so` imports as the `resgrad_py` module once renamed to
//! `resgrad_py.so` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use resgrad::{
    integrate, run_order_experiment, DampedOscillatorParams, DeltaVariant, DhoExactSolution,
    DuffingParams, OrderExperiment, Scheme, State, StepperConfig, SystemSpec, VanDerPolParams,
};

fn to_py_err(e: resgrad::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Augmented phase point (t, q, p, w).
#[pyclass(name = "State", skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: State,
}

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (q, p, w = 0.0, t = 0.0))]
    fn new(q: f64, p: f64, w: f64, t: f64) -> Self {
        PyState {
            inner: State::new(t, q, p, w),
        }
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn w(&self) -> f64 {
        self.inner.w
    }

    fn is_finite(&self) -> bool {
        self.inner.is_finite()
    }

    fn __repr__(&self) -> String {
        format!(
            "State(q={}, p={}, w={}, t={})",
            self.inner.q, self.inner.p, self.inner.w, self.inner.t
        )
    }
}

/// A dissipative mechanical system.
#[pyclass(name = "System", skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: SystemSpec,
}

#[pymethods]
impl PySystem {
    /// Damped harmonic oscillator with potential k q^2 / 2 and dissipation b p.
    #[staticmethod]
    #[pyo3(signature = (b = 0.1, k = 1.0))]
    fn dho(b: f64, k: f64) -> PyResult<Self> {
        let params = DampedOscillatorParams::new(b, k).map_err(to_py_err)?;
        Ok(PySystem {
            inner: SystemSpec::DampedHarmonicOscillator(params),
        })
    }

    /// Duffing oscillator with potential alpha q^2/2 + beta q^4/4.
    #[staticmethod]
    #[pyo3(signature = (alpha = 1.0, beta = 1.0, b = 0.1))]
    fn duffing(alpha: f64, beta: f64, b: f64) -> Self {
        PySystem {
            inner: SystemSpec::Duffing(DuffingParams { alpha, beta, b }),
        }
    }

    /// Van der Pol oscillator with dissipation mu (q^2 - 1) p.
    #[staticmethod]
    #[pyo3(signature = (mu = 1.0))]
    fn vdp(mu: f64) -> Self {
        PySystem {
            inner: SystemSpec::VanDerPol(VanDerPolParams { mu }),
        }
    }

    /// Catalog lookup by name with default parameters.
    #[staticmethod]
    fn by_name(name: &str) -> PyResult<Self> {
        Ok(PySystem {
            inner: SystemSpec::by_name(name).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn potential(&self, q: f64) -> f64 {
        self.inner.potential(q)
    }

    fn force(&self, q: f64) -> f64 {
        self.inner.force(q)
    }

    fn dissipation(&self, q: f64, p: f64) -> f64 {
        self.inner.dissipation(q, p)
    }

    /// Conservative energy H = p^2/2 + V(q).
    fn hamiltonian(&self, state: &PyState) -> f64 {
        self.inner.hamiltonian(&state.inner)
    }

    /// The conserved quantity K = H + w.
    fn k_energy(&self, state: &PyState) -> f64 {
        self.inner.k_energy(&state.inner)
    }

    /// Right-hand sides (dq, dp, dw) of the augmented system.
    fn continuous_rhs(&self, state: &PyState) -> (f64, f64, f64) {
        self.inner.continuous_rhs(&state.inner)
    }

    fn k_gradient(&self, state: &PyState) -> (f64, f64) {
        self.inner.k_gradient(&state.inner)
    }

    fn __repr__(&self) -> String {
        format!("System({:?})", self.inner)
    }
}

/// Time step and implicit-solver settings.
#[pyclass(name = "StepperConfig", skip_from_py_object)]
#[derive(Clone)]
struct PyStepperConfig {
    inner: StepperConfig,
}

#[pymethods]
impl PyStepperConfig {
    #[new]
    #[pyo3(signature = (h, fp_tol = 1e-14, fp_max_iter = 500))]
    fn new(h: f64, fp_tol: f64, fp_max_iter: u32) -> Self {
        PyStepperConfig {
            inner: StepperConfig {
                h,
                fp_tol,
                fp_max_iter,
            },
        }
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }
}

/// Outcome of a single step.
#[pyclass(name = "StepResult")]
struct PyStepResult {
    #[pyo3(get)]
    fp_iterations: u32,
    #[pyo3(get)]
    delta_factor: f64,
    state: State,
}

#[pymethods]
impl PyStepResult {
    #[getter]
    fn state(&self) -> PyState {
        PyState { inner: self.state }
    }
}

fn parse_scheme(spec: &str) -> PyResult<Scheme> {
    Scheme::parse(spec).map_err(to_py_err)
}

/// One step of the K-preserving discrete gradient scheme.
///
/// `variant` selects the effective-step correction: "none", "q3", "q4", "p3"
/// or "p4" (corrections require the damped harmonic oscillator).
#[pyfunction]
#[pyo3(signature = (state, system, cfg, variant = "none"))]
fn moddg_step(
    state: &PyState,
    system: &PySystem,
    cfg: &PyStepperConfig,
    variant: &str,
) -> PyResult<PyStepResult> {
    let variant = DeltaVariant::parse(variant).map_err(to_py_err)?;
    let out = resgrad::moddg_step(&state.inner, &system.inner, &cfg.inner, &variant)
        .map_err(to_py_err)?;
    Ok(PyStepResult {
        fp_iterations: out.fp_iterations,
        delta_factor: out.delta_factor,
        state: out.state,
    })
}

/// One leapfrog step driven by the K-gradient (oscillator only).
#[pyfunction]
fn pqplf_step(state: &PyState, system: &PySystem, cfg: &PyStepperConfig) -> PyResult<PyStepResult> {
    let out =
        resgrad::pqplf_step(&state.inner, &system.inner, &cfg.inner).map_err(to_py_err)?;
    Ok(PyStepResult {
        fp_iterations: out.fp_iterations,
        delta_factor: out.delta_factor,
        state: out.state,
    })
}

/// One classical RK4 step on the augmented (q, p, w) system.
#[pyfunction]
fn erk4_step(state: &PyState, system: &PySystem, cfg: &PyStepperConfig) -> PyResult<PyStepResult> {
    let out = resgrad::erk4_step(&state.inner, &system.inner, &cfg.inner).map_err(to_py_err)?;
    Ok(PyStepResult {
        fp_iterations: out.fp_iterations,
        delta_factor: out.delta_factor,
        state: out.state,
    })
}

/// Integrate `steps` steps with the named scheme ("moddg[:variant]", "pqplf"
/// or "erk4"); returns the full trajectory including the initial state.
#[pyfunction]
fn run_trajectory(
    scheme: &str,
    system: &PySystem,
    cfg: &PyStepperConfig,
    initial: &PyState,
    steps: usize,
) -> PyResult<Vec<PyState>> {
    let scheme = parse_scheme(scheme)?;
    let trajectory = integrate(&scheme, &system.inner, &cfg.inner, initial.inner, steps)
        .map_err(to_py_err)?;
    Ok(trajectory
        .into_iter()
        .map(|inner| PyState { inner })
        .collect())
}

/// Closed-form underdamped oscillator solution with exact reservoir.
#[pyclass(name = "DhoExact")]
struct PyDhoExact {
    inner: DhoExactSolution,
}

#[pymethods]
impl PyDhoExact {
    #[new]
    #[pyo3(signature = (q0, p0, b = 0.1, k = 1.0))]
    fn new(q0: f64, p0: f64, b: f64, k: f64) -> PyResult<Self> {
        let params = DampedOscillatorParams::new(b, k).map_err(to_py_err)?;
        Ok(PyDhoExact {
            inner: DhoExactSolution::new(params, q0, p0).map_err(to_py_err)?,
        })
    }

    fn state_at(&self, t: f64) -> PyState {
        PyState {
            inner: self.inner.state_at(t),
        }
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    #[getter]
    fn k0(&self) -> f64 {
        self.inner.k0()
    }
}

/// Empirical convergence orders (slope_q, slope_p, slope_w) of a scheme on
/// the base-grid protocol against the closed-form oscillator solution.
#[pyfunction]
#[pyo3(signature = (scheme, system, h_set, h0 = 0.001, t_end = 20.0, q0 = 2.3, p0 = -3.1))]
#[allow(clippy::too_many_arguments)]
fn order_slopes(
    scheme: &str,
    system: &PySystem,
    h_set: Vec<f64>,
    h0: f64,
    t_end: f64,
    q0: f64,
    p0: f64,
) -> PyResult<(f64, f64, f64)> {
    let exp = OrderExperiment {
        h0,
        h_set,
        t_end,
        ics: State::new(0.0, q0, p0, 0.0),
        scheme: parse_scheme(scheme)?,
        ..OrderExperiment::reference(Scheme::Erk4)
    };
    let outcome = run_order_experiment(&system.inner, &exp).map_err(to_py_err)?;
    Ok((outcome.q.slope, outcome.p.slope, outcome.w.slope))
}

#[pymodule]
fn resgrad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyStepperConfig>()?;
    m.add_class::<PyStepResult>()?;
    m.add_class::<PyDhoExact>()?;
    m.add_function(wrap_pyfunction!(moddg_step, m)?)?;
    m.add_function(wrap_pyfunction!(pqplf_step, m)?)?;
    m.add_function(wrap_pyfunction!(erk4_step, m)?)?;
    m.add_function(wrap_pyfunction!(run_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(order_slopes, m)?)?;
    Ok(())
}
