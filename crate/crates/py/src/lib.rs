//! Python bindings for the `ccthrust` core.
//!
//! ```python
//! import pyccthrust as cc
//! p = cc.Particle(50e-6)
//! f = cc.compute_force(p, rot_freq_hz=1e4, t_env_k=300.0)
//! f["f_tot"]
//! ```

use std::collections::HashMap;

use ccthrust::force::{photon_number as core_photon_number, spectral_sample, EvaluationMode};
use ccthrust::materials::{DampingConvention, LorentzResonance, MaterialModel};
use ccthrust::polarizability::{polarizability_at, ParticleSpec, PolarizabilityModel};
use ccthrust::sweep::{run_sweep, Spacing, SweepSpec, SweepVariable};
use ccthrust::{compute_force as core_compute_force, DiffMode, Error, ForceBreakdown, RunContext};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        Error::Output(_) => PyOSError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

/// Lorentz-resonant chiral medium.
#[pyclass(name = "Material", module = "pyccthrust", from_py_object)]
#[derive(Clone)]
struct PyMaterial {
    inner: MaterialModel,
}

#[pymethods]
impl PyMaterial {
    /// `resonances` is a list of `(omega0, gamma, strength_e, strength_m, strength_kappa)`
    /// tuples in rad/s; `damping` is `gamma_omega0` or `gamma_omega`.
    #[new]
    #[pyo3(signature = (eps_b, mu_b, resonances, damping = "gamma_omega0"))]
    fn new(eps_b: f64, mu_b: f64, resonances: Vec<(f64, f64, f64, f64, f64)>, damping: &str) -> PyResult<Self> {
        let resonances = resonances
            .into_iter()
            .map(|(w0, g, se, sm, sk)| LorentzResonance::new(w0, g, se, sm, sk))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        let damping: DampingConvention = damping.parse().map_err(to_py)?;
        let inner = MaterialModel::new(eps_b, mu_b, resonances).map_err(to_py)?.with_damping(damping);
        Ok(Self { inner })
    }

    /// The built-in single-resonance particle.
    #[staticmethod]
    fn base() -> Self {
        Self {
            inner: MaterialModel::omega_particle(),
        }
    }

    /// Parses the text of a material file.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: MaterialModel::parse(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    /// Same medium with the handedness reversed.
    fn mirrored(&self) -> Self {
        Self {
            inner: self.inner.mirrored(),
        }
    }

    /// `(eps, mu, kappa)` at a signed frequency in rad/s.
    fn sample(&self, omega: f64) -> PyResult<(Complex64, Complex64, Complex64)> {
        let s = self.inner.sample(omega).map_err(to_py)?;
        Ok((s.eps, s.mu, s.kappa))
    }

    #[getter]
    fn eps_b(&self) -> f64 {
        self.inner.eps_b
    }

    #[getter]
    fn mu_b(&self) -> f64 {
        self.inner.mu_b
    }

    #[getter]
    fn resonances(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        self.inner
            .resonances
            .iter()
            .map(|r| (r.omega0, r.gamma, r.strength_e, r.strength_m, r.strength_kappa))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Material(eps_b={}, mu_b={}, resonances={})",
            self.inner.eps_b,
            self.inner.mu_b,
            self.inner.resonances.len()
        )
    }
}

/// A sphere of given radius (m) and material.
#[pyclass(name = "Particle", module = "pyccthrust", from_py_object)]
#[derive(Clone)]
struct PyParticle {
    inner: ParticleSpec,
}

#[pymethods]
impl PyParticle {
    #[new]
    #[pyo3(signature = (radius_m, material = None))]
    fn new(radius_m: f64, material: Option<PyMaterial>) -> PyResult<Self> {
        let m = material.map(|m| m.inner).unwrap_or_else(MaterialModel::omega_particle);
        Ok(Self {
            inner: ParticleSpec::new(radius_m, m).map_err(to_py)?,
        })
    }

    #[getter]
    fn radius_m(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn material(&self) -> PyMaterial {
        PyMaterial {
            inner: self.inner.material.clone(),
        }
    }

    /// Dipolar response at a signed frequency. Returns a dict with
    /// `alpha_e` (α_e/ε₀, m³), `alpha_m` (α_m/μ₀, m³), `chi` (m²·s) and
    /// `upsilon` (m³).
    #[pyo3(signature = (omega, model = "mie"))]
    fn polarizability(&self, omega: f64, model: &str) -> PyResult<HashMap<&'static str, Complex64>> {
        let model: PolarizabilityModel = model.parse().map_err(to_py)?;
        let p = polarizability_at(&self.inner, omega, model).map_err(to_py)?;
        Ok(HashMap::from([
            ("alpha_e", p.alpha_e_volume()),
            ("alpha_m", p.alpha_m_volume()),
            ("chi", p.chi),
            ("upsilon", p.upsilon()),
        ]))
    }

    fn __repr__(&self) -> String {
        format!("Particle(radius_m={:e})", self.inner.radius)
    }
}

#[allow(clippy::too_many_arguments)]
fn context(
    particle: &PyParticle,
    rot_freq_hz: f64,
    t_env_k: f64,
    t_particle_k: Option<f64>,
    pol_mode: &str,
    diff_mode: &str,
    rel_tol: Option<f64>,
    spectral_window: Option<f64>,
) -> PyResult<RunContext> {
    let mut ctx = RunContext::new(particle.inner.clone()).with_rotation_hz(rot_freq_hz);
    ctx.t_env = t_env_k;
    ctx.t_particle = t_particle_k.unwrap_or(t_env_k);
    ctx.pol_model = pol_mode.parse().map_err(to_py)?;
    ctx.diff_mode = diff_mode.parse::<DiffMode>().map_err(to_py)?;
    if let Some(t) = rel_tol {
        ctx.quadrature.rel_tol = t;
    }
    ctx.quadrature.spectral_window = match spectral_window {
        Some(w) if w.is_infinite() => None,
        Some(w) => Some(w),
        None => ctx.quadrature.spectral_window,
    };
    ctx.validate().map_err(to_py)?;
    Ok(ctx)
}

fn force_dict<'py>(py: Python<'py>, f: &ForceBreakdown) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("f_dip_pmfl", f.f_dip_pmfl)?;
    d.set_item("f_pfl_mfl", f.f_int_pfl_mfl)?;
    d.set_item("f_Efl_Hfl", f.f_int_efl_hfl)?;
    d.set_item("f_tot", f.f_tot)?;
    d.set_item("abs_err", f.est_abs_error)?;
    d.set_item("mode", f.mode_used.tag())?;
    d.set_item("evaluations", f.evaluations)?;
    Ok(d)
}

/// Integrated force components in newtons. `spectral_window` is the upper
/// limit in units of the largest resonance frequency; `math.inf` integrates
/// the whole half-line.
#[pyfunction]
#[pyo3(signature = (
    particle, rot_freq_hz = 1e4, t_env_k = 300.0, t_particle_k = None,
    pol_mode = "mie", diff_mode = "auto", rel_tol = None, spectral_window = None,
))]
#[allow(clippy::too_many_arguments)]
fn compute_force<'py>(
    py: Python<'py>,
    particle: PyParticle,
    rot_freq_hz: f64,
    t_env_k: f64,
    t_particle_k: Option<f64>,
    pol_mode: &str,
    diff_mode: &str,
    rel_tol: Option<f64>,
    spectral_window: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let ctx = context(
        &particle, rot_freq_hz, t_env_k, t_particle_k, pol_mode, diff_mode, rel_tol, spectral_window,
    )?;
    let f = py.detach(|| core_compute_force(&ctx)).map_err(to_py)?;
    force_dict(py, &f)
}

/// Force spectral densities at one field frequency, N·s.
#[pyfunction]
#[pyo3(signature = (
    particle, omega, rot_freq_hz = 1e4, t_env_k = 300.0, t_particle_k = None,
    pol_mode = "mie", mode = "exact",
))]
#[allow(clippy::too_many_arguments)]
fn spectral_density(
    particle: PyParticle,
    omega: f64,
    rot_freq_hz: f64,
    t_env_k: f64,
    t_particle_k: Option<f64>,
    pol_mode: &str,
    mode: &str,
) -> PyResult<HashMap<&'static str, f64>> {
    let ctx = context(&particle, rot_freq_hz, t_env_k, t_particle_k, pol_mode, "auto", None, None)?;
    let mode = match mode {
        "exact" => EvaluationMode::Exact,
        "linearized" => EvaluationMode::Linearized,
        other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    };
    let s = spectral_sample(&ctx, omega, mode).map_err(to_py)?;
    Ok(HashMap::from([
        ("d_dip_pmfl", s.d_dip_pmfl),
        ("d_pfl_mfl", s.d_pfl_mfl),
        ("d_Efl_Hfl", s.d_efl_hfl),
        ("d_tot", s.d_tot),
    ]))
}

/// Mean photon number including the zero-point half, `½coth(ħω/2k_BT)`.
#[pyfunction]
fn photon_number(omega: f64, temperature_k: f64) -> PyResult<f64> {
    core_photon_number(omega, temperature_k).map_err(to_py)
}

/// One-dimensional sweep. `var` is rot, temp, omega0, kappa or radius.
/// Returns a list of `(value, result)` pairs where `result` is a force dict
/// or an error message.
#[pyfunction]
#[pyo3(signature = (
    particle, var, start, stop, points = 21, log = false,
    rot_freq_hz = 1e4, t_env_k = 300.0, pol_mode = "mie", diff_mode = "auto",
))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    particle: PyParticle,
    var: &str,
    start: f64,
    stop: f64,
    points: usize,
    log: bool,
    rot_freq_hz: f64,
    t_env_k: f64,
    pol_mode: &str,
    diff_mode: &str,
) -> PyResult<Vec<(f64, Py<PyAny>)>> {
    let variable: SweepVariable = var.parse().map_err(to_py)?;
    let base = context(&particle, rot_freq_hz, t_env_k, None, pol_mode, diff_mode, None, None)?;
    let mut spec = SweepSpec::new(variable, start, stop, points, base);
    if log {
        spec.spacing = Spacing::Log;
    }
    let out = py.detach(|| run_sweep(&spec)).map_err(to_py)?;
    out.rows
        .iter()
        .map(|row| {
            let value = match (&row.force, &row.error) {
                (Some(f), _) => force_dict(py, f)?.into_any().unbind(),
                (None, e) => e.clone().unwrap_or_default().into_pyobject(py)?.into_any().unbind(),
            };
            Ok((row.value, value))
        })
        .collect()
}

#[pymodule]
fn pyccthrust(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMaterial>()?;
    m.add_class::<PyParticle>()?;
    m.add_function(wrap_pyfunction!(compute_force, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_density, m)?)?;
    m.add_function(wrap_pyfunction!(photon_number, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
