//! Python bindings: spacetimes, photon-sphere location and certification,
//! null geodesics, the rigidity pipeline and lapse reconstruction.
//! Reports come back as plain dicts decoded from the core JSON.

use photon_core::calculus::{vacuum_residual as vacuum_residual_at, Scheme};
use photon_core::geodesics::{integrate_null as integrate, GeodesicState, TraceOptions};
use photon_core::hypersurfaces::Hypersurface;
use photon_core::israel::{reconstruct_lapse as reconstruct, run_israel as israel, IsraelConfig};
use photon_core::photon::{certify_photon_surface, default_scan, locate_photon_sphere as locate, CertifyConfig};
use photon_core::spacetimes::{ChartPoint, LapsePerturbation, ProfileSpec, StaticSpacetime};
use photon_core::GeomError;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::{json, Value};

create_exception!(photon_sphere, GeometryError, PyException);

fn err(e: GeomError) -> PyErr {
    GeometryError::new_err(format!("[{}] {e}", e.status()))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A static spacetime −N²dt² + g built from a radial profile.
#[pyclass(name = "Spacetime", module = "photon_sphere", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySpacetime {
    inner: StaticSpacetime,
}

#[pymethods]
impl PySpacetime {
    #[staticmethod]
    fn schwarzschild(m: f64) -> PyResult<Self> {
        Self::from_spec(&ProfileSpec::schwarzschild(m))
    }

    /// Profile JSON as accepted by scenario files.
    #[staticmethod]
    fn from_profile_json(src: &str) -> PyResult<Self> {
        Self::from_spec(&ProfileSpec::from_json(src).map_err(err)?)
    }

    /// Copy with the lapse perturbed by ε P₂(cos θ)/r^power.
    fn perturbed(&self, epsilon: f64, power: f64) -> Self {
        Self {
            inner: self.inner.clone().with_perturbation(LapsePerturbation { epsilon, power }),
        }
    }

    #[getter]
    fn mass(&self) -> Option<f64> {
        self.inner.mass_hint()
    }

    #[pyo3(signature = (r, theta = std::f64::consts::FRAC_PI_2, phi = 0.0))]
    fn lapse(&self, r: f64, theta: f64, phi: f64) -> PyResult<f64> {
        let x = [r, theta, phi];
        self.inner.check_spatial(&x).map_err(err)?;
        Ok(self.inner.lapse(&x))
    }

    fn metric(&self, t: f64, r: f64, theta: f64, phi: f64) -> PyResult<Vec<Vec<f64>>> {
        let x = [t, r, theta, phi];
        self.inner.check_spatial(&[r, theta, phi]).map_err(err)?;
        Ok(self.inner.metric4(&x).iter().map(|row| row.to_vec()).collect())
    }

    fn __repr__(&self) -> String {
        format!("Spacetime({})", self.inner.profile.label())
    }
}

impl PySpacetime {
    fn from_spec(spec: &ProfileSpec) -> PyResult<Self> {
        Ok(Self {
            inner: StaticSpacetime::new(spec.build().map_err(err)?),
        })
    }
}

/// Outermost photon-sphere radius, or None.
#[pyfunction]
fn locate_photon_sphere(st: &PySpacetime) -> PyResult<Option<f64>> {
    Ok(locate(&st.inner.profile, default_scan(&st.inner)).map_err(err)?.r_ps)
}

/// Certificate for the static cylinder r = `r`.
#[pyfunction]
#[pyo3(signature = (st, r, seeds = 32, span = 100.0, seed = 0x5eed))]
fn certify_cylinder<'py>(
    py: Python<'py>,
    st: &PySpacetime,
    r: f64,
    seeds: usize,
    span: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = CertifyConfig {
        seeds,
        span,
        rng_seed: seed,
        ..CertifyConfig::default()
    };
    let cert = py
        .detach(|| certify_photon_surface(&Hypersurface::cylinder(&st.inner, r), &cfg))
        .map_err(err)?;
    to_py(py, &cert.to_json())
}

/// Integrate a null geodesic; `velocity` is (ṫ, ṙ, θ̇, φ̇) and ṫ is re-solved from the null condition.
#[pyfunction]
#[pyo3(signature = (st, position, velocity, span))]
fn integrate_null<'py>(
    py: Python<'py>,
    st: &PySpacetime,
    position: [f64; 4],
    velocity: [f64; 4],
    span: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = ChartPoint::from_coords(&position).map_err(err)?;
    let s = GeodesicState {
        position: p,
        velocity,
        affine: 0.0,
    };
    let t = py
        .detach(|| integrate(&st.inner, &s, span, &TraceOptions::default()))
        .map_err(err)?;
    let lam: Vec<f64> = t.samples.iter().map(|s| s.affine).collect();
    let r: Vec<f64> = t.samples.iter().map(|s| s.position.r).collect();
    to_py(
        py,
        &json!({
            "lambda": lam,
            "r": r,
            "energy": t.energies,
            "lapse": t.lapses,
            "energy_lapse_drift": t.energy_lapse_drift(),
            "max_null_residual": t.max_null_residual(),
            "status": t.status,
        }),
    )
}

/// Static vacuum residuals at one point.
#[pyfunction]
fn vacuum_residual<'py>(py: Python<'py>, st: &PySpacetime, r: f64, theta: f64, phi: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = ChartPoint::new(0.0, r, theta, phi).map_err(err)?;
    let v = vacuum_residual_at(&st.inner, &p, Scheme::Autodiff).map_err(err)?;
    to_py(
        py,
        &json!({
            "hessian": v.hessian_residual,
            "scalar": v.scalar_residual,
            "laplace": v.laplace_residual,
        }),
    )
}

/// Full rigidity report as a dict.
#[pyfunction]
#[pyo3(signature = (st, levels = 64, n_theta = 64, n_phi = 128, seed = 0x5eed))]
fn run_israel<'py>(
    py: Python<'py>,
    st: &PySpacetime,
    levels: usize,
    n_theta: usize,
    n_phi: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = IsraelConfig {
        levels,
        n_theta,
        n_phi,
        seed,
        ..IsraelConfig::default()
    };
    let rep = py.detach(|| israel(&st.inner, &cfg)).map_err(err)?;
    to_py(py, &rep.to_json())
}

#[pyfunction]
#[pyo3(signature = (m, n0, r0, h0 = None))]
fn reconstruct_lapse<'py>(py: Python<'py>, m: f64, n0: f64, r0: f64, h0: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let rec = reconstruct(m, n0, r0, h0).map_err(err)?;
    to_py(
        py,
        &json!({
            "A_ode": rec.a_ode,
            "B_ode": rec.b_ode,
            "A_closed": rec.a_closed,
            "B_closed": rec.b_closed,
            "mass_from_B": rec.mass_from_b,
            "sup_deviation": rec.sup_deviation,
            "r_end": rec.r_end,
            "r": rec.profile.iter().map(|p| p.r).collect::<Vec<_>>(),
            "N": rec.profile.iter().map(|p| p.n).collect::<Vec<_>>(),
        }),
    )
}

/// Run the `photon` command line in-process; returns its exit status.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("photon".to_string()).chain(args).collect();
    py.detach(|| photon_core::cli::main_with_args(argv))
}

#[pymodule]
fn photon_sphere(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GeometryError", m.py().get_type::<GeometryError>())?;
    m.add_class::<PySpacetime>()?;
    m.add_function(wrap_pyfunction!(locate_photon_sphere, m)?)?;
    m.add_function(wrap_pyfunction!(certify_cylinder, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_null, m)?)?;
    m.add_function(wrap_pyfunction!(vacuum_residual, m)?)?;
    m.add_function(wrap_pyfunction!(run_israel, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_lapse, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
