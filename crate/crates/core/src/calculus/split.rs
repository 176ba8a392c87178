use serde::{Deserialize, Serialize};

use super::curvature::{christoffel_from, scalar_geometry};
use super::derivs::{fd_jet, metric_derivs, Scheme};
use super::fields::{MetricField, ScalarField};
use crate::error::{GeomError, Result};
use crate::hypersurfaces::LevelSet;
use crate::linalg::quad_form;

/// Terms of Δ_B f = Δ_A f + ∇²_B f(η,η) + (tr II) η(f).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitResidual {
    pub ambient_laplacian: f64,
    pub intrinsic_laplacian: f64,
    pub normal_hessian: f64,
    pub mean_curvature_term: f64,
    pub residual: f64,
}

/// Residual of the Laplacian split along a Riemannian-normal hypersurface.
/// The intrinsic Laplacian is computed independently in the surface chart.
pub fn laplacian_split_residual<M, G, F, const D: usize, const E: usize>(
    f: &F,
    surface: &LevelSet<M, G, D, E>,
    x: &[f64; D],
) -> Result<SplitResidual>
where
    M: MetricField<D> + Clone,
    G: ScalarField<D> + Clone,
    F: ScalarField<D>,
{
    let x = surface.project(x)?;
    let shape = surface.shape(&x)?;
    if shape.tau < 0.0 {
        return Err(GeomError::Rejected(
            "Laplacian split is stated for spacelike normals (tau = +1)".into(),
        ));
    }
    let amb = scalar_geometry(&surface.metric, f, &x, Scheme::Autodiff)?;
    let eta: [f64; D] = std::array::from_fn(|i| shape.normal[i]);
    let normal_hessian = quad_form(&amb.hessian, &eta, &eta);
    let eta_f: f64 = (0..D).map(|i| eta[i] * amb.grad[i]).sum();
    let mean_curvature_term = shape.mean_curvature * eta_f;

    let y = surface.intrinsic(&x);
    let guess = x[surface.solve_axis];
    let induced = surface.induced(&x);
    let restricted = |z: &[f64; E]| -> Result<Vec<f64>> {
        let p = surface.embed(z, guess)?;
        Ok(vec![f.value(&p)])
    };
    let jet = fd_jet(&restricted, &y, true)?;
    let d = metric_derivs(&induced, &y, Scheme::FiniteDifference)?;
    let gamma = christoffel_from(&d);
    let mut intrinsic = 0.0;
    for a in 0..E {
        for b in 0..E {
            let mut h = jet.hess[a][b][0];
            for c in 0..E {
                h -= gamma[c][a][b] * jet.grad[c][0];
            }
            intrinsic += d.ginv[a][b] * h;
        }
    }
    let residual =
        (amb.laplacian - intrinsic - normal_hessian - mean_curvature_term).abs();
    Ok(SplitResidual {
        ambient_laplacian: amb.laplacian,
        intrinsic_laplacian: intrinsic,
        normal_hessian,
        mean_curvature_term,
        residual,
    })
}
