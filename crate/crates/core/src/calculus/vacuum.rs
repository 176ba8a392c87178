use serde::{Deserialize, Serialize};

use super::curvature::{covariant_hessian, curvature_from, CurvatureBundle, Riemann};
use super::derivs::{metric_derivs, scalar_derivs, Scheme};
use crate::error::{GeomError, Result};
use crate::spacetimes::{ChartPoint, StaticSpacetime};

/// Residuals of the static vacuum equations N Ric = ∇²N, R = 0, ΔN = 0 on the slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VacuumResidual {
    /// |N Ric − ∇²N|_g
    pub hessian_residual: f64,
    pub scalar_residual: f64,
    pub laplace_residual: f64,
    /// tr_g(N Ric − ∇²N), kept for the trace compatibility check.
    pub hessian_trace: f64,
    pub lapse: f64,
    pub at: ChartPoint,
}

pub fn vacuum_residual(
    spacetime: &StaticSpacetime,
    p: &ChartPoint,
    scheme: Scheme,
) -> Result<VacuumResidual> {
    let x = p.spatial();
    let metric = spacetime.spatial();
    let d = metric_derivs(&metric, &x, scheme)?;
    let bundle = curvature_from(&d, x);
    let (n, grad, hess) = scalar_derivs(&spacetime.lapse_field(), &x, scheme)?;
    let h = covariant_hessian(&grad, &hess, &bundle.christoffel);
    let r1: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| n * bundle.ricci[i][j] - h[i][j]));
    let mut lap = 0.0;
    let mut tr = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            lap += d.ginv[i][j] * h[i][j];
            tr += d.ginv[i][j] * r1[i][j];
        }
    }
    Ok(VacuumResidual {
        hessian_residual: bundle.norm2(&r1),
        scalar_residual: bundle.scalar.abs(),
        laplace_residual: lap.abs(),
        hessian_trace: tr,
        lapse: n,
        at: *p,
    })
}

/// Riemann tensor rebuilt from Ricci via the Kulkarni–Nomizu product with the Schouten tensor.
#[derive(Clone, Debug)]
pub struct KulkarniResult {
    pub reconstructed: Riemann<3>,
    /// |Rm − reconstruction|_g
    pub residual: f64,
}

/// In three dimensions Weyl vanishes and Rm = P ⊙ g with P = Ric − (R/4) g.
pub fn kulkarni_reconstruct<const D: usize>(bundle: &CurvatureBundle<D>) -> Result<KulkarniResult> {
    if D != 3 {
        return Err(GeomError::Rejected(format!(
            "Kulkarni–Nomizu reconstruction needs dimension 3, got {D}"
        )));
    }
    let sig = crate::linalg::signature(
        &bundle.metric.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
    );
    if sig != (0, 0, 3) {
        return Err(GeomError::Rejected("Kulkarni–Nomizu reconstruction needs a Riemannian metric".into()));
    }
    let g = |i: usize, j: usize| bundle.metric[i][j];
    let gi = |i: usize, j: usize| bundle.inverse[i][j];
    let p = |i: usize, j: usize| bundle.ricci[i][j] - 0.25 * bundle.scalar * g(i, j);
    // P_i^l = P_im g^ml
    let pu = |i: usize, l: usize| (0..3).map(|m| p(i, m) * gi(m, l)).sum::<f64>();
    let delta = |i: usize, l: usize| if i == l { 1.0 } else { 0.0 };
    let mut rec = [[[[0.0; 3]; 3]; 3]; 3];
    let mut diff = [[[[0.0; D]; D]; D]; D];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    rec[i][j][k][l] = p(j, k) * delta(i, l) - p(i, k) * delta(j, l)
                        + g(j, k) * pu(i, l)
                        - g(i, k) * pu(j, l);
                }
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for m in 0..3 {
                    diff[i][j][k][m] = (0..3)
                        .map(|l| (bundle.riemann[i][j][k][l] - rec[i][j][k][l]) * g(l, m))
                        .sum();
                }
            }
        }
    }
    Ok(KulkarniResult {
        reconstructed: rec,
        residual: bundle.norm4(&diff),
    })
}
