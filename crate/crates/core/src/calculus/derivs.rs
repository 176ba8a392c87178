use serde::{Deserialize, Serialize};

use super::fields::{MetricField, ScalarField};
use crate::autodiff::Jet;
use crate::error::{GeomError, Result};
use crate::linalg::{inverse, Mat};

/// How metric derivatives are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Autodiff,
    FiniteDifference,
}

/// Metric, inverse and first two coordinate derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricDerivs<const D: usize> {
    pub g: Mat<f64, D>,
    pub ginv: Mat<f64, D>,
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: [Mat<f64, D>; D],
    /// `ddg[k][l][i][j] = ∂_k ∂_l g_ij`
    pub ddg: [[Mat<f64, D>; D]; D],
}

/// Stencil weights of the fourth-order central first derivative at offsets -2..=2.
const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
/// Fourth-order central second derivative.
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

/// Step for first derivatives: ε^{1/3} max(1, |x|).
pub fn step_first(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Step for second derivatives: ε^{1/6} max(1, |x|).
pub fn step_second(x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / 6.0) * x.abs().max(1.0)
}

/// Value, gradient and Hessian of a vector-valued function by fourth-order central differences.
/// Samples enter as differences from the centre value, so constants differentiate to exactly zero.
pub struct FdJet {
    pub val: Vec<f64>,
    pub grad: Vec<Vec<f64>>,
    pub hess: Vec<Vec<Vec<f64>>>,
}

pub fn fd_jet<const D: usize>(
    f: &dyn Fn(&[f64; D]) -> Result<Vec<f64>>,
    x: &[f64; D],
    second: bool,
) -> Result<FdJet> {
    let val = f(x)?;
    let k = val.len();
    let shifted = |dirs: &[(usize, f64)]| {
        let mut y = *x;
        for &(i, d) in dirs {
            y[i] += d;
        }
        f(&y).map_err(|e| GeomError::Domain(format!("stencil leaves domain: {e}")))
    };
    let mut grad = vec![vec![0.0; k]; D];
    for i in 0..D {
        let h = step_first(x[i]);
        for (o, w) in D1.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let v = shifted(&[(i, (o as f64 - 2.0) * h)])?;
            for c in 0..k {
                grad[i][c] += w * (v[c] - val[c]) / h;
            }
        }
    }
    let mut hess = vec![vec![vec![0.0; k]; D]; D];
    if second {
        let hs: [f64; D] = std::array::from_fn(|i| step_second(x[i]));
        for i in 0..D {
            let h = hs[i];
            for (o, w) in D2.iter().enumerate() {
                if o == 2 {
                    continue;
                }
                let v = shifted(&[(i, (o as f64 - 2.0) * h)])?;
                for c in 0..k {
                    hess[i][i][c] += w * (v[c] - val[c]) / (h * h);
                }
            }
            for j in 0..i {
                let hj = hs[j];
                for (a, wa) in D1.iter().enumerate() {
                    for (b, wb) in D1.iter().enumerate() {
                        if *wa == 0.0 || *wb == 0.0 {
                            continue;
                        }
                        let v = shifted(&[(i, (a as f64 - 2.0) * h), (j, (b as f64 - 2.0) * hj)])?;
                        for c in 0..k {
                            hess[i][j][c] += wa * wb * (v[c] - val[c]) / (h * hj);
                        }
                    }
                }
                for c in 0..k {
                    hess[j][i][c] = hess[i][j][c];
                }
            }
        }
    }
    Ok(FdJet { val, grad, hess })
}

/// Metric derivatives; fields without exact derivatives always use finite differences.
pub fn metric_derivs<M: MetricField<D>, const D: usize>(
    metric: &M,
    x: &[f64; D],
    scheme: Scheme,
) -> Result<MetricDerivs<D>> {
    metric.check(x)?;
    let scheme = if metric.exact_derivatives() {
        scheme
    } else {
        Scheme::FiniteDifference
    };
    let mut g = [[0.0; D]; D];
    let mut dg = [[[0.0; D]; D]; D];
    let mut ddg = [[[[0.0; D]; D]; D]; D];
    match scheme {
        Scheme::Autodiff => {
            let seed = Jet::<D>::seed(x);
            let m = metric.metric(&seed);
            for i in 0..D {
                for j in 0..D {
                    g[i][j] = m[i][j].val;
                    for k in 0..D {
                        dg[k][i][j] = m[i][j].grad[k];
                        for l in 0..D {
                            ddg[k][l][i][j] = m[i][j].hess[k][l];
                        }
                    }
                }
            }
        }
        Scheme::FiniteDifference => {
            let f = |y: &[f64; D]| -> Result<Vec<f64>> {
                metric.check(y)?;
                let m = metric.metric(y);
                Ok(m.iter().flatten().copied().collect())
            };
            let jet = fd_jet(&f, x, true)?;
            for i in 0..D {
                for j in 0..D {
                    let c = i * D + j;
                    g[i][j] = jet.val[c];
                    for k in 0..D {
                        dg[k][i][j] = jet.grad[k][c];
                        for l in 0..D {
                            ddg[k][l][i][j] = jet.hess[k][l][c];
                        }
                    }
                }
            }
        }
    }
    if g.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeomError::Domain("non-finite metric component".into()));
    }
    let ginv = inverse(&g)?;
    Ok(MetricDerivs { g, ginv, dg, ddg })
}

/// Value, gradient and coordinate Hessian of a scalar field.
pub fn scalar_derivs<F: ScalarField<D>, const D: usize>(
    f: &F,
    x: &[f64; D],
    scheme: Scheme,
) -> Result<(f64, [f64; D], Mat<f64, D>)> {
    f.check(x)?;
    match scheme {
        Scheme::Autodiff => {
            let j = f.value(&Jet::<D>::seed(x));
            Ok((j.val, j.grad, j.hess))
        }
        Scheme::FiniteDifference => {
            let g = |y: &[f64; D]| -> Result<Vec<f64>> {
                f.check(y)?;
                Ok(vec![f.value(y)])
            };
            let jet = fd_jet(&g, x, true)?;
            Ok((
                jet.val[0],
                std::array::from_fn(|i| jet.grad[i][0]),
                std::array::from_fn(|i| std::array::from_fn(|j| jet.hess[i][j][0])),
            ))
        }
    }
}
