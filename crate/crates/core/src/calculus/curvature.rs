use serde_json::{json, Value};

use super::derivs::{metric_derivs, scalar_derivs, MetricDerivs, Scheme};
use super::fields::{MetricField, ScalarField};
use crate::error::Result;
use crate::linalg::Mat;

/// `gamma[a][b][c] = Γ^a_bc`
pub type Christoffel<const D: usize> = [[[f64; D]; D]; D];

/// `rm[i][j][k][l] = Rm_ijk^l`, the component of R(∂_i, ∂_j)∂_k along ∂_l,
/// with R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z.
pub type Riemann<const D: usize> = [[[[f64; D]; D]; D]; D];

pub fn christoffel_from<const D: usize>(d: &MetricDerivs<D>) -> Christoffel<D> {
    let mut gamma = [[[0.0; D]; D]; D];
    for a in 0..D {
        for b in 0..D {
            for c in b..D {
                let mut s = 0.0;
                for e in 0..D {
                    s += d.ginv[a][e] * (d.dg[b][e][c] + d.dg[c][e][b] - d.dg[e][b][c]);
                }
                gamma[a][b][c] = 0.5 * s;
                gamma[a][c][b] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Levi-Civita connection coefficients at x.
pub fn christoffel<M: MetricField<D>, const D: usize>(
    metric: &M,
    x: &[f64; D],
    scheme: Scheme,
) -> Result<Christoffel<D>> {
    Ok(christoffel_from(&metric_derivs(metric, x, scheme)?))
}

/// `dgamma[e][a][b][c] = ∂_e Γ^a_bc`
fn christoffel_derivs<const D: usize>(d: &MetricDerivs<D>) -> [Christoffel<D>; D] {
    let mut dginv = [[[0.0; D]; D]; D];
    for e in 0..D {
        for a in 0..D {
            for b in 0..D {
                let mut s = 0.0;
                for p in 0..D {
                    for q in 0..D {
                        s -= d.ginv[a][p] * d.dg[e][p][q] * d.ginv[q][b];
                    }
                }
                dginv[e][a][b] = s;
            }
        }
    }
    let mut out = [[[[0.0; D]; D]; D]; D];
    for e in 0..D {
        for a in 0..D {
            for b in 0..D {
                for c in b..D {
                    let mut s = 0.0;
                    for f in 0..D {
                        let first = d.dg[b][f][c] + d.dg[c][f][b] - d.dg[f][b][c];
                        let second = d.ddg[e][b][f][c] + d.ddg[e][c][f][b] - d.ddg[e][f][b][c];
                        s += dginv[e][a][f] * first + d.ginv[a][f] * second;
                    }
                    out[e][a][b][c] = 0.5 * s;
                    out[e][a][c][b] = 0.5 * s;
                }
            }
        }
    }
    out
}

/// Connection and curvature at a chart point.
#[derive(Clone, Debug)]
pub struct CurvatureBundle<const D: usize> {
    pub at: [f64; D],
    pub metric: Mat<f64, D>,
    pub inverse: Mat<f64, D>,
    pub christoffel: Christoffel<D>,
    pub riemann: Riemann<D>,
    /// `Ric_jk = Rm_ijk^i`
    pub ricci: Mat<f64, D>,
    pub scalar: f64,
}

pub fn curvature_from<const D: usize>(d: &MetricDerivs<D>, at: [f64; D]) -> CurvatureBundle<D> {
    let gamma = christoffel_from(d);
    let dgamma = christoffel_derivs(d);
    let mut rm = [[[[0.0; D]; D]; D]; D];
    for i in 0..D {
        for j in 0..D {
            if i == j {
                continue;
            }
            for k in 0..D {
                for l in 0..D {
                    let mut s = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..D {
                        s += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    rm[i][j][k][l] = s;
                }
            }
        }
    }
    let ricci = contract_ricci(&rm);
    let mut scalar = 0.0;
    for j in 0..D {
        for k in 0..D {
            scalar += d.ginv[j][k] * ricci[j][k];
        }
    }
    CurvatureBundle {
        at,
        metric: d.g,
        inverse: d.ginv,
        christoffel: gamma,
        riemann: rm,
        ricci,
        scalar,
    }
}

/// `Ric_jk = Σ_i Rm_ijk^i`.
pub fn contract_ricci<const D: usize>(rm: &Riemann<D>) -> Mat<f64, D> {
    std::array::from_fn(|j| std::array::from_fn(|k| (0..D).map(|i| rm[i][j][k][i]).sum()))
}

/// Curvature of a metric field at x.
pub fn curvature<M: MetricField<D>, const D: usize>(
    metric: &M,
    x: &[f64; D],
    scheme: Scheme,
) -> Result<CurvatureBundle<D>> {
    Ok(curvature_from(&metric_derivs(metric, x, scheme)?, *x))
}

impl<const D: usize> CurvatureBundle<D> {
    /// `R_ijkm = Rm_ijk^l g_lm`
    pub fn riemann_lowered(&self) -> Riemann<D> {
        let mut out = [[[[0.0; D]; D]; D]; D];
        for i in 0..D {
            for j in 0..D {
                for k in 0..D {
                    for m in 0..D {
                        out[i][j][k][m] = (0..D).map(|l| self.riemann[i][j][k][l] * self.metric[l][m]).sum();
                    }
                }
            }
        }
        out
    }

    /// Max violation of the algebraic symmetries: antisymmetry in (ij) and (km),
    /// pair symmetry, first Bianchi identity, symmetry of Ric.
    pub fn symmetry_residual(&self) -> f64 {
        let r = self.riemann_lowered();
        let mut worst: f64 = 0.0;
        for i in 0..D {
            for j in 0..D {
                worst = worst.max((self.ricci[i][j] - self.ricci[j][i]).abs());
                for k in 0..D {
                    for m in 0..D {
                        worst = worst.max((r[i][j][k][m] + r[j][i][k][m]).abs());
                        worst = worst.max((r[i][j][k][m] + r[i][j][m][k]).abs());
                        worst = worst.max((r[i][j][k][m] - r[k][m][i][j]).abs());
                        worst = worst.max((r[i][j][k][m] + r[j][k][i][m] + r[k][i][j][m]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Norm of a covariant 2-tensor: sqrt(|g^ik g^jl T_ij T_kl|).
    pub fn norm2(&self, t: &Mat<f64, D>) -> f64 {
        let mut s = 0.0;
        for i in 0..D {
            for j in 0..D {
                for k in 0..D {
                    for l in 0..D {
                        s += self.inverse[i][k] * self.inverse[j][l] * t[i][j] * t[k][l];
                    }
                }
            }
        }
        s.abs().sqrt()
    }

    /// Norm of a covariant 4-tensor.
    pub fn norm4(&self, t: &Riemann<D>) -> f64 {
        let gi = &self.inverse;
        // Raise one index at a time to keep the cost at O(D^5).
        let mut up = *t;
        for _ in 0..4 {
            let mut next = [[[[0.0; D]; D]; D]; D];
            for a in 0..D {
                for b in 0..D {
                    for c in 0..D {
                        for d in 0..D {
                            // raise the first slot and rotate it to the back
                            next[b][c][d][a] = (0..D).map(|e| gi[a][e] * up[e][b][c][d]).sum();
                        }
                    }
                }
            }
            up = next;
        }
        let mut s = 0.0;
        for a in 0..D {
            for b in 0..D {
                for c in 0..D {
                    for d in 0..D {
                        s += up[a][b][c][d] * t[a][b][c][d];
                    }
                }
            }
        }
        s.abs().sqrt()
    }

    /// Debug dump with every index written out.
    pub fn to_json(&self) -> Value {
        let mut gamma = Vec::new();
        for a in 0..D {
            for b in 0..D {
                for c in b..D {
                    gamma.push(json!({"index": format!("Gamma^{a}_{{{b}{c}}}"), "value": self.christoffel[a][b][c]}));
                }
            }
        }
        let mut rm = Vec::new();
        for i in 0..D {
            for j in 0..D {
                for k in 0..D {
                    for l in 0..D {
                        rm.push(json!({"index": format!("Rm_{{{i}{j}{k}}}^{l}"), "value": self.riemann[i][j][k][l]}));
                    }
                }
            }
        }
        let mut ric = Vec::new();
        let mut g = Vec::new();
        for i in 0..D {
            for j in 0..D {
                ric.push(json!({"index": format!("Ric_{{{i}{j}}}"), "value": self.ricci[i][j]}));
                g.push(json!({"index": format!("g_{{{i}{j}}}"), "value": self.metric[i][j]}));
            }
        }
        json!({
            "dimension": D,
            "at": self.at.to_vec(),
            "conventions": {
                "christoffel": "Gamma^a_{bc}",
                "riemann": "Rm_{ijk}^l = component of R(d_i,d_j)d_k along d_l, R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z",
                "ricci": "Ric_{jk} = Rm_{ijk}^i",
            },
            "metric": g,
            "christoffel": gamma,
            "riemann": rm,
            "ricci": ric,
            "scalar": self.scalar,
        })
    }
}

/// Covariant Hessian `∇²f_ij = ∂_i∂_j f − Γ^k_ij ∂_k f`.
pub fn covariant_hessian<const D: usize>(
    grad: &[f64; D],
    hess: &Mat<f64, D>,
    gamma: &Christoffel<D>,
) -> Mat<f64, D> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| hess[i][j] - (0..D).map(|k| gamma[k][i][j] * grad[k]).sum::<f64>())
    })
}

/// Scalar field with its covariant derivatives.
#[derive(Clone, Debug)]
pub struct ScalarGeometry<const D: usize> {
    pub value: f64,
    pub grad: [f64; D],
    pub hessian: Mat<f64, D>,
    pub laplacian: f64,
}

pub fn scalar_geometry<M: MetricField<D>, F: ScalarField<D>, const D: usize>(
    metric: &M,
    f: &F,
    x: &[f64; D],
    scheme: Scheme,
) -> Result<ScalarGeometry<D>> {
    let d = metric_derivs(metric, x, scheme)?;
    let gamma = christoffel_from(&d);
    let (value, grad, hess) = scalar_derivs(f, x, scheme)?;
    let hessian = covariant_hessian(&grad, &hess, &gamma);
    let mut laplacian = 0.0;
    for i in 0..D {
        for j in 0..D {
            laplacian += d.ginv[i][j] * hessian[i][j];
        }
    }
    Ok(ScalarGeometry {
        value,
        grad,
        hessian,
        laplacian,
    })
}
