use serde::{Deserialize, Serialize};

use crate::autodiff::{Dual, Scalar};
use crate::calculus::{
    christoffel_from, covariant_hessian, curvature, fd_jet, metric_derivs,
    scalar_derivs, step_first, MetricField, ScalarField, Scheme,
};
use crate::error::{GeomError, Result};
use crate::linalg::{inverse, quad_form};

/// Level set {F = c} of a scalar field in a D-dimensional chart; E = D − 1.
///
/// Points are parametrised by the coordinates other than `solve_axis`; the
/// unit normal is oriented so that its `orient_axis` component is positive.
#[derive(Clone, Debug)]
pub struct LevelSet<M, F, const D: usize, const E: usize> {
    pub metric: M,
    pub function: F,
    pub level: f64,
    pub solve_axis: usize,
    pub orient_axis: usize,
    /// Starting value of the solved coordinate for Newton projection.
    pub guess: f64,
    pub scheme: Scheme,
}

/// Normal and tangent frame at a surface point.
#[derive(Clone, Debug)]
pub struct Frame<const D: usize, const E: usize> {
    /// Unit normal η (contravariant).
    pub normal: [f64; D],
    /// g(η, η) sign.
    pub tau: f64,
    /// η = s ∇F/|∇F|.
    pub sign: f64,
    /// |g⁻¹(dF, dF)|^{1/2}
    pub grad_norm: f64,
    pub grad: [f64; D],
    /// X_a = ∂_a − (∂_aF/∂_kF) ∂_k for the parametrising axes.
    pub tangents: [[f64; D]; E],
}

/// Extrinsic geometry at a point, components in the coordinate tangent frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeData {
    pub at: Vec<f64>,
    pub tau: f64,
    pub normal: Vec<f64>,
    pub induced_metric: Vec<Vec<f64>>,
    pub second_ff: Vec<Vec<f64>>,
    pub mean_curvature: f64,
    /// Full contraction |II|² with the induced metric.
    pub norm_sq: f64,
    /// Frobenius norm of the trace-free part in an induced-orthonormal frame.
    pub tracefree_norm: f64,
    /// |g(η, η) − τ|
    pub normal_defect: f64,
    /// max_a |g(η, X_a)| / |X_a|
    pub orthogonality_defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussResidual {
    pub ambient_scalar: f64,
    pub ricci_normal: f64,
    pub intrinsic_scalar: f64,
    pub mean_curvature: f64,
    pub norm_sq: f64,
    pub tau: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodazziResidual {
    /// b(Rm(X, Y) η, Z)
    pub curvature_side: f64,
    /// (∇_X II)(Y, Z) − (∇_Y II)(X, Z)
    pub derivative_side: f64,
    pub residual: f64,
}

impl<M, F, const D: usize, const E: usize> LevelSet<M, F, D, E>
where
    M: MetricField<D> + Clone,
    F: ScalarField<D> + Clone,
{
    pub fn new(metric: M, function: F, level: f64, solve_axis: usize, orient_axis: usize, guess: f64) -> Self {
        assert_eq!(E + 1, D, "level set dimension must be one less than the ambient");
        assert!(solve_axis < D && orient_axis < D);
        Self {
            metric,
            function,
            level,
            solve_axis,
            orient_axis,
            guess,
            scheme: Scheme::Autodiff,
        }
    }

    pub fn axes(&self) -> [usize; E] {
        let mut out = [0; E];
        let mut a = 0;
        for i in 0..D {
            if i != self.solve_axis {
                out[a] = i;
                a += 1;
            }
        }
        out
    }

    pub fn intrinsic(&self, x: &[f64; D]) -> [f64; E] {
        let ax = self.axes();
        std::array::from_fn(|a| x[ax[a]])
    }

    fn along_axis(&self, x: &[f64; D], s: f64) -> Result<(f64, f64)> {
        let mut y = *x;
        y[self.solve_axis] = s;
        self.function.check(&y)?;
        self.metric.check(&y)?;
        let mut d: [Dual<1>; D] = std::array::from_fn(|i| Dual::constant(y[i]));
        d[self.solve_axis] = Dual::var(s, 0);
        let v = self.function.value(&d);
        Ok((v.val - self.level, v.grad[0]))
    }

    /// Move x along the solved axis onto the surface.
    pub fn project(&self, x: &[f64; D]) -> Result<[f64; D]> {
        self.project_from(x, x[self.solve_axis])
    }

    fn project_from(&self, x: &[f64; D], start: f64) -> Result<[f64; D]> {
        let mut s = start;
        let (mut f, mut df) = self.along_axis(x, s)?;
        for _ in 0..100 {
            let scale = s.abs().max(1.0);
            if f == 0.0 {
                break;
            }
            if df == 0.0 || !df.is_finite() {
                return Err(GeomError::Foliation(format!(
                    "degenerate defining function along axis {} at {s}",
                    self.solve_axis
                )));
            }
            let mut step = f / df;
            let mut accepted = false;
            for _ in 0..60 {
                if let Ok((fn_, dfn)) = self.along_axis(x, s - step) {
                    if fn_.abs() < f.abs() || step.abs() < 1e-15 * scale {
                        s -= step;
                        f = fn_;
                        df = dfn;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                return Err(GeomError::Foliation(format!(
                    "projection onto level {} stalled at {s}",
                    self.level
                )));
            }
            if step.abs() <= 4.0 * f64::EPSILON * scale {
                break;
            }
        }
        if !(f.abs() <= 1e-10 * self.level.abs().max(1.0)) {
            return Err(GeomError::Foliation(format!(
                "projection onto level {} did not converge (residual {f:e})",
                self.level
            )));
        }
        let mut y = *x;
        y[self.solve_axis] = s;
        Ok(y)
    }

    /// Surface point with intrinsic coordinates y.
    pub fn embed(&self, y: &[f64; E], guess: f64) -> Result<[f64; D]> {
        let ax = self.axes();
        let mut x = [0.0; D];
        for a in 0..E {
            x[ax[a]] = y[a];
        }
        x[self.solve_axis] = guess;
        self.project_from(&x, guess)
    }

    pub fn frame(&self, x: &[f64; D]) -> Result<Frame<D, E>> {
        let (_, grad, _) = scalar_derivs(&self.function, x, Scheme::Autodiff)?;
        self.metric.check(x)?;
        let g = self.metric.metric(x);
        let ginv = inverse(&g)?;
        self.frame_from(&grad, &ginv)
    }

    fn frame_from(&self, grad: &[f64; D], ginv: &[[f64; D]; D]) -> Result<Frame<D, E>> {
        let k = self.solve_axis;
        let up: [f64; D] = std::array::from_fn(|i| (0..D).map(|j| ginv[i][j] * grad[j]).sum());
        let n2: f64 = (0..D).map(|i| up[i] * grad[i]).sum();
        let gscale = grad.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !(n2.abs() > 1e-24 * gscale.max(1e-300).powi(2)) || gscale < 1e-12 || grad[k] == 0.0 {
            return Err(GeomError::Foliation(format!(
                "degenerate normal: |dF|² = {n2:e}"
            )));
        }
        let grad_norm = n2.abs().sqrt();
        let tau = n2.signum();
        let sign = if up[self.orient_axis] >= 0.0 { 1.0 } else { -1.0 };
        let normal = up.map(|v| sign * v / grad_norm);
        let ax = self.axes();
        let tangents = std::array::from_fn(|a| {
            let mut v = [0.0; D];
            v[ax[a]] = 1.0;
            v[k] = -grad[ax[a]] / grad[k];
            v
        });
        Ok(Frame {
            normal,
            tau,
            sign,
            grad_norm,
            grad: *grad,
            tangents,
        })
    }

    pub fn shape(&self, x: &[f64; D]) -> Result<ShapeData> {
        let d = metric_derivs(&self.metric, x, self.scheme)?;
        let gamma = christoffel_from(&d);
        let (_, grad, hess) = scalar_derivs(&self.function, x, Scheme::Autodiff)?;
        let fr = self.frame_from(&grad, &d.ginv)?;
        let h = covariant_hessian(&grad, &hess, &gamma);
        let gam: [[f64; E]; E] =
            std::array::from_fn(|a| std::array::from_fn(|b| quad_form(&d.g, &fr.tangents[a], &fr.tangents[b])));
        let ii: [[f64; E]; E] = std::array::from_fn(|a| {
            std::array::from_fn(|b| fr.sign * quad_form(&h, &fr.tangents[a], &fr.tangents[b]) / fr.grad_norm)
        });
        let gi = inverse(&gam)?;
        let mut mean = 0.0;
        let mut norm_sq = 0.0;
        for a in 0..E {
            for b in 0..E {
                mean += gi[a][b] * ii[a][b];
                for c in 0..E {
                    for e in 0..E {
                        norm_sq += gi[a][c] * gi[b][e] * ii[a][b] * ii[c][e];
                    }
                }
            }
        }
        let tf: [[f64; E]; E] =
            std::array::from_fn(|a| std::array::from_fn(|b| ii[a][b] - mean / E as f64 * gam[a][b]));
        let basis = orthonormal_basis(&gam)?;
        let mut tracefree_sq = 0.0;
        for p in &basis {
            for q in &basis {
                let mut s = 0.0;
                for a in 0..E {
                    for b in 0..E {
                        s += p[a] * q[b] * tf[a][b];
                    }
                }
                tracefree_sq += s * s;
            }
        }
        let nn = quad_form(&d.g, &fr.normal, &fr.normal);
        let orth = fr
            .tangents
            .iter()
            .map(|t| quad_form(&d.g, &fr.normal, t).abs() / quad_form(&d.g, t, t).abs().sqrt())
            .fold(0.0, f64::max);
        Ok(ShapeData {
            at: x.to_vec(),
            tau: fr.tau,
            normal: fr.normal.to_vec(),
            induced_metric: gam.iter().map(|r| r.to_vec()).collect(),
            second_ff: ii.iter().map(|r| r.to_vec()).collect(),
            mean_curvature: mean,
            norm_sq,
            tracefree_norm: tracefree_sq.sqrt(),
            normal_defect: (nn - fr.tau).abs(),
            orthogonality_defect: orth,
        })
    }

    /// Induced metric in the intrinsic chart, anchored near x.
    pub fn induced(&self, x: &[f64; D]) -> InducedMetric<M, F, D, E> {
        InducedMetric {
            surface: self.clone(),
            guess: x[self.solve_axis],
        }
    }

    /// Contracted Gauss equation R_b − 2τ Ric_b(η,η) − R_a + τ(H² − |II|²).
    pub fn gauss_residual(&self, x: &[f64; D]) -> Result<GaussResidual> {
        let x = self.project(x)?;
        let amb = curvature(&self.metric, &x, self.scheme)?;
        let sh = self.shape(&x)?;
        let eta: [f64; D] = std::array::from_fn(|i| sh.normal[i]);
        let ric_nn = quad_form(&amb.ricci, &eta, &eta);
        let y = self.intrinsic(&x);
        let intrinsic = curvature(&self.induced(&x), &y, Scheme::FiniteDifference)?.scalar;
        let t = sh.tau;
        let residual = amb.scalar - 2.0 * t * ric_nn - intrinsic
            + t * (sh.mean_curvature * sh.mean_curvature - sh.norm_sq);
        Ok(GaussResidual {
            ambient_scalar: amb.scalar,
            ricci_normal: ric_nn,
            intrinsic_scalar: intrinsic,
            mean_curvature: sh.mean_curvature,
            norm_sq: sh.norm_sq,
            tau: t,
            residual: residual.abs(),
        })
    }

    /// Scalar curvature of the induced metric.
    pub fn intrinsic_scalar(&self, x: &[f64; D]) -> Result<f64> {
        let x = self.project(x)?;
        Ok(curvature(&self.induced(&x), &self.intrinsic(&x), Scheme::FiniteDifference)?.scalar)
    }

    fn check_tangent(&self, fr: &Frame<D, E>, v: &[f64; D]) -> Result<()> {
        let df: f64 = (0..D).map(|i| fr.grad[i] * v[i]).sum();
        let size = v.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let gsize = fr.grad.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if df.abs() > 1e-9 * size.max(1e-300) * gsize {
            return Err(GeomError::Rejected(format!(
                "vector is not tangent to the surface (dF(v) = {df:e})"
            )));
        }
        Ok(())
    }

    /// Second fundamental form in the intrinsic coordinate basis at y.
    fn second_ff_at(&self, y: &[f64; E], guess: f64) -> Result<[[f64; E]; E]> {
        let x = self.embed(y, guess)?;
        let sh = self.shape(&x)?;
        Ok(std::array::from_fn(|a| std::array::from_fn(|b| sh.second_ff[a][b])))
    }

    /// Intrinsic covariant derivative `dii[c][a][b] = ∇_c II_ab`.
    pub fn second_ff_derivative(&self, x: &[f64; D]) -> Result<[[[f64; E]; E]; E]> {
        let x = self.project(x)?;
        let y = self.intrinsic(&x);
        let guess = x[self.solve_axis];
        let f = |z: &[f64; E]| -> Result<Vec<f64>> {
            Ok(self.second_ff_at(z, guess)?.iter().flatten().copied().collect())
        };
        let jet = fd_jet(&f, &y, false)?;
        let ii = self.second_ff_at(&y, guess)?;
        let gsig = christoffel_from(&metric_derivs(&self.induced(&x), &y, Scheme::FiniteDifference)?);
        let mut out = [[[0.0; E]; E]; E];
        for c in 0..E {
            for a in 0..E {
                for b in 0..E {
                    let mut s = jet.grad[c][a * E + b];
                    for d in 0..E {
                        s -= gsig[d][c][a] * ii[d][b] + gsig[d][c][b] * ii[a][d];
                    }
                    out[c][a][b] = s;
                }
            }
        }
        Ok(out)
    }

    /// Codazzi equation b(Rm(X,Y)η, Z) = (∇_X II)(Y,Z) − (∇_Y II)(X,Z) for tangent X, Y, Z.
    pub fn codazzi_residual(
        &self,
        x: &[f64; D],
        xv: &[f64; D],
        yv: &[f64; D],
        zv: &[f64; D],
    ) -> Result<CodazziResidual> {
        let x = self.project(x)?;
        let fr = self.frame(&x)?;
        for v in [xv, yv, zv] {
            self.check_tangent(&fr, v)?;
        }
        let amb = curvature(&self.metric, &x, self.scheme)?;
        let mut lhs = 0.0;
        for i in 0..D {
            for j in 0..D {
                for k in 0..D {
                    for l in 0..D {
                        let r = amb.riemann[i][j][k][l];
                        if r == 0.0 {
                            continue;
                        }
                        let zl: f64 = (0..D).map(|m| amb.metric[l][m] * zv[m]).sum();
                        lhs += xv[i] * yv[j] * fr.normal[k] * r * zl;
                    }
                }
            }
        }
        let ax = self.axes();
        let comp = |v: &[f64; D]| -> [f64; E] { std::array::from_fn(|a| v[ax[a]]) };
        let (xc, yc, zc) = (comp(xv), comp(yv), comp(zv));
        let dii = self.second_ff_derivative(&x)?;
        let mut rhs = 0.0;
        for c in 0..E {
            for a in 0..E {
                for b in 0..E {
                    rhs += (xc[c] * yc[a] - yc[c] * xc[a]) * zc[b] * dii[c][a][b];
                }
            }
        }
        Ok(CodazziResidual {
            curvature_side: lhs,
            derivative_side: rhs,
            residual: (lhs - rhs).abs(),
        })
    }

    /// Gradient of the mean curvature in intrinsic coordinates.
    pub fn mean_curvature_gradient(&self, x: &[f64; D]) -> Result<[f64; E]> {
        let x = self.project(x)?;
        let y = self.intrinsic(&x);
        let guess = x[self.solve_axis];
        let f = |z: &[f64; E]| -> Result<Vec<f64>> {
            Ok(vec![self.shape(&self.embed(z, guess)?)?.mean_curvature])
        };
        let jet = fd_jet(&f, &y, false)?;
        Ok(std::array::from_fn(|a| jet.grad[a][0]))
    }

    /// On umbilic surfaces: max over coordinate tangents of |Ric(X,η) − (1−n) X(H/n)|.
    pub fn umbilic_codazzi_residual(&self, x: &[f64; D]) -> Result<f64> {
        let x = self.project(x)?;
        let amb = curvature(&self.metric, &x, self.scheme)?;
        let fr = self.frame(&x)?;
        let dh = self.mean_curvature_gradient(&x)?;
        let n = E as f64;
        let mut worst: f64 = 0.0;
        for a in 0..E {
            let ric = quad_form(&amb.ricci, &fr.tangents[a], &fr.normal);
            worst = worst.max((ric - (1.0 - n) * dh[a] / n).abs());
        }
        Ok(worst)
    }

    /// Orthonormal tangent frame (ambient components), first vector along the first axis.
    pub fn orthonormal_tangents(&self, x: &[f64; D]) -> Result<Vec<[f64; D]>> {
        let fr = self.frame(x)?;
        let g = self.metric.metric(x);
        let gam: [[f64; E]; E] =
            std::array::from_fn(|a| std::array::from_fn(|b| quad_form(&g, &fr.tangents[a], &fr.tangents[b])));
        let basis = orthonormal_basis(&gam)?;
        Ok(basis
            .iter()
            .map(|c| std::array::from_fn(|i| (0..E).map(|a| c[a] * fr.tangents[a][i]).sum()))
            .collect())
    }
}

/// Gram–Schmidt in a (possibly indefinite) metric; returns coefficient vectors.
pub fn orthonormal_basis<const E: usize>(g: &[[f64; E]; E]) -> Result<Vec<[f64; E]>> {
    let mut out: Vec<([f64; E], f64)> = Vec::with_capacity(E);
    for a in 0..E {
        let mut v = [0.0; E];
        v[a] = 1.0;
        for (e, eps) in &out {
            let proj = quad_form(g, &v, e);
            for i in 0..E {
                v[i] -= eps * proj * e[i];
            }
        }
        let n = quad_form(g, &v, &v);
        if n.abs() < 1e-300 || !n.is_finite() {
            return Err(GeomError::Singular("degenerate induced metric".into()));
        }
        let s = n.abs().sqrt();
        out.push((v.map(|c| c / s), n.signum()));
    }
    Ok(out.into_iter().map(|(v, _)| v).collect())
}

/// Metric induced on a level set, evaluated in its intrinsic chart.
///
/// Only values are available (each evaluation solves for the embedding), so
/// curvature of this field always goes through finite differences.
#[derive(Clone, Debug)]
pub struct InducedMetric<M, F, const D: usize, const E: usize> {
    pub surface: LevelSet<M, F, D, E>,
    pub guess: f64,
}

impl<M, F, const D: usize, const E: usize> InducedMetric<M, F, D, E>
where
    M: MetricField<D> + Clone,
    F: ScalarField<D> + Clone,
{
    pub fn values(&self, y: &[f64; E]) -> Result<[[f64; E]; E]> {
        let x = self.surface.embed(y, self.guess)?;
        let fr = self.surface.frame(&x)?;
        let g = self.surface.metric.metric(&x);
        Ok(std::array::from_fn(|a| {
            std::array::from_fn(|b| quad_form(&g, &fr.tangents[a], &fr.tangents[b]))
        }))
    }
}

impl<M, F, const D: usize, const E: usize> MetricField<E> for InducedMetric<M, F, D, E>
where
    M: MetricField<D> + Clone,
    F: ScalarField<D> + Clone,
{
    fn metric<S: Scalar>(&self, y: &[S; E]) -> [[S; E]; E] {
        let yr: [f64; E] = std::array::from_fn(|a| y[a].re());
        match self.values(&yr) {
            Ok(g) => g.map(|row| row.map(S::cst)),
            Err(_) => [[S::cst(f64::NAN); E]; E],
        }
    }

    fn check(&self, y: &[f64; E]) -> Result<()> {
        self.values(y).map(|_| ())
    }

    fn exact_derivatives(&self) -> bool {
        false
    }
}

/// Fourth-order central derivative of a scalar function of one variable.
pub fn central_derivative(f: &dyn Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let h = step_first(x);
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

