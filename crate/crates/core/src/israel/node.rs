//! Pointwise geometry of the lapse level set through a spatial point.
//!
//! Leaf quantities (ρ, H, h, R_σ, the leaf Laplacians) come from jets of the
//! metric and lapse at the point. The transverse derivatives `∂_N = ρ²∇N`
//! of H and ρ, and the Hessian of ρ, need one more derivative than a jet
//! carries; they are fourth-order central differences of exactly evaluated
//! first-order quantities on a 12-point stencil.

use serde::Serialize;

use crate::autodiff::{Dual, Jet};
use crate::calculus::{christoffel_from, covariant_hessian, curvature_from, Christoffel, MetricDerivs};
use crate::error::{GeomError, Result};
use crate::linalg::{inverse, Mat};
use crate::spacetimes::StaticSpacetime;

/// Below this value of |∇N|·L the lapse does not foliate.
pub const MIN_GRADIENT: f64 = 1e-12;

/// Everything the identities and inequalities need at one leaf point.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct NodeData {
    /// Chart point (r, θ, φ).
    pub at: [f64; 3],
    pub n: f64,
    pub rho: f64,
    /// Mean curvature with respect to the outward unit normal ν.
    pub h: f64,
    /// `∂_N H`.
    pub h_n: f64,
    /// `∂_N ρ`.
    pub rho_n: f64,
    /// `Δ_σ √ρ`.
    pub lap_sqrt_rho: f64,
    /// `Δ_σ ln ρ`.
    pub lap_ln_rho: f64,
    /// `|∇_σ ρ|²`, a sum of squares over an orthonormal leaf frame.
    pub grad_rho_sq: f64,
    /// `|h̊|²`, a sum of squares over an orthonormal leaf frame.
    pub tracefree_sq: f64,
    /// Scalar curvature of the leaf, from the Gauss equation.
    pub r_sigma: f64,
    /// `ν(N)`; its sign is the local λ.
    pub nu_n: f64,
    /// Largest |g(ν, e_a)| over the leaf frame.
    pub orthogonality_defect: f64,
    /// `|H − tr h|` between the divergence and frame-trace routes.
    pub trace_defect: f64,
}

impl NodeData {
    pub fn lambda(&self) -> f64 {
        self.nu_n.signum()
    }

    /// `|∇_σ ρ|²/ρ² + 2|h̊|²`.
    pub fn bracket(&self) -> f64 {
        self.grad_rho_sq / (self.rho * self.rho) + 2.0 * self.tracefree_sq
    }
}

/// First-order data at a point: enough for H and ∇ρ.
struct Local {
    g: Mat<f64, 3>,
    ginv: Mat<f64, 3>,
    gamma: Christoffel<3>,
    hess: Mat<f64, 3>,
    /// |∇N|
    a: f64,
    /// Unit normal along ∇N, contravariant.
    n: [f64; 3],
    /// Outward orientation sign.
    s: f64,
}

impl Local {
    fn new(st: &StaticSpacetime, x: &[f64; 3], g: Mat<f64, 3>, gamma: Christoffel<3>, lapse: Jet<3>) -> Result<Self> {
        let ginv = inverse(&g)?;
        let dn = lapse.grad;
        let hess = covariant_hessian(&dn, &lapse.hess, &gamma);
        let up: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| ginv[i][j] * dn[j]).sum());
        let a = (0..3).map(|i| up[i] * dn[i]).sum::<f64>().sqrt();
        if !(a * st.length_scale() >= MIN_GRADIENT) {
            return Err(GeomError::Foliation(format!(
                "|dN| = {a:.3e} at (r, θ, φ) = ({:.6}, {:.6}, {:.6})",
                x[0], x[1], x[2]
            )));
        }
        if up[0] == 0.0 {
            return Err(GeomError::Foliation(format!(
                "level set tangent to the radial direction at r = {:.6}, θ = {:.6}",
                x[0], x[1]
            )));
        }
        let n = up.map(|v| v / a);
        Ok(Self {
            g,
            ginv,
            gamma,
            hess,
            a,
            n,
            s: up[0].signum(),
        })
    }

    fn at(st: &StaticSpacetime, x: &[f64; 3]) -> Result<Self> {
        st.check_spatial(x)?;
        let xd = Dual::<3>::seed(x);
        let gd = st.spatial_metric(&xd);
        let g = gd.map(|row| row.map(|v| v.val));
        let dg = std::array::from_fn(|k| gd.map(|row| row.map(|v| v.grad[k])));
        let md = MetricDerivs {
            g,
            ginv: inverse(&g)?,
            dg,
            ddg: [[[[0.0; 3]; 3]; 3]; 3],
        };
        let gamma = christoffel_from(&md);
        Self::new(st, x, g, gamma, st.lapse(&Jet::<3>::seed(x)))
    }

    /// `H = s (ΔN − ∇²N(n, n)) / |∇N|`.
    fn mean_curvature(&self) -> f64 {
        let mut lap = 0.0;
        let mut nn = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                lap += self.ginv[i][j] * self.hess[i][j];
                nn += self.hess[i][j] * self.n[i] * self.n[j];
            }
        }
        self.s * (lap - nn) / self.a
    }

    /// `∂_k ρ = −ρ² ∇²N(∂_k, n)` for `ρ = 1/|∇N|`.
    fn grad_rho(&self) -> [f64; 3] {
        let rho = 1.0 / self.a;
        std::array::from_fn(|k| -rho * rho * (0..3).map(|i| self.hess[k][i] * self.n[i]).sum::<f64>())
    }

    fn dot(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        crate::linalg::quad_form(&self.g, u, v)
    }

    /// Orthonormal leaf frame from the projected coordinate vectors ∂_θ, ∂_φ.
    fn frame(&self) -> Result<[[f64; 3]; 2]> {
        let project = |v: [f64; 3]| {
            let c = self.dot(&v, &self.n);
            std::array::from_fn(|i| v[i] - c * self.n[i])
        };
        let t1: [f64; 3] = project([0.0, 1.0, 0.0]);
        let n1 = self.dot(&t1, &t1).sqrt();
        if !(n1 > 0.0) {
            return Err(GeomError::Foliation("degenerate leaf frame".into()));
        }
        let e1 = t1.map(|v| v / n1);
        let t2: [f64; 3] = project([0.0, 0.0, 1.0]);
        let c = self.dot(&t2, &e1);
        let t2: [f64; 3] = std::array::from_fn(|i| t2[i] - c * e1[i]);
        let n2 = self.dot(&t2, &t2).sqrt();
        if !(n2 > 0.0) {
            return Err(GeomError::Foliation("degenerate leaf frame".into()));
        }
        Ok([e1, t2.map(|v| v / n2)])
    }
}

fn bilinear(m: &Mat<f64, 3>, u: &[f64; 3], v: &[f64; 3]) -> f64 {
    crate::linalg::quad_form(m, u, v)
}

/// Fourth-order central first derivative weights at offsets −2, −1, 1, 2.
const D1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];

/// Stencil step per coordinate: ε^{1/5} times the coordinate's scale.
fn step(c: usize, x: f64) -> f64 {
    let scale = if c == 0 { x.abs().max(1.0) } else { 1.0 };
    f64::EPSILON.powf(0.2) * scale
}

pub fn node_data(st: &StaticSpacetime, x: &[f64; 3]) -> Result<NodeData> {
    st.check_spatial(x)?;
    let xj = Jet::<3>::seed(x);
    let gj = st.spatial_metric(&xj);
    let g = gj.map(|row| row.map(|v| v.val));
    let md = MetricDerivs {
        g,
        ginv: inverse(&g)?,
        dg: std::array::from_fn(|k| gj.map(|row| row.map(|v| v.grad[k]))),
        ddg: std::array::from_fn(|k| std::array::from_fn(|l| gj.map(|row| row.map(|v| v.hess[k][l])))),
    };
    let bundle = curvature_from(&md, *x);
    let loc = Local::new(st, x, g, bundle.christoffel, st.lapse(&xj))?;
    let rho = 1.0 / loc.a;
    let s = loc.s;
    let e = loc.frame()?;

    let h11 = s * bilinear(&loc.hess, &e[0], &e[0]) / loc.a;
    let h22 = s * bilinear(&loc.hess, &e[1], &e[1]) / loc.a;
    let h12 = s * bilinear(&loc.hess, &e[0], &e[1]) / loc.a;
    let h = loc.mean_curvature();
    let h_sq = h11 * h11 + h22 * h22 + 2.0 * h12 * h12;
    let tracefree_sq = 0.5 * (h11 - h22).powi(2) + 2.0 * h12 * h12;
    let ric_nn = bilinear(&bundle.ricci, &loc.n, &loc.n);
    let r_sigma = bundle.scalar - 2.0 * ric_nn + h * h - h_sq;

    let drho = loc.grad_rho();
    let t_rho = [0, 1].map(|a| (0..3).map(|k| e[a][k] * drho[k]).sum::<f64>());
    let n_rho: f64 = (0..3).map(|k| loc.n[k] * drho[k]).sum();

    // Stencil: gradients of H and of ∇ρ.
    let mut dh = [0.0; 3];
    let mut ddrho = [[0.0; 3]; 3];
    for c in 0..3 {
        let hc = step(c, x[c]);
        for &(off, w) in &D1 {
            let mut y = *x;
            y[c] += off * hc;
            let l = Local::at(st, &y)?;
            dh[c] += w * l.mean_curvature() / hc;
            let gr = l.grad_rho();
            for k in 0..3 {
                ddrho[c][k] += w * gr[k] / hc;
            }
        }
    }
    let sym: Mat<f64, 3> = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (ddrho[i][j] + ddrho[j][i])));
    let hess_rho = covariant_hessian(&drho, &sym, &loc.gamma);

    // Δ_σ f = tr_σ ∇²f − H ν(f), with ν = s n; f = F(ρ) by the chain rule.
    let leaf_laplacian = |f1: f64, f2: f64| {
        let mut tr = 0.0;
        for ea in &e {
            tr += f1 * bilinear(&hess_rho, ea, ea) + f2 * (0..3).map(|k| ea[k] * drho[k]).sum::<f64>().powi(2);
        }
        tr - h * s * f1 * n_rho
    };
    let sr = rho.sqrt();
    let lap_sqrt_rho = leaf_laplacian(0.5 / sr, -0.25 / (rho * sr));
    let lap_ln_rho = leaf_laplacian(1.0 / rho, -1.0 / (rho * rho));

    let orthogonality_defect = e.iter().map(|ea| loc.dot(ea, &loc.n).abs()).fold(0.0, f64::max);
    Ok(NodeData {
        at: *x,
        n: st.lapse(x),
        rho,
        h,
        h_n: rho * (0..3).map(|k| loc.n[k] * dh[k]).sum::<f64>(),
        rho_n: rho * n_rho,
        lap_sqrt_rho,
        lap_ln_rho,
        grad_rho_sq: t_rho[0] * t_rho[0] + t_rho[1] * t_rho[1],
        tracefree_sq,
        r_sigma,
        nu_n: s * loc.a,
        orthogonality_defect,
        trace_defect: (h - h11 - h22).abs(),
    })
}

/// Residuals of the three exact identities at a node, for global sign λ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `(λ/ρ)(H/N − H,_N − (λρ/2)H²) − (2/√ρ)Δ_σ√ρ − ½[…]`
    pub first: f64,
    /// `(λ/ρ)(3H/N − H,_N) − R_σ − Δ_σ ln ρ − […]`
    pub second: f64,
    /// `ρ,_N − λρ²H`
    pub third: f64,
}

pub fn identity_residuals(d: &NodeData, lambda: f64) -> IdentityResiduals {
    let b = d.bracket();
    IdentityResiduals {
        first: lambda / d.rho * (d.h / d.n - d.h_n - 0.5 * lambda * d.rho * d.h * d.h)
            - 2.0 / d.rho.sqrt() * d.lap_sqrt_rho
            - 0.5 * b,
        second: lambda / d.rho * (3.0 * d.h / d.n - d.h_n) - d.r_sigma - d.lap_ln_rho - b,
        third: d.rho_n - lambda * d.rho * d.rho * d.h,
    }
}

/// Pointwise slacks RHS − LHS of the two differential inequalities, divided by √𝔰.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PointSlacks {
    /// `−2Δ_σ√ρ/N − 𝔰^{-1/2} ∂_N(λ√𝔰 H/(√ρ N))`
    pub first: f64,
    /// `−N(Δ_σ ln ρ + R_σ) − 𝔰^{-1/2} ∂_N(√𝔰 ρ^{-1}[HN + 4λ/ρ])`
    pub second: f64,
}

/// Uses `(√𝔰),_N = λ√𝔰 Hρ`; the remaining N-derivatives are the node's own.
pub fn point_slacks(d: &NodeData, lambda: f64) -> PointSlacks {
    let (n, rho, h) = (d.n, d.rho, d.h);
    let sr = rho.sqrt();
    let area_rate = lambda * h * rho;
    let lhs1 = lambda
        * (area_rate * h / (sr * n) + d.h_n / (sr * n) - 0.5 * h * d.rho_n / (rho * sr * n) - h / (sr * n * n));
    let rhs1 = -2.0 * d.lap_sqrt_rho / n;
    let bracket = h * n + 4.0 * lambda / rho;
    let lhs2 = area_rate * bracket / rho - d.rho_n / (rho * rho) * bracket
        + (d.h_n * n + h - 4.0 * lambda * d.rho_n / (rho * rho)) / rho;
    let rhs2 = -n * (d.lap_ln_rho + d.r_sigma);
    PointSlacks {
        first: rhs1 - lhs1,
        second: rhs2 - lhs2,
    }
}
