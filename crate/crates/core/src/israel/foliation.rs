//! Lapse level sets as graphs over the round sphere, with leaf quadrature.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::node::{identity_residuals, node_data, point_slacks, NodeData};
use super::quadrature::{cheb_diff, clenshaw_curtis, lobatto_nodes, SphereRule};
use crate::autodiff::Dual;
use crate::error::{GeomError, Result};
use crate::linalg::quad_form;
use crate::spacetimes::StaticSpacetime;

/// Leaf-weighted mean and standard deviation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LeafStat {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl LeafStat {
    fn from(values: impl Iterator<Item = (f64, f64)> + Clone, area: f64) -> Self {
        let mean = values.clone().map(|(v, w)| v * w).sum::<f64>() / area;
        let var = values.clone().map(|(v, w)| (v - mean).powi(2) * w).sum::<f64>() / area;
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(v), hi.max(v)));
        Self {
            mean,
            std: var.max(0.0).sqrt(),
            min,
            max,
        }
    }
}

/// Radius along the ray (θ, φ) where the lapse equals `level`.
pub fn leaf_radius(st: &StaticSpacetime, level: f64, theta: f64, phi: f64, guess: f64) -> Result<f64> {
    let f = |r: f64| {
        let x = [Dual::<1>::var(r, 0), Dual::constant(theta), Dual::constant(phi)];
        let n = st.lapse(&x);
        (n.val - level, n.grad[0])
    };
    let floor = st.profile.r_floor() * (1.0 + 1e-12);
    let (_, hi_dom) = st.profile.domain();
    let mut lo = guess.max(floor);
    let mut hi = lo;
    let mut flo = f(lo).0;
    let mut fhi = flo;
    // Expand geometrically until the level is bracketed.
    let mut k = 0;
    while flo.signum() == fhi.signum() && flo != 0.0 {
        k += 1;
        if k > 400 {
            return Err(GeomError::Foliation(format!(
                "level N = {level} not attained along θ = {theta:.4}, φ = {phi:.4}"
            )));
        }
        lo = (lo / 1.05).max(floor);
        hi = (hi * 1.05).min(hi_dom);
        flo = f(lo).0;
        fhi = f(hi).0;
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    // Safeguarded Newton on the bracket.
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = f(r);
        if v == 0.0 {
            return Ok(r);
        }
        if v.signum() == flo.signum() {
            lo = r;
        } else {
            hi = r;
        }
        let newton = r - v / d;
        let next = if d != 0.0 && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - r).abs() <= 4.0 * f64::EPSILON * r {
            return Ok(next);
        }
        r = next;
    }
    Ok(r)
}

/// One leaf `{N = level}` sampled on a sphere rule.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSetGeometry {
    pub n_value: f64,
    pub area: f64,
    pub area_radius: f64,
    pub rho: LeafStat,
    pub mean_curvature: LeafStat,
    pub nu_n: LeafStat,
    /// Sup of |h̊| over the nodes.
    pub tracefree_sup: f64,
    /// `(1/4π) ∮ ν(N) dμ`.
    pub mass_flux: f64,
    /// `∮ K dμ` with K = R_σ/2.
    pub gauss_bonnet: f64,
    pub gauss_curvature: LeafStat,
    /// `∮ λHρ dμ`, the N-rate of the area.
    pub area_rate: f64,
    /// Relative mismatch of `area_rate` with the spectral derivative of the area across levels.
    pub area_rate_residual: f64,
    pub orthogonality_defect: f64,
    pub trace_defect: f64,
    /// Nodes whose ν(N) sign differs from the leaf majority.
    pub sign_flips: usize,
    #[serde(skip)]
    pub nodes: Vec<NodeData>,
    /// Area element dμ per node.
    #[serde(skip)]
    pub weights: Vec<f64>,
}

impl LevelSetGeometry {
    pub fn integrate(&self, f: impl Fn(&NodeData) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(d, w)| f(d) * w).sum()
    }

    pub fn lambda(&self) -> f64 {
        self.nu_n.mean.signum()
    }

    /// Sup over nodes of the three identity residuals, in units of |m|.
    pub fn identity_sups(&self, lambda: f64, m: f64) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        for d in &self.nodes {
            let r = identity_residuals(d, lambda);
            out[0] = out[0].max(r.first.abs() * m * m);
            out[1] = out[1].max(r.second.abs() * m * m);
            out[2] = out[2].max(r.third.abs() / m);
        }
        out
    }

    /// Minimum over nodes of the two pointwise slacks, in units of |m|.
    pub fn slack_mins(&self, lambda: f64, m: f64) -> [f64; 2] {
        let mut out = [f64::INFINITY; 2];
        for d in &self.nodes {
            let s = point_slacks(d, lambda);
            out[0] = out[0].min(s.first * m.powf(1.5));
            out[1] = out[1].min(s.second * m * m);
        }
        out
    }

    pub fn slack_sups(&self, lambda: f64, m: f64) -> [f64; 2] {
        let mut out = [0.0f64; 2];
        for d in &self.nodes {
            let s = point_slacks(d, lambda);
            out[0] = out[0].max(s.first.abs() * m.powf(1.5));
            out[1] = out[1].max(s.second.abs() * m * m);
        }
        out
    }

    pub fn bracket_min(&self) -> f64 {
        self.nodes.iter().map(NodeData::bracket).fold(f64::INFINITY, f64::min)
    }
}

/// Initial radius for a level, from the unperturbed radial profile.
fn radial_guess(st: &StaticSpacetime, level: f64) -> Result<f64> {
    leaf_radius(
        &StaticSpacetime::new(st.profile.clone()),
        level,
        0.5 * PI,
        0.0,
        3.0 * st.length_scale().max(st.profile.r_floor()),
    )
    .or_else(|_| leaf_radius(st, level, 0.5 * PI, 0.0, 3.0 * st.length_scale()))
}

/// Leaf point on the ray (θ, φ) and its area element per dθ dφ.
fn leaf_point(st: &StaticSpacetime, level: f64, theta: f64, phi: f64, guess: f64) -> Result<([f64; 3], f64)> {
    let r = leaf_radius(st, level, theta, phi, guess)?;
    let x = [r, theta, phi];
    let xd = Dual::<3>::seed(&x);
    let n = st.lapse(&xd);
    if n.grad[0] == 0.0 {
        return Err(GeomError::Foliation(format!(
            "leaf N = {level} is not a graph over the sphere at θ = {theta:.4}"
        )));
    }
    let g = st.spatial_metric(&x);
    // Graph tangents X_a = ∂_a + (∂_a R) ∂_r with ∂_a R = −∂_a N / ∂_r N.
    let xa = [1, 2].map(|a| {
        let mut v = [0.0; 3];
        v[a] = 1.0;
        v[0] = -n.grad[a] / n.grad[0];
        v
    });
    let s11 = quad_form(&g, &xa[0], &xa[0]);
    let s22 = quad_form(&g, &xa[1], &xa[1]);
    let s12 = quad_form(&g, &xa[0], &xa[1]);
    Ok((x, (s11 * s22 - s12 * s12).max(0.0).sqrt()))
}

/// Mass flux alone, without the stencil work; used for order-doubling checks.
pub fn mass_flux(st: &StaticSpacetime, level: f64, rule: &SphereRule) -> Result<f64> {
    let mut guess = radial_guess(st, level)?;
    let mut total = 0.0;
    for k in 0..rule.len() {
        let (th, ph, w) = rule.node(k);
        let (x, da) = leaf_point(st, level, th, ph, guess)?;
        guess = x[0];
        let xd = Dual::<3>::seed(&x);
        let grad = st.lapse(&xd).grad;
        let ginv = crate::linalg::inverse(&st.spatial_metric(&x))?;
        let a = quad_form(&ginv, &grad, &grad).sqrt();
        let up0: f64 = (0..3).map(|j| ginv[0][j] * grad[j]).sum();
        total += up0.signum() * a * da * w;
    }
    Ok(total / (4.0 * PI))
}

pub fn build_level(st: &StaticSpacetime, level: f64, rule: &SphereRule) -> Result<LevelSetGeometry> {
    let mut guess = radial_guess(st, level)?;
    let mut nodes = Vec::with_capacity(rule.len());
    let mut weights = Vec::with_capacity(rule.len());
    for k in 0..rule.len() {
        let (th, ph, w) = rule.node(k);
        let (x, da) = leaf_point(st, level, th, ph, guess)?;
        guess = x[0];
        nodes.push(node_data(st, &x)?);
        weights.push(da * w);
    }
    Ok(summarize(level, nodes, weights))
}

/// Aggregate node data into leaf statistics.
pub fn summarize(level: f64, nodes: Vec<NodeData>, weights: Vec<f64>) -> LevelSetGeometry {
    let area: f64 = weights.iter().sum();
    let pairs = |f: fn(&NodeData) -> f64| nodes.iter().map(f).zip(weights.iter().copied()).collect::<Vec<_>>();
    let stat = |f: fn(&NodeData) -> f64| {
        let p = pairs(f);
        LeafStat::from(p.iter().copied(), area)
    };
    let nu = stat(|d| d.nu_n);
    let lam = nu.mean.signum();
    let integral = |f: &dyn Fn(&NodeData) -> f64| nodes.iter().zip(&weights).map(|(d, w)| f(d) * w).sum::<f64>();
    let mass_flux = integral(&|d| d.nu_n) / (4.0 * PI);
    let gauss_bonnet = integral(&|d| 0.5 * d.r_sigma);
    let area_rate = integral(&|d| lam * d.h * d.rho);
    LevelSetGeometry {
        n_value: level,
        area,
        area_radius: (area / (4.0 * PI)).sqrt(),
        rho: stat(|d| d.rho),
        mean_curvature: stat(|d| d.h),
        nu_n: nu,
        tracefree_sup: nodes.iter().map(|d| d.tracefree_sq.sqrt()).fold(0.0, f64::max),
        mass_flux,
        gauss_bonnet,
        gauss_curvature: stat(|d| 0.5 * d.r_sigma),
        area_rate,
        area_rate_residual: f64::NAN,
        orthogonality_defect: nodes.iter().map(|d| d.orthogonality_defect).fold(0.0, f64::max),
        trace_defect: nodes.iter().map(|d| d.trace_defect).fold(0.0, f64::max),
        sign_flips: nodes.iter().filter(|d| d.nu_n.signum() != lam).count(),
        nodes,
        weights,
    }
}

/// Level placement: Chebyshev–Lobatto in `w = −ln|1 − N|`, which spreads
/// levels evenly in log-radius far out.
#[derive(Clone, Debug, Serialize)]
pub struct LevelGrid {
    pub w: Vec<f64>,
    pub n: Vec<f64>,
    /// Clenshaw–Curtis weights in w.
    pub weights: Vec<f64>,
}

impl LevelGrid {
    pub fn new(n0: f64, n_outer: f64, levels: usize) -> Result<Self> {
        if levels < 5 {
            return Err(GeomError::Rejected(format!(
                "{levels} levels cannot support a transverse derivative stencil; need at least 5"
            )));
        }
        if n0 == 1.0 || n_outer == 1.0 || (1.0 - n0).signum() != (1.0 - n_outer).signum() {
            return Err(GeomError::Rejected(format!(
                "levels N₀ = {n0}, N_outer = {n_outer} must lie on the same side of 1"
            )));
        }
        let side = (1.0 - n0).signum();
        let (a, b) = (-(1.0 - n0).abs().ln(), -(1.0 - n_outer).abs().ln());
        if !(b > a) {
            return Err(GeomError::Rejected(format!(
                "outer level N = {n_outer} must be closer to 1 than N₀ = {n0}"
            )));
        }
        let k = levels - 1;
        let w = lobatto_nodes(k, a, b);
        let mut n: Vec<f64> = w.iter().map(|w| 1.0 - side * (-w).exp()).collect();
        // Endpoints exactly as requested.
        n[0] = n0;
        n[k] = n_outer;
        Ok(Self {
            weights: clenshaw_curtis(k, a, b),
            w,
            n,
        })
    }

    /// `∫ f dN` over the grid from per-level values, with `dN = (1 − N) dw`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.weights)
            .zip(&self.n)
            .map(|((v, w), n)| v * w * (1.0 - n))
            .sum()
    }

    /// Spectral `d/dN` of per-level values.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        let k = self.w.len() - 1;
        let d = cheb_diff(k, self.w[0], self.w[k]);
        (0..=k)
            .map(|i| (0..=k).map(|j| d[i][j] * values[j]).sum::<f64>() / (1.0 - self.n[i]))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Foliation {
    pub grid: LevelGrid,
    pub levels: Vec<LevelSetGeometry>,
    pub n_theta: usize,
    pub n_phi: usize,
}

/// Build every level in parallel; the area-rate cross-check is a sequential pass.
pub fn build_foliation(
    st: &StaticSpacetime,
    n0: f64,
    n_outer: f64,
    levels: usize,
    quad: (usize, usize),
) -> Result<Foliation> {
    let grid = LevelGrid::new(n0, n_outer, levels)?;
    let rule = SphereRule::new(quad.0, quad.1);
    let built: Vec<Result<LevelSetGeometry>> = grid.n.par_iter().map(|&c| build_level(st, c, &rule)).collect();
    let mut out = Vec::with_capacity(built.len());
    for b in built {
        out.push(b?);
    }
    // Areas grow like e^{2w}; differentiate ln|Σ| for a well-scaled spectral derivative.
    let ln_area: Vec<f64> = out.iter().map(|l| l.area.ln()).collect();
    let d = grid.derivative(&ln_area);
    for (l, dl) in out.iter_mut().zip(d) {
        let spectral = dl * l.area;
        l.area_rate_residual = (spectral - l.area_rate).abs() / l.area_rate.abs();
    }
    Ok(Foliation {
        grid,
        levels: out,
        n_theta: quad.0,
        n_phi: quad.1,
    })
}
