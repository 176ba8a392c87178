//! Null geodesics of static spacetimes, conserved quantities and the
//! tangency test for candidate photon surfaces.
//!
//! The state is (t, r, θ, φ, v^r, v^θ, v^φ). The time velocity is not integrated:
//! at every right-hand-side evaluation it is recomputed from the spatial velocity
//! by solving the null condition, ṫ = ±|v|_g / N. The conserved quantity N²ṫ is
//! therefore an independent check on the integration, not an imposed constraint.

mod dopri5;

pub use dopri5::{integrate, Outcome, Stop, StepControl};

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autodiff::Dual;
use crate::error::{GeomError, Result};
use crate::hypersurfaces::{Hypersurface, SurfaceKind};
use crate::linalg::inverse;
use crate::spacetimes::{ChartPoint, StaticSpacetime};

/// Point and tangent of a geodesic. `velocity` holds (ṫ, ṙ, θ̇, φ̇).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub position: ChartPoint,
    pub velocity: [f64; 4],
    pub affine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason", rename_all = "snake_case")]
pub enum IntegrationStatus {
    Completed,
    /// Stopped near a boundary of the chart or the metric's domain.
    DomainExit(String),
    /// Step size collapsed.
    Singular(String),
    MaxSteps,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicTrajectory {
    pub samples: Vec<GeodesicState>,
    /// E = g(γ̇, N⁻¹∂_t) per sample.
    pub energies: Vec<f64>,
    /// g(γ̇, γ̇) per sample, evaluated with the full 4-metric.
    pub null_residuals: Vec<f64>,
    /// N per sample.
    pub lapses: Vec<f64>,
    /// g(γ̇, ∂_φ) per sample.
    pub angular_momenta: Vec<f64>,
    /// N²ṫ at the first sample; ṫ = C N⁻² along the curve.
    pub c_estimate: f64,
    pub status: IntegrationStatus,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Energy measured by the static observer N⁻¹∂_t; with ħ = 1 the frequency equals it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedEnergy {
    pub energy: f64,
    pub frequency: f64,
}

pub fn observed_energy(state: &GeodesicState, spacetime: &StaticSpacetime) -> Result<ObservedEnergy> {
    let x = state.position.spatial();
    spacetime.check_spatial(&x)?;
    let n = spacetime.lapse(&x);
    // g(γ̇, N⁻¹∂_t) = g_tt ṫ / N = −N ṫ
    let energy = -n * state.velocity[0];
    Ok(ObservedEnergy { energy, frequency: energy })
}

fn dot4(g: &[[f64; 4]; 4], u: &[f64; 4], v: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += g[i][j] * u[i] * v[j];
        }
    }
    s
}

/// Spatial metric, its inverse, first derivatives, and the lapse with its gradient.
struct LocalGeometry {
    g: [[f64; 3]; 3],
    ginv: [[f64; 3]; 3],
    /// dg[k][i][j] = ∂_k g_ij
    dg: [[[f64; 3]; 3]; 3],
    n: f64,
    dn: [f64; 3],
}

fn local_geometry(st: &StaticSpacetime, x: &[f64; 3]) -> Result<LocalGeometry> {
    st.check_spatial(x)?;
    let seed = Dual::<3>::seed(x);
    let gm = st.spatial_metric(&seed);
    let nl = st.lapse(&seed);
    let g: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| gm[i][j].val));
    let dg = std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| gm[i][j].grad[k])));
    let ginv = inverse(&g)?;
    Ok(LocalGeometry { g, ginv, dg, n: nl.val, dn: nl.grad })
}

fn spatial_norm2(g: &[[f64; 3]; 3], v: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += g[i][j] * v[i] * v[j];
        }
    }
    s
}

/// Right-hand side of the reduced geodesic system; `sigma` is the sign of ṫ.
fn rhs(st: &StaticSpacetime, sigma: f64, y: &[f64; 7]) -> Result<[f64; 7]> {
    let x = [y[1], y[2], y[3]];
    let v = [y[4], y[5], y[6]];
    let lg = local_geometry(st, &x)?;
    let vt = sigma * spatial_norm2(&lg.g, &v).sqrt() / lg.n;
    let mut out = [0.0; 7];
    out[0] = vt;
    out[1] = v[0];
    out[2] = v[1];
    out[3] = v[2];
    // Γ^i_jk = ½ g^il (∂_j g_lk + ∂_k g_lj − ∂_l g_jk),  Γ^i_tt = N g^il ∂_l N
    for i in 0..3 {
        let mut a = 0.0;
        for l in 0..3 {
            let mut q = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    q += (lg.dg[j][l][k] + lg.dg[k][l][j] - lg.dg[l][j][k]) * v[j] * v[k];
                }
            }
            a -= lg.ginv[i][l] * (0.5 * q + lg.n * lg.dn[l] * vt * vt);
        }
        out[4 + i] = a;
    }
    Ok(out)
}

/// Integrator options for null geodesics.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TraceOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Stop when r falls within this relative margin of the metric's inner edge.
    pub floor_margin: f64,
    /// Stop when θ comes this close to a pole.
    pub pole_margin: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 2_000_000,
            floor_margin: 1e-6,
            pole_margin: 1e-8,
        }
    }
}

impl TraceOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Default::default() }
    }
}

/// Make a tangent vector null by re-solving for ṫ, keeping its sign and the spatial part.
pub fn null_project(st: &StaticSpacetime, p: &ChartPoint, v: &[f64; 4]) -> Result<[f64; 4]> {
    let x = p.spatial();
    let lg = local_geometry(st, &x)?;
    if v[0] == 0.0 {
        return Err(GeomError::Rejected("time component of a null vector must be non-zero".into()));
    }
    let s = spatial_norm2(&lg.g, &[v[1], v[2], v[3]]).sqrt();
    if s == 0.0 {
        return Err(GeomError::Rejected("null vector needs a non-zero spatial part".into()));
    }
    Ok([v[0].signum() * s / lg.n, v[1], v[2], v[3]])
}

fn state_of(st: &StaticSpacetime, sigma: f64, lambda: f64, y: &[f64; 7]) -> Result<GeodesicState> {
    let position = ChartPoint::new(y[0], y[1], y[2], y[3])?;
    let lg = local_geometry(st, &position.spatial())?;
    let vt = sigma * spatial_norm2(&lg.g, &[y[4], y[5], y[6]]).sqrt() / lg.n;
    Ok(GeodesicState { position, velocity: [vt, y[4], y[5], y[6]], affine: lambda })
}

/// Integrate the null geodesic through `initial` up to affine parameter `end`
/// (which may lie before the initial parameter).
pub fn integrate_null(
    spacetime: &StaticSpacetime,
    initial: &GeodesicState,
    end: f64,
    opts: &TraceOptions,
) -> Result<GeodesicTrajectory> {
    let v0 = null_project(spacetime, &initial.position, &initial.velocity)?;
    let sigma = v0[0].signum();
    let p = initial.position;
    let y0 = [p.t, p.r, p.theta, p.phi, v0[1], v0[2], v0[3]];
    let floor = spacetime.profile.r_floor();
    let r_edge = if floor > 0.0 { floor * (1.0 + opts.floor_margin) } else { 0.0 };
    let (_, r_hi) = spacetime.profile.domain();
    let pole = opts.pole_margin;

    let mut samples = Vec::new();
    let mut observe = |lambda: f64, y: &[f64; 7]| -> Option<String> {
        match state_of(spacetime, sigma, lambda, y) {
            Ok(s) => samples.push(s),
            Err(e) => return Some(e.to_string()),
        }
        if y[1] <= r_edge {
            return Some(format!("r = {} reached the inner edge {floor}", y[1]));
        }
        if y[1] >= r_hi {
            return Some(format!("r = {} left the profile domain", y[1]));
        }
        if y[2] <= pole || y[2] >= std::f64::consts::PI - pole {
            return Some(format!("theta = {} reached a coordinate pole", y[2]));
        }
        None
    };
    let mut f = |_: f64, y: &[f64; 7]| rhs(spacetime, sigma, y);
    let ctl = StepControl {
        rtol: opts.rtol,
        atol: opts.atol,
        max_steps: opts.max_steps,
        ..Default::default()
    };
    let out = integrate(&mut f, initial.affine, y0, end, &ctl, &mut observe)?;
    let status = match out.stop {
        Stop::Completed => IntegrationStatus::Completed,
        Stop::Observer(r) => IntegrationStatus::DomainExit(r),
        Stop::Underflow(r) => IntegrationStatus::Singular(r),
        Stop::MaxSteps => IntegrationStatus::MaxSteps,
    };
    let mut energies = Vec::with_capacity(samples.len());
    let mut null_residuals = Vec::with_capacity(samples.len());
    let mut lapses = Vec::with_capacity(samples.len());
    let mut angular_momenta = Vec::with_capacity(samples.len());
    for s in &samples {
        let c = s.position.coords();
        let g = spacetime.metric4(&c);
        let n = spacetime.lapse(&s.position.spatial());
        energies.push(observed_energy(s, spacetime)?.energy);
        null_residuals.push(dot4(&g, &s.velocity, &s.velocity));
        lapses.push(n);
        angular_momenta.push(g[3][3] * s.velocity[3]);
    }
    let c_estimate = samples.first().map_or(0.0, |s| lapses[0] * lapses[0] * s.velocity[0]);
    Ok(GeodesicTrajectory {
        samples,
        energies,
        null_residuals,
        lapses,
        angular_momenta,
        c_estimate,
        status,
        accepted_steps: out.accepted,
        rejected_steps: out.rejected,
    })
}

impl GeodesicTrajectory {
    /// max |E N − (E N)(0)|, the drift of −C.
    pub fn energy_lapse_drift(&self) -> f64 {
        let en: Vec<f64> = self.energies.iter().zip(&self.lapses).map(|(e, n)| e * n).collect();
        en.iter().map(|v| (v - en[0]).abs()).fold(0.0, f64::max)
    }

    pub fn angular_momentum_drift(&self) -> f64 {
        let l0 = self.angular_momenta.first().copied().unwrap_or(0.0);
        self.angular_momenta.iter().map(|l| (l - l0).abs()).fold(0.0, f64::max)
    }

    pub fn max_null_residual(&self) -> f64 {
        self.null_residuals.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&GeodesicState> {
        self.samples.last()
    }

    /// CSV with one row per accepted step, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,t,r,theta,phi,vt,vr,vtheta,vphi,null_residual,energy\n");
        for (i, st) in self.samples.iter().enumerate() {
            let p = st.position;
            let row = [
                st.affine,
                p.t,
                p.r,
                p.theta,
                p.phi,
                st.velocity[0],
                st.velocity[1],
                st.velocity[2],
                st.velocity[3],
                self.null_residuals[i],
                self.energies[i],
            ];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())
            .map_err(|e| GeomError::Rejected(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyVerdict {
    pub constant: bool,
    /// max |E − mean E|
    pub max_drift: f64,
    /// max |N − mean N|
    pub lapse_variation: f64,
    /// Whether the lapse-constancy test agrees with the energy test.
    pub agrees_with_lapse: bool,
}

/// E is declared constant iff max|E − mean E| < 10 tol; the same threshold applied to N
/// must give the same answer.
pub fn energy_constancy_verdict(trajectory: &GeodesicTrajectory, tol_null: f64) -> EnergyVerdict {
    let spread = |xs: &[f64]| {
        if xs.is_empty() {
            return 0.0;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
    };
    let max_drift = spread(&trajectory.energies);
    let lapse_variation = spread(&trajectory.lapses);
    let constant = max_drift < 10.0 * tol_null;
    EnergyVerdict {
        constant,
        max_drift,
        lapse_variation,
        agrees_with_lapse: constant == (lapse_variation < 10.0 * tol_null),
    }
}

/// Null directions tangent to a static timelike cylinder: base points with polar angle
/// drawn from `rng_seed`, directions N⁻¹∂_t + cos α e₁ + sin α e₂ on a uniform α grid.
pub fn tangent_null_seeds(surface: &Hypersurface, count: usize, rng_seed: u64) -> Result<Vec<GeodesicState>> {
    if !matches!(surface.kind, SurfaceKind::Cylinder | SurfaceKind::LapseCylinder) {
        return Err(GeomError::Rejected(format!(
            "tangent null seeds need a static cylinder, got {}",
            surface.label()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let r_guess = match surface.kind {
        SurfaceKind::Cylinder => surface.parameter,
        _ => guess_radius(surface)?,
    };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let theta = rng.gen_range(0.3..std::f64::consts::PI - 0.3);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = surface.project(&ChartPoint::new(0.0, r_guess, theta, phi)?)?;
        let p = ChartPoint::new(q[0], q[1], q[2], q[3])?;
        let e = surface.orthonormal_tangents(&p)?;
        let alpha = std::f64::consts::TAU * (k as f64 + 0.5) / count as f64;
        let (s, c) = alpha.sin_cos();
        let v: [f64; 4] = std::array::from_fn(|i| e[0][i] + c * e[1][i] + s * e[2][i]);
        // orient the frame's timelike leg to the future
        let v = if e[0][0] < 0.0 { [-v[0], v[1], v[2], v[3]] } else { v };
        out.push(GeodesicState { position: p, velocity: v, affine: 0.0 });
    }
    Ok(out)
}

/// Radius where the lapse reaches the level of a lapse cylinder, along the equator.
fn guess_radius(surface: &Hypersurface) -> Result<f64> {
    let st = surface.spacetime;
    let n0 = surface.parameter;
    let (lo, hi) = st.profile.domain();
    let lo = lo.max(st.profile.r_floor() * (1.0 + 1e-6)).max(1e-9);
    let hi = hi.min(1e9);
    let f = |r: f64| st.lapse(&[r, std::f64::consts::FRAC_PI_2, 0.0]) - n0;
    let (mut a, mut b) = (lo, hi);
    if !(f(a) < 0.0 && f(b) > 0.0) {
        return Err(GeomError::Rejected(format!("lapse level {n0} not bracketed on the equator")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub deviation: f64,
    pub final_affine: f64,
    pub status: IntegrationStatus,
    pub energy_lapse_drift: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangencyReport {
    /// sup over seeds and samples of the distance from the surface
    pub max_deviation: f64,
    pub span: f64,
    pub seeds: Vec<SeedOutcome>,
}

/// Distance of a chart point from a static cylinder: |r − r₀| or |N − N₀|.
pub fn surface_distance(surface: &Hypersurface, p: &ChartPoint) -> Result<f64> {
    match surface.kind {
        SurfaceKind::Cylinder => Ok((p.r - surface.parameter).abs()),
        SurfaceKind::LapseCylinder => Ok((surface.spacetime.lapse(&p.spatial()) - surface.parameter).abs()),
        _ => Err(GeomError::Rejected(format!(
            "tangency persistence is defined for static cylinders, got {}",
            surface.label()
        ))),
    }
}

/// Integrate every seed over [0, span] and report how far the geodesics leave the surface.
/// Seeds run in parallel; results are ordered by seed index. A seed that stops early
/// contributes the deviation it reached.
pub fn tangency_persistence(
    surface: &Hypersurface,
    seeds: &[GeodesicState],
    span: f64,
    opts: &TraceOptions,
) -> Result<TangencyReport> {
    let st = surface.spacetime;
    let outcomes: Vec<Result<SeedOutcome>> = seeds
        .par_iter()
        .map(|seed| {
            let traj = integrate_null(st, seed, seed.affine + span, opts)?;
            let mut dev: f64 = 0.0;
            for s in &traj.samples {
                dev = dev.max(surface_distance(surface, &s.position)?);
            }
            Ok(SeedOutcome {
                deviation: dev,
                final_affine: traj.last().map_or(seed.affine, |s| s.affine),
                status: traj.status.clone(),
                energy_lapse_drift: traj.energy_lapse_drift(),
            })
        })
        .collect();
    let seeds = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let max_deviation = seeds.iter().map(|s| s.deviation).fold(0.0, f64::max);
    Ok(TangencyReport { max_deviation, span, seeds })
}

#[cfg(test)]
mod tests;
