//! Rigidity ODE `u″ = −2u′/r` for `u = N²`, and the lapse it reconstructs.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geodesics::{integrate, Stop, StepControl};

/// Numerical solution of `u″ = −2u′/r` sampled on a geometric grid.
#[derive(Clone, Debug, Serialize)]
pub struct UOdeSolution {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `∫ρH dN` from r₀, in the radial variable.
    pub h_integral: Vec<f64>,
    /// Least-squares fit `u = A + B/r` over the samples.
    pub a: f64,
    pub b: f64,
    /// Max over samples of |A + B/r − u|.
    pub fit_residual: f64,
}

const SAMPLES: usize = 400;

fn ctl() -> StepControl {
    StepControl {
        rtol: 1e-13,
        atol: 1e-15,
        h_init: 1e-3,
        ..StepControl::default()
    }
}

/// Integrate from `(r₀, u₀, u′₀)` to `r_end`. With `mass` given, also accumulates
/// `∫ρH dN` using `ρ = r²/|m|` and `H = 2m/(r³N′)`.
pub fn solve_u_ode(r0: f64, u0: f64, du0: f64, r_end: f64, mass: Option<f64>) -> Result<UOdeSolution> {
    if !(r0 > 0.0 && r_end > r0) {
        return Err(GeomError::Rejected(format!("need 0 < r₀ < r_end, got {r0}, {r_end}")));
    }
    let mut rhs = |r: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        let q = match mass {
            Some(m) if y[1] != 0.0 && y[0] > 0.0 => {
                let dn = y[1] / (2.0 * y[0].sqrt());
                let rho = r * r / m.abs();
                let h = 2.0 * m / (r * r * r * dn);
                rho * h * dn
            }
            _ => 0.0,
        };
        Ok([y[1], -2.0 * y[1] / r, q])
    };
    let ratio = (r_end / r0).powf(1.0 / (SAMPLES - 1) as f64);
    let mut r = vec![r0];
    let mut u = vec![u0];
    let mut du = vec![du0];
    let mut hi = vec![0.0];
    let mut y = [u0, du0, 0.0];
    let mut t = r0;
    for k in 1..SAMPLES {
        let t1 = if k == SAMPLES - 1 { r_end } else { r0 * ratio.powi(k as i32) };
        let out = integrate(&mut rhs, t, y, t1, &ctl(), &mut |_, _| None)?;
        if out.stop != Stop::Completed {
            return Err(GeomError::Integration(format!("u-ODE stopped at r = {}: {:?}", out.t, out.stop)));
        }
        t = t1;
        y = out.y;
        r.push(t);
        u.push(y[0]);
        du.push(y[1]);
        hi.push(y[2]);
    }
    let (a, b) = fit_inverse(&r, &u);
    let fit_residual = r
        .iter()
        .zip(&u)
        .map(|(r, u)| (a + b / r - u).abs())
        .fold(0.0, f64::max);
    Ok(UOdeSolution {
        r,
        u,
        du,
        h_integral: hi,
        a,
        b,
        fit_residual,
    })
}

/// Least squares for `u ≈ A + B x` with `x = 1/r`.
fn fit_inverse(r: &[f64], u: &[f64]) -> (f64, f64) {
    let n = r.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (r, u) in r.iter().zip(u) {
        let x = 1.0 / r;
        sx += x;
        sy += u;
        sxx += x * x;
        sxy += x * u;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < f64::MIN_POSITIVE {
        return (sy / n, 0.0);
    }
    ((sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LapseSample {
    pub r: f64,
    pub n: f64,
    pub n_schwarzschild: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanCurvatureSample {
    pub r: f64,
    pub n: f64,
    /// `2m/(r³N′)`.
    pub direct: f64,
    /// `(H₀/N₀) N exp(−(λ/2)∫ρH dN)`.
    pub integrated: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionResult {
    pub a_ode: f64,
    pub b_ode: f64,
    /// From the initial data: `A = u₀ + r₀u′₀`, `B = −r₀²u′₀`.
    pub a_closed: f64,
    pub b_closed: f64,
    /// B when A = 1 is imposed: `−r₀(1 − N₀²)`.
    pub b_asymptotic: f64,
    pub mass_from_b: f64,
    pub fit_residual: f64,
    /// `sup |N_rec − √(1 − 2m/r)|` on the sample grid.
    pub sup_deviation: f64,
    /// Max relative gap between the two mean-curvature routes.
    pub mean_curvature_residual: f64,
    pub r_end: f64,
    pub profile: Vec<LapseSample>,
    pub mean_curvature: Vec<MeanCurvatureSample>,
}

/// Reconstruct N(r) from the boundary values; `h0` defaults to 2N₀/r₀.
pub fn reconstruct_lapse(m: f64, n0: f64, r0: f64, h0: Option<f64>) -> Result<ReconstructionResult> {
    if !(n0 > 0.0 && n0 < 1.0) {
        return Err(GeomError::Rejected(format!(
            "N₀ = {n0} outside (0, 1): the lapse of a static vacuum exterior takes values in [N₀, 1)"
        )));
    }
    if !(r0 > 0.0) || m == 0.0 {
        return Err(GeomError::Rejected(format!("need r₀ > 0 and m ≠ 0, got r₀ = {r0}, m = {m}")));
    }
    let h0 = h0.unwrap_or(2.0 * n0 / r0);
    // H = 2m/(r³N′) fixes N′(r₀), hence u′(r₀) = 2N₀N′(r₀).
    let dn0 = 2.0 * m / (r0.powi(3) * h0);
    let u0 = n0 * n0;
    let du0 = 2.0 * n0 * dn0;
    let r_end = (100.0 * m.abs()).max(2.0 * r0);
    let sol = solve_u_ode(r0, u0, du0, r_end, Some(m))?;
    let lambda = m.signum();
    let mut profile = Vec::with_capacity(sol.r.len());
    let mut curv = Vec::with_capacity(sol.r.len());
    let mut sup: f64 = 0.0;
    let mut hres: f64 = 0.0;
    for k in 0..sol.r.len() {
        let (r, u, du) = (sol.r[k], sol.u[k], sol.du[k]);
        let n = u.sqrt();
        let ns = (1.0 - 2.0 * m / r).sqrt();
        sup = sup.max((n - ns).abs());
        profile.push(LapseSample {
            r,
            n,
            n_schwarzschild: ns,
        });
        let dn = du / (2.0 * n);
        let direct = 2.0 * m / (r.powi(3) * dn);
        let integrated = h0 / n0 * n * (-0.5 * lambda * sol.h_integral[k]).exp();
        hres = hres.max((direct - integrated).abs() / direct.abs());
        curv.push(MeanCurvatureSample {
            r,
            n,
            direct,
            integrated,
        });
    }
    Ok(ReconstructionResult {
        a_ode: sol.a,
        b_ode: sol.b,
        a_closed: u0 + r0 * du0,
        b_closed: -r0 * r0 * du0,
        b_asymptotic: -r0 * (1.0 - u0),
        mass_from_b: -sol.b / 2.0,
        fit_residual: sol.fit_residual,
        sup_deviation: if sup.is_nan() { f64::INFINITY } else { sup },
        mean_curvature_residual: hres,
        r_end,
        profile,
        mean_curvature: curv,
    })
}
