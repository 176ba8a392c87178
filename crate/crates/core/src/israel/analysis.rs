//! Boundary relations, the global sign, and the integrated inequality chains.

use std::f64::consts::PI;

use serde::Serialize;

use super::foliation::Foliation;
use crate::error::{GeomError, Result};

/// Inner-boundary data feeding the sign analysis and boundary relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryData {
    pub mass: f64,
    pub n0: f64,
    pub r0: f64,
    pub h0: f64,
    pub nu_n0: f64,
    /// Mean curvature ℌ of the photon surface in the spacetime.
    pub frak_h: f64,
    /// Leaf scalar curvature at the boundary level.
    pub r_sigma: f64,
    /// Scalar curvature of the photon surface.
    pub r_p: f64,
}

impl BoundaryData {
    /// Closed-form Schwarzschild values at r₀ = 3m.
    pub fn schwarzschild(m: f64) -> Self {
        let n0 = 1.0 / 3f64.sqrt();
        let frak_h = 1.0 / (3f64.sqrt() * m);
        Self {
            mass: m,
            n0,
            r0: 3.0 * m,
            h0: 2.0 * n0 / (3.0 * m),
            nu_n0: 1.0 / (9.0 * m),
            frak_h,
            r_sigma: 2.0 / (9.0 * m * m),
            r_p: 2.0 / (9.0 * m * m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GlobalSign {
    pub lambda: i8,
    /// Signs of ν(N), m, ℌ and H₀, in that order.
    pub signs: [i8; 4],
    pub consistent: bool,
}

/// The executed check `r₀² ≤ (6λ + 3) m²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Exclusion {
    pub lambda: i8,
    pub bound: f64,
    pub r0_sq: f64,
    /// `(bound − r₀²)/m²`; negative means the chain is contradicted.
    pub slack: f64,
    pub equality: bool,
    pub contradiction: bool,
}

impl Exclusion {
    pub fn evaluate(lambda: i8, m: f64, r0: f64, tol: f64) -> Self {
        let bound = (6.0 * lambda as f64 + 3.0) * m * m;
        let r0_sq = r0 * r0;
        let slack = (bound - r0_sq) / (m * m);
        Self {
            lambda,
            bound,
            r0_sq,
            slack,
            equality: slack.abs() < tol,
            contradiction: slack < -tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignAnalysis {
    pub sign: GlobalSign,
    /// Absent when the signs disagree: the chain is never reached.
    pub exclusion: Option<Exclusion>,
    /// The hypothetical λ = −1 branch with the same m and r₀.
    pub negative_branch: Option<Exclusion>,
}

fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn sign_analysis(b: &BoundaryData, tol: f64) -> Result<SignAnalysis> {
    if b.mass == 0.0 || b.nu_n0 == 0.0 {
        return Err(GeomError::Flat(
            "m = 0: the lapse is then constant, the spacetime is flat and has no photon sphere".into(),
        ));
    }
    let signs = [sgn(b.nu_n0), sgn(b.mass), sgn(b.frak_h), sgn(b.h0)];
    let lambda = signs[0];
    let consistent = signs.iter().all(|&s| s == lambda);
    let sign = GlobalSign {
        lambda,
        signs,
        consistent,
    };
    if !consistent {
        return Ok(SignAnalysis {
            sign,
            exclusion: None,
            negative_branch: None,
        });
    }
    Ok(SignAnalysis {
        sign,
        exclusion: Some(Exclusion::evaluate(lambda, b.mass, b.r0, tol)),
        negative_branch: Some(Exclusion::evaluate(-1, b.mass, b.r0, tol)),
    })
}

/// Boundary relations at the photon-sphere level, all in units of |m|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryConstraints {
    /// `4N₀ − 4mH₀ − r₀²N₀H₀²`
    pub area_relation: f64,
    pub frak_h_r0: f64,
    /// `|ℌ| r₀ − √3`
    pub frak_h_r0_residual: f64,
    pub m_frak_h: f64,
    /// `N₀ − mℌ`
    pub n0_m_frak_h: f64,
    /// `N₀² − (1 − 2m/r₀)`
    pub n0_schwarz: f64,
    /// `H₀ − 2N₀/r₀`
    pub h0_relation: f64,
    /// `R_σ − (2/3)ℌ²`
    pub r_sigma: f64,
    /// `R_p − (2/3)ℌ²`
    pub r_p: f64,
    /// `1/(√3 ℌ)`
    pub mass_from_frak_h: f64,
}

impl BoundaryConstraints {
    pub fn max_residual(&self) -> f64 {
        [
            self.area_relation,
            self.frak_h_r0_residual,
            self.n0_m_frak_h,
            self.n0_schwarz,
            self.h0_relation,
            self.r_sigma,
            self.r_p,
        ]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

pub fn boundary_constraints(b: &BoundaryData) -> BoundaryConstraints {
    let (m, n0, r0, h0, fh) = (b.mass, b.n0, b.r0, b.h0, b.frak_h);
    let am = m.abs();
    BoundaryConstraints {
        area_relation: 4.0 * n0 - 4.0 * m * h0 - r0 * r0 * n0 * h0 * h0,
        frak_h_r0: fh * r0,
        frak_h_r0_residual: (fh * r0).abs() - 3f64.sqrt(),
        m_frak_h: m * fh,
        n0_m_frak_h: n0 - m * fh,
        n0_schwarz: n0 * n0 - (1.0 - 2.0 * m / r0),
        h0_relation: (h0 - 2.0 * n0 / r0) * am,
        r_sigma: (b.r_sigma - 2.0 / 3.0 * fh * fh) * am * am,
        r_p: (b.r_p - 2.0 / 3.0 * fh * fh) * am * am,
        mass_from_frak_h: 1.0 / (3f64.sqrt() * fh),
    }
}

/// Integrated slacks of the two chains. The first pair integrates the
/// pointwise inequalities over the foliation; the second pair is the
/// simplified boundary form. All are RHS − LHS and sharp on Schwarzschild.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSlacks {
    /// `−2∫(1/N)∮Δ_σ√ρ dμ dN − λ[(1/N)∮H/√ρ dμ]_{N₀}^{1}`, over √|m|.
    pub first_integrated: Option<f64>,
    /// `λ(r₀H₀ − 2N₀)`
    pub first_boundary: f64,
    /// `−∫N∮(Δ_σ ln ρ + R_σ) dμ dN − [∮ρ⁻¹(HN + 4λ/ρ) dμ]_{N₀}^{1}`
    pub second_integrated: Option<f64>,
    /// `|m|(H₀N₀ + 4m/r₀²) − (1 − N₀²)`
    pub second_boundary: f64,
    /// Per-level `(1/N)∮H/√ρ dμ`.
    pub first_leaf_integral: Vec<f64>,
    /// Per-level `∮ρ⁻¹(HN + 4λ/ρ) dμ`.
    pub second_leaf_integral: Vec<f64>,
    pub tail: TailCheck,
}

/// Comparison of the outermost leaf with the asymptotic limits used beyond it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    pub enabled: bool,
    pub n_outer: f64,
    pub r_outer: f64,
    /// Relative gap between the first leaf integral and its limit 8π√|m|.
    pub first_gap: f64,
    /// Relative gap between the second leaf integral and 4π(1 − N²).
    pub second_gap: f64,
    pub passed: bool,
}

/// Relative gap allowed at the crossover for the O(m/r) corrections.
pub const TAIL_GAP: f64 = 0.05;

pub fn chain_slacks(fol: &Foliation, b: &BoundaryData, lambda: f64, tail: bool) -> ChainSlacks {
    let m = b.mass;
    let am = m.abs();
    let levels = &fol.levels;
    let f: Vec<f64> = levels
        .iter()
        .map(|l| l.integrate(|d| d.h / d.rho.sqrt()) / l.n_value)
        .collect();
    let g: Vec<f64> = levels
        .iter()
        .map(|l| l.integrate(|d| (d.h * d.n + 4.0 * lambda / d.rho) / d.rho))
        .collect();
    let lap_sqrt: Vec<f64> = levels
        .iter()
        .map(|l| l.integrate(|d| d.lap_sqrt_rho) / l.n_value)
        .collect();
    let second_rhs: Vec<f64> = levels
        .iter()
        .map(|l| l.n_value * l.integrate(|d| d.lap_ln_rho + d.r_sigma))
        .collect();
    let outer = levels.last().expect("foliation has levels");
    let n_out = outer.n_value;
    let f_limit = 8.0 * PI * am.sqrt();
    let g_limit = 4.0 * PI * (1.0 - n_out * n_out);
    let first_gap = (f[f.len() - 1] - f_limit).abs() / f_limit;
    let second_gap = (g[g.len() - 1] - g_limit).abs() / g_limit.abs();
    let tail_check = TailCheck {
        enabled: tail,
        n_outer: n_out,
        r_outer: outer.area_radius,
        first_gap,
        second_gap,
        passed: tail && first_gap < TAIL_GAP && second_gap < TAIL_GAP,
    };
    // Beyond the outer leaf: ∮Δ_σ√ρ = 0 and ∮(Δ_σ ln ρ + R_σ) = 8π exactly,
    // while the leaf integrals tend to 8π√|m| and 0.
    let (first_integrated, second_integrated) = if tail {
        let rhs1 = -2.0 * fol.grid.integrate(&lap_sqrt);
        let lhs1 = lambda * (f_limit - f[0]);
        let rhs2 = -fol.grid.integrate(&second_rhs) - 4.0 * PI * (1.0 - n_out * n_out);
        let lhs2 = -g[0];
        (Some((rhs1 - lhs1) / am.sqrt()), Some(rhs2 - lhs2))
    } else {
        (None, None)
    };
    ChainSlacks {
        first_integrated,
        first_boundary: lambda * (b.r0 * b.h0 - 2.0 * b.n0),
        second_integrated,
        second_boundary: am * (b.h0 * b.n0 + 4.0 * m / (b.r0 * b.r0)) - (1.0 - b.n0 * b.n0),
        first_leaf_integral: f,
        second_leaf_integral: g,
        tail: tail_check,
    }
}
