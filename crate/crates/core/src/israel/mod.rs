//! Lapse-level-set foliation of a static exterior, the exact identities and
//! inequalities along it, the global sign λ, and reconstruction of the
//! Schwarzschild lapse from photon-sphere data.
//!
//! Conventions: ν is the outward unit normal of each leaf, `λ = sign ν(N)`,
//! `ρ = 1/|ν(N)|`, `∂_N = ρ²∇N`, H is the mean curvature with respect to ν.
//! Residuals and slacks are reported in units of |m|.

mod analysis;
mod foliation;
mod node;
mod quadrature;
mod reconstruct;

#[cfg(test)]
mod tests;

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

pub use analysis::{
    boundary_constraints, chain_slacks, sign_analysis, BoundaryConstraints, BoundaryData, ChainSlacks, Exclusion,
    GlobalSign, SignAnalysis, TailCheck, TAIL_GAP,
};
pub use foliation::{
    build_foliation, build_level, leaf_radius, mass_flux, summarize, Foliation, LeafStat, LevelGrid,
    LevelSetGeometry,
};
pub use node::{identity_residuals, node_data, point_slacks, IdentityResiduals, NodeData, PointSlacks, MIN_GRADIENT};
pub use quadrature::{cheb_diff, clenshaw_curtis, gauss_legendre, lobatto_nodes, SphereRule};
pub use reconstruct::{
    reconstruct_lapse, solve_u_ode, LapseSample, MeanCurvatureSample, ReconstructionResult, UOdeSolution,
};

use crate::error::{GeomError, Result};
use crate::hypersurfaces::Hypersurface;
use crate::photon::{default_scan, locate_photon_sphere};
use crate::spacetimes::{ChartPoint, StaticSpacetime};
use crate::tolerances::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct IsraelConfig {
    pub levels: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Outermost leaf radius in units of |m|; beyond it the asymptotic limits apply.
    pub outer_radius: f64,
    /// Close the chains with the asymptotic tail. Without it the verdict cannot be reached.
    pub tail: bool,
    /// Inner level; defaults to the lapse at the located photon sphere.
    pub n0: Option<f64>,
    /// Recompute the boundary and outer mass flux at doubled quadrature order.
    pub doubling: bool,
    /// Seed for the N-range probe points.
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for IsraelConfig {
    fn default() -> Self {
        Self {
            levels: 64,
            n_theta: 64,
            n_phi: 128,
            outer_radius: 100.0,
            tail: true,
            n0: None,
            doubling: true,
            seed: 0x5eed,
            tolerances: Tolerances::default(),
        }
    }
}

/// Per-level table row; residuals and slacks in units of |m|.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LevelRow {
    pub n: f64,
    pub r: f64,
    pub rho: f64,
    pub rho_std: f64,
    pub h: f64,
    pub h_std: f64,
    pub tracefree_sup: f64,
    pub res31: f64,
    pub res32: f64,
    pub res33: f64,
    pub slack34_min: f64,
    pub slack35_min: f64,
    pub slack34_sup: f64,
    pub slack35_sup: f64,
    pub bracket_min: f64,
    pub mass_flux: f64,
    pub gauss_bonnet: f64,
    pub area_rate_residual: f64,
}

pub const LEVEL_CSV_HEADER: &str = "N,r,rho,rho_std,H,H_std,tracefree_sup,res31,res32,res33,slack34_min,slack35_min,bracket_min,mass_flux,gauss_bonnet,area_rate_residual";

impl LevelRow {
    fn from_level(l: &LevelSetGeometry, lambda: f64, am: f64) -> Self {
        let [res31, res32, res33] = l.identity_sups(lambda, am);
        let [s34, s35] = l.slack_mins(lambda, am);
        let [u34, u35] = l.slack_sups(lambda, am);
        Self {
            n: l.n_value,
            r: l.area_radius,
            rho: l.rho.mean,
            rho_std: l.rho.std,
            h: l.mean_curvature.mean,
            h_std: l.mean_curvature.std,
            tracefree_sup: l.tracefree_sup,
            res31,
            res32,
            res33,
            slack34_min: s34,
            slack35_min: s35,
            slack34_sup: u34,
            slack35_sup: u35,
            bracket_min: l.bracket_min(),
            mass_flux: l.mass_flux,
            gauss_bonnet: l.gauss_bonnet,
            area_rate_residual: l.area_rate_residual,
        }
    }

    fn csv_line(&self) -> String {
        [
            self.n,
            self.r,
            self.rho,
            self.rho_std,
            self.h,
            self.h_std,
            self.tracefree_sup,
            self.res31,
            self.res32,
            self.res33,
            self.slack34_min,
            self.slack35_min,
            self.bracket_min,
            self.mass_flux,
            self.gauss_bonnet,
            self.area_rate_residual,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Outcome of the rigidity decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rigidity {
    Isometric,
    NotIsometric,
    Inconclusive,
}

impl Rigidity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rigidity::Isometric => "true",
            Rigidity::NotIsometric => "false",
            Rigidity::Inconclusive => "inconclusive",
        }
    }
}

impl Serialize for Rigidity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One entry of the evidence ledger. `value` is compared against `threshold`.
#[derive(Clone, Debug, Serialize)]
pub struct Gate {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityVerdict {
    pub verdict: Rigidity,
    pub isometric_to_schwarzschild: Option<bool>,
    pub mass: f64,
    pub first_failure: Option<&'static str>,
    pub gates: Vec<Gate>,
}

/// Sampled lapse range outside the inner leaf.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LapseRange {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub within: bool,
}

/// Leaf means of the pointwise transverse derivatives against spectral
/// differences of the leaf means across levels.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransverseCheck {
    pub h_n: f64,
    pub rho_n: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsraelReport {
    pub mass: f64,
    pub lambda: i8,
    pub boundary: BoundaryData,
    pub r_ps: f64,
    pub per_level: Vec<LevelRow>,
    pub levels: Vec<LevelSetGeometry>,
    pub chains: ChainSlacks,
    pub sign: SignAnalysis,
    pub constraints: BoundaryConstraints,
    pub reconstruction: Option<ReconstructionResult>,
    pub reconstruction_error: Option<String>,
    /// Largest change of the mass flux, over |m|, when the leaf order doubles.
    pub doubling_change: Option<f64>,
    pub lapse_range: LapseRange,
    pub transverse: TransverseCheck,
    pub rigidity: RigidityVerdict,
    pub config: IsraelConfig,
}

impl IsraelReport {
    pub fn identity_sup(&self) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        for r in &self.per_level {
            out[0] = out[0].max(r.res31);
            out[1] = out[1].max(r.res32);
            out[2] = out[2].max(r.res33);
        }
        out
    }

    pub fn slack_sups(&self) -> [f64; 2] {
        self.per_level
            .iter()
            .fold([0.0f64; 2], |a, r| [a[0].max(r.slack34_sup), a[1].max(r.slack35_sup)])
    }

    pub fn slack_mins(&self) -> [f64; 2] {
        self.per_level
            .iter()
            .fold([f64::INFINITY; 2], |a, r| [a[0].min(r.slack34_min), a[1].min(r.slack35_min)])
    }

    pub fn bracket_min(&self) -> f64 {
        self.per_level.iter().map(|r| r.bracket_min).fold(f64::INFINITY, f64::min)
    }

    pub fn mass_spread(&self) -> f64 {
        let (lo, hi) = self
            .per_level
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.mass_flux), hi.max(r.mass_flux)));
        hi - lo
    }

    pub fn to_json(&self) -> Value {
        let b = &self.boundary;
        let c = &self.constraints;
        let [s34, s35] = self.slack_sups();
        let [m34, m35] = self.slack_mins();
        json!({
            "mass": self.mass,
            "lambda": self.lambda,
            "boundary": {
                "N0": b.n0,
                "r0": b.r0,
                "H0": b.h0,
                "nuN0": b.nu_n0,
                "frakH": b.frak_h,
                "R_sigma": b.r_sigma,
                "R_p": b.r_p,
                "r_ps": self.r_ps,
            },
            "per_level": self.per_level.iter().map(|r| json!({
                "N": r.n,
                "r": r.r,
                "rho": r.rho,
                "rho_std": r.rho_std,
                "H": r.h,
                "H_std": r.h_std,
                "tracefree_sup": r.tracefree_sup,
                "res31": r.res31,
                "res32": r.res32,
                "res33": r.res33,
                "slack34_min": r.slack34_min,
                "slack35_min": r.slack35_min,
                "bracket_min": r.bracket_min,
                "mass_flux": r.mass_flux,
                "gauss_bonnet": r.gauss_bonnet,
                "area_rate_residual": r.area_rate_residual,
            })).collect::<Vec<_>>(),
            "slacks": {
                "ineq34_sup": s34,
                "ineq35_sup": s35,
                "ineq34_min": m34,
                "ineq35_min": m35,
                "ineq36": self.chains.first_integrated,
                "ineq37": self.chains.first_boundary,
                "ineq38": self.chains.second_integrated,
                "ineq39": self.chains.second_boundary,
                "bracket_min": self.bracket_min(),
                "tail": self.chains.tail,
            },
            "invariants": {
                "frakH_r0": c.frak_h_r0,
                "m_frakH": c.m_frak_h,
                "N0_schwarz_residual": c.n0_schwarz,
                "H0_relation_residual": c.h0_relation,
                "area_relation_residual": c.area_relation,
                "R_sigma_residual": c.r_sigma,
                "R_p_residual": c.r_p,
                "mass_from_frakH": c.mass_from_frak_h,
            },
            "sign": self.sign,
            "reconstruction": self.reconstruction.as_ref().map(|r| json!({
                "A_ode": r.a_ode,
                "B_ode": r.b_ode,
                "A_closed": r.a_closed,
                "B_closed": r.b_closed,
                "B_asymptotic": r.b_asymptotic,
                "mass_from_B": r.mass_from_b,
                "sup_deviation": r.sup_deviation,
                "mean_curvature_residual": r.mean_curvature_residual,
                "r_end": r.r_end,
            })),
            "reconstruction_error": self.reconstruction_error,
            "mass_spread": self.mass_spread(),
            "doubling_change": self.doubling_change,
            "lapse_range": self.lapse_range,
            "transverse_crosscheck": self.transverse,
            "verdict": self.rigidity.verdict,
            "rigidity": self.rigidity,
            "config": self.config,
            "seed": self.config.seed,
        })
    }

    /// Per-level table mirroring `per_level`.
    pub fn level_csv(&self) -> String {
        let mut s = String::from(LEVEL_CSV_HEADER);
        s.push('\n');
        for r in &self.per_level {
            let _ = writeln!(s, "{}", r.csv_line());
        }
        s
    }
}

/// Empty per-level table.
pub fn empty_level_csv() -> String {
    format!("{LEVEL_CSV_HEADER}\n")
}

fn flat_error() -> GeomError {
    GeomError::Flat("m = 0: the lapse is constant, the spacetime is flat and has no photon sphere".into())
}

/// True when the lapse gradient vanishes at a spread of probe points.
fn lapse_is_constant(st: &StaticSpacetime) -> bool {
    let l = st.length_scale();
    let floor = st.profile.r_floor();
    [2.0, 5.0, 20.0, 100.0].iter().all(|&f| {
        let r = (f * l).max(2.0 * floor).max(f);
        let x = [r, 1.1, 0.4];
        let xd = crate::autodiff::Dual::<3>::seed(&x);
        let g = st.lapse(&xd).grad;
        st.check_spatial(&x).is_ok() && g.iter().all(|v| v.abs() * l < MIN_GRADIENT)
    })
}

/// Inner level and radius: the configured level or the located photon sphere.
fn inner_boundary(st: &StaticSpacetime, cfg: &IsraelConfig) -> Result<(f64, f64)> {
    if let Some(n0) = cfg.n0 {
        let r = leaf_radius(st, n0, 0.5 * PI, 0.0, 3.0 * st.length_scale())?;
        return Ok((n0, r));
    }
    let loc = locate_photon_sphere(&st.profile, default_scan(st))?;
    match loc.r_ps {
        Some(r) => Ok((st.lapse(&[r, 0.5 * PI, 0.0]), r)),
        None => Err(GeomError::Rejected(
            "no photon sphere located: nothing anchors the inner boundary of the foliation".into(),
        )),
    }
}

/// ℌ and R_p as leaf averages on the lapse cylinder `{N = N₀}`.
fn photon_surface_curvature(st: &StaticSpacetime, n0: f64, r_guess: f64) -> Result<(f64, f64)> {
    let cyl = Hypersurface::lapse_cylinder(st, n0, r_guess);
    let rule = SphereRule::new(4, 8);
    let (mut fh, mut rp, mut wsum) = (0.0, 0.0, 0.0);
    for k in 0..rule.len() {
        let (th, ph, w) = rule.node(k);
        let r = leaf_radius(st, n0, th, ph, r_guess)?;
        let p = ChartPoint::new(0.0, r, th, ph)?;
        let shape = cyl.shape(&p)?;
        let g = cyl.gauss_residual(&p)?;
        let r_p = g.ambient_scalar - 2.0 * g.tau * g.ricci_normal + g.tau * (g.mean_curvature.powi(2) - g.norm_sq);
        let wk = w * th.sin();
        fh += wk * shape.mean_curvature;
        rp += wk * r_p;
        wsum += wk;
    }
    Ok((fh / wsum, rp / wsum))
}

fn lapse_range(st: &StaticSpacetime, inner: &LevelSetGeometry, n0: f64, am: f64, seed: u64, tol: f64) -> LapseRange {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_max_leaf = inner.nodes.iter().map(|d| d.at[0]).fold(0.0, f64::max);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let samples = 256;
    for _ in 0..samples {
        let th = rng.gen_range(0.05..PI - 0.05);
        let ph = rng.gen_range(0.0..2.0 * PI);
        let s: f64 = rng.gen_range(0.0..1.0);
        let r = r_max_leaf * (1000.0 * am / r_max_leaf).max(2.0).powf(s);
        let n = st.lapse(&[r, th, ph]);
        lo = lo.min(n);
        hi = hi.max(n);
    }
    let (a, b) = if n0 < 1.0 { (n0, 1.0) } else { (1.0, n0) };
    LapseRange {
        min: lo,
        max: hi,
        samples,
        within: lo >= a - tol && hi <= b + tol,
    }
}

fn transverse_check(fol: &Foliation) -> TransverseCheck {
    let mean = |f: fn(&NodeData) -> f64| -> Vec<f64> {
        fol.levels.iter().map(|l| l.integrate(f) / l.area).collect()
    };
    let (h, rho) = (mean(|d| d.h), mean(|d| d.rho));
    let (h_n, rho_n) = (mean(|d| d.h_n), mean(|d| d.rho_n));
    let dh = fol.grid.derivative(&h);
    // ρ grows like r²; its logarithm is what the spectral derivative resolves well.
    let ln_rho: Vec<f64> = rho.iter().map(|v| v.ln()).collect();
    let dln = fol.grid.derivative(&ln_rho);
    let ln_rho_n: Vec<f64> = rho_n.iter().zip(&rho).map(|(a, b)| a / b).collect();
    // Errors against the sup norm: H,_N vanishes on the photon sphere itself.
    let rel = |a: &[f64], b: &[f64]| {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
    };
    TransverseCheck {
        h_n: rel(&dh, &h_n),
        rho_n: rel(&dln, &ln_rho_n),
    }
}

fn gate(name: &'static str, value: f64, threshold: f64, passed: bool, detail: String) -> Gate {
    Gate {
        name,
        passed,
        value,
        threshold,
        detail,
    }
}

/// Apply the gates in order. Only a failed tail gate leaves the verdict open.
pub fn rigidity_verdict(report: &IsraelReport) -> RigidityVerdict {
    let tol = report.config.tolerances.lvl;
    let mut gates = Vec::new();
    let ids = report.identity_sup();
    let id_max = ids.iter().fold(0.0f64, |a, v| a.max(*v));
    gates.push(gate(
        "identities",
        id_max,
        tol,
        id_max < tol,
        format!("sup residuals {:.3e}, {:.3e}, {:.3e}", ids[0], ids[1], ids[2]),
    ));
    let bmin = report.bracket_min();
    gates.push(gate(
        "brackets",
        bmin,
        -1e-14,
        bmin >= -1e-14,
        "sums of squares stay non-negative".into(),
    ));
    let ch = &report.chains;
    let mut sharp = vec![ch.first_boundary.abs(), ch.second_boundary.abs()];
    sharp.extend(ch.first_integrated.map(f64::abs));
    sharp.extend(ch.second_integrated.map(f64::abs));
    let [p34, p35] = report.slack_sups();
    sharp.push(p34);
    sharp.push(p35);
    let sharp_max = sharp.iter().fold(0.0f64, |a, v| a.max(*v));
    gates.push(gate(
        "sharpness",
        sharp_max,
        tol,
        sharp_max < tol,
        format!(
            "integrated {:?} / {:?}, boundary {:.3e} / {:.3e}, pointwise {:.3e} / {:.3e}",
            ch.first_integrated, ch.second_integrated, ch.first_boundary, ch.second_boundary, p34, p35
        ),
    ));
    let am = report.mass.abs();
    let tf = report.per_level.iter().map(|r| r.tracefree_sup * am).fold(0.0, f64::max);
    gates.push(gate("tracefree", tf, tol, tf < tol, "sup |h̊| over all leaves".into()));
    let rc = report.per_level.iter().map(|r| r.rho_std / r.rho).fold(0.0, f64::max);
    gates.push(gate("rho_constancy", rc, tol, rc < tol, "max relative leaf std-dev of ρ".into()));
    let hmin = report.levels.iter().map(|l| l.mean_curvature.min).fold(f64::INFINITY, f64::min);
    gates.push(gate("mean_curvature_positive", hmin * am, 0.0, hmin > 0.0, "min H over all nodes".into()));
    let (dev, detail) = match &report.reconstruction {
        Some(r) => (r.sup_deviation, format!("A = {:.12}, B = {:.12}", r.a_ode, r.b_ode)),
        None => (f64::INFINITY, report.reconstruction_error.clone().unwrap_or_default()),
    };
    gates.push(gate("reconstruction", dev, tol, dev < tol, detail));
    let sign = &report.sign;
    let excl_ok = sign.sign.consistent
        && sign.sign.lambda == 1
        && sign.exclusion.map(|e| !e.contradiction).unwrap_or(false)
        && sign.negative_branch.map(|e| e.contradiction).unwrap_or(false);
    gates.push(gate(
        "lambda",
        sign.sign.lambda as f64,
        1.0,
        excl_ok,
        format!("signs {:?}, exclusion {:?}", sign.sign.signs, sign.exclusion.map(|e| e.slack)),
    ));
    let spread = report.mass_spread() / am;
    let dbl = report.doubling_change.unwrap_or(0.0);
    let mass_val = spread.max(dbl);
    gates.push(gate(
        "mass",
        mass_val,
        tol,
        mass_val < tol,
        format!("flux spread {spread:.3e}, doubling change {dbl:.3e}"),
    ));
    let t = &ch.tail;
    gates.push(gate(
        "tail",
        t.first_gap.max(t.second_gap),
        TAIL_GAP,
        t.passed,
        if t.enabled {
            format!("outer leaf at r = {:.3}", t.r_outer)
        } else {
            "foliation truncated without the asymptotic tail".into()
        },
    ));
    let first_failure = gates.iter().find(|g| !g.passed).map(|g| g.name);
    let verdict = match first_failure {
        None => Rigidity::Isometric,
        Some(_) if gates.iter().filter(|g| !g.passed).all(|g| g.name == "tail") => Rigidity::Inconclusive,
        Some(_) => Rigidity::NotIsometric,
    };
    RigidityVerdict {
        verdict,
        isometric_to_schwarzschild: match verdict {
            Rigidity::Isometric => Some(true),
            Rigidity::NotIsometric => Some(false),
            Rigidity::Inconclusive => None,
        },
        mass: report.mass,
        first_failure,
        gates,
    }
}

/// Full pipeline: foliation from the photon sphere outward, mass, sign,
/// identities, chains, boundary relations, reconstruction and verdict.
pub fn run_israel(st: &StaticSpacetime, cfg: &IsraelConfig) -> Result<IsraelReport> {
    cfg.tolerances.validate()?;
    if st.mass_hint() == Some(0.0) || lapse_is_constant(st) {
        return Err(flat_error());
    }
    let (n0, r_ps) = inner_boundary(st, cfg)?;
    let scale = st.mass_hint().map(f64::abs).filter(|m| *m > 0.0).unwrap_or(st.length_scale());
    let r_outer = cfg.outer_radius * scale;
    if !(r_outer > r_ps) {
        return Err(GeomError::Rejected(format!(
            "outer radius {r_outer} does not exceed the inner boundary radius {r_ps}"
        )));
    }
    let n_outer = st.lapse(&[r_outer, 0.5 * PI, 0.0]);
    let fol = build_foliation(st, n0, n_outer, cfg.levels, (cfg.n_theta, cfg.n_phi))?;
    let inner = &fol.levels[0];
    let mass = inner.mass_flux;
    if mass == 0.0 {
        return Err(flat_error());
    }
    let am = mass.abs();
    let doubling_change = if cfg.doubling {
        let rule = SphereRule::new(2 * cfg.n_theta, 2 * cfg.n_phi);
        let a = (mass_flux(st, n0, &rule)? - mass).abs();
        let outer = fol.levels.last().expect("levels");
        let b = (mass_flux(st, outer.n_value, &rule)? - outer.mass_flux).abs();
        Some(a.max(b) / am)
    } else {
        None
    };
    let (frak_h, r_p) = photon_surface_curvature(st, n0, r_ps)?;
    let boundary = BoundaryData {
        mass,
        n0,
        r0: inner.area_radius,
        h0: inner.mean_curvature.mean,
        nu_n0: inner.nu_n.mean,
        frak_h,
        r_sigma: 2.0 * inner.gauss_curvature.mean,
        r_p,
    };
    let sign = sign_analysis(&boundary, cfg.tolerances.lvl)?;
    let lambda = sign.sign.lambda as f64;
    let per_level = fol.levels.iter().map(|l| LevelRow::from_level(l, lambda, am)).collect();
    let chains = chain_slacks(&fol, &boundary, lambda, cfg.tail);
    let constraints = boundary_constraints(&boundary);
    let (reconstruction, reconstruction_error) = match reconstruct_lapse(mass, n0, boundary.r0, Some(boundary.h0)) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let lapse_range = lapse_range(st, inner, n0, am, cfg.seed, cfg.tolerances.lvl);
    let transverse = transverse_check(&fol);
    let mut report = IsraelReport {
        mass,
        lambda: sign.sign.lambda,
        boundary,
        r_ps,
        per_level,
        levels: fol.levels,
        chains,
        sign,
        constraints,
        reconstruction,
        reconstruction_error,
        doubling_change,
        lapse_range,
        transverse,
        rigidity: RigidityVerdict {
            verdict: Rigidity::Inconclusive,
            isometric_to_schwarzschild: None,
            mass,
            first_failure: None,
            gates: Vec::new(),
        },
        config: cfg.clone(),
    };
    report.rigidity = rigidity_verdict(&report);
    Ok(report)
}
