//! Photon-surface detection and certification.
//!
//! A static timelike cylinder is certified as a photon surface when it is totally
//! umbilic and null geodesics started tangent to it stay on it. Both tests run
//! independently; disagreement is reported as inconclusive.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::{curvature, vacuum_residual, Scheme};
use crate::error::{GeomError, Result};
use crate::geodesics::{tangency_persistence, tangent_null_seeds, TangencyReport, TraceOptions};
use crate::hypersurfaces::{Hypersurface, SurfaceKind};
use crate::linalg::{mean_std, signature};
use crate::spacetimes::{ChartPoint, RadialProfile, StaticSpacetime};
use crate::tolerances::Tolerances;

/// Number of bracketing cells in the root scan.
pub const SCAN_POINTS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonSphereLocation {
    /// Outermost root, if any.
    pub r_ps: Option<f64>,
    pub n0: Option<f64>,
    pub multiplicity: usize,
    pub roots: Vec<f64>,
    pub scan: (f64, f64),
}

/// Null circular orbits of −N²dt² + g_rr dr² + r²dΩ sit at critical points of r/N,
/// i.e. at roots of r N′ − N (g_rr drops out).
pub fn photon_condition(profile: &RadialProfile, r: f64) -> f64 {
    let [n, dn, _] = profile.lapse_jet(r);
    r * dn - n
}

/// Scan [lo, hi] on a 512-cell grid and bisect each sign change.
pub fn locate_photon_sphere(profile: &RadialProfile, scan: (f64, f64)) -> Result<PhotonSphereLocation> {
    let (lo, hi) = scan;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(GeomError::Rejected(format!("empty scan range [{lo}, {hi}]")));
    }
    for r in [lo, hi] {
        profile
            .check(r)
            .map_err(|e| GeomError::Rejected(format!("scan range leaves the profile domain: {e}")))?;
    }
    let f = |r: f64| photon_condition(profile, r);
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
    let mut roots = Vec::new();
    for i in 0..SCAN_POINTS {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if i + 1 == SCAN_POINTS && fb == 0.0 {
            roots.push(b);
            continue;
        }
        if fa * fb < 0.0 {
            roots.push(bisect(&f, a, b, fa));
        }
    }
    let r_ps = roots.last().copied();
    Ok(PhotonSphereLocation {
        r_ps,
        n0: r_ps.map(|r| profile.lapse(r)),
        multiplicity: roots.len(),
        roots,
        scan,
    })
}

/// Bisection down to adjacent floats. Stopping at 1e-12 would be enough for the location,
/// but the orbit is unstable and tangency tests amplify the root error by e^(span/3m).
fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Default scan window: from just outside the inner edge to 100 length scales.
pub fn default_scan(st: &StaticSpacetime) -> (f64, f64) {
    let (lo, hi) = st.profile.domain();
    let floor = st.profile.r_floor();
    let lo = if floor > 0.0 { floor * (1.0 + 1e-6) } else { lo.max(1e-3 * st.length_scale()) };
    let lo = lo.max(st.profile.domain().0);
    (lo, hi.min(100.0 * st.length_scale()))
}

/// R_p = (n + 1 − 2τ) Λ + τ (n − 1)/n H² on a photon surface of an Einstein spacetime Ric = Λ g.
pub fn einstein_scalar_formula(n: usize, tau: f64, lambda: f64, h: f64) -> Result<f64> {
    if n < 2 {
        return Err(GeomError::Rejected(format!("surface dimension {n} < 2")));
    }
    let nf = n as f64;
    Ok((nf + 1.0 - 2.0 * tau) * lambda + tau * (nf - 1.0) / nf * h * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub seeds: usize,
    pub span: f64,
    pub rng_seed: u64,
    /// Points sampled on the surface for the umbilicity and timelike tests.
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            seeds: 32,
            span: 100.0,
            rng_seed: 0x5eed,
            samples: 64,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Stat {
    pub value: f64,
    pub stddev: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhotonSurfaceCertificate {
    pub surface: String,
    pub verdict: Verdict,
    /// sup |I̊I| over samples, times the length scale.
    pub umbilicity_sup: f64,
    pub mean_curvature: Stat,
    /// Intrinsic scalar curvature from the Gauss equation.
    pub scalar: Stat,
    /// (2/3) ℌ² from the mean of ℌ.
    pub scalar_expected: f64,
    /// sup of the Gauss-equation residual against the finite-difference intrinsic curvature.
    pub gauss_residual: f64,
    pub tangency: TangencyReport,
    /// Tangency deviation divided by the length scale.
    pub tangency_deviation: f64,
    pub length_scale: f64,
    /// Spread of N over the samples; a certified surface with constant N is a photon sphere.
    pub lapse_stddev: f64,
    pub photon_sphere: bool,
    pub mean_curvature_samples: Vec<f64>,
    pub scalar_samples: Vec<f64>,
    pub sample_points: Vec<ChartPoint>,
    pub tolerances: Tolerances,
    pub rng_seed: u64,
}

/// Deterministic, roughly uniform points on a static cylinder.
fn surface_samples(surface: &Hypersurface, count: usize) -> Result<Vec<ChartPoint>> {
    let r_guess = match surface.kind {
        SurfaceKind::Cylinder => surface.parameter,
        SurfaceKind::LapseCylinder => {
            let st = surface.spacetime;
            let (lo, hi) = default_scan(st);
            let f = |r: f64| st.lapse(&[r, std::f64::consts::FRAC_PI_2, 0.0]) - surface.parameter;
            if f(lo) * f(hi) > 0.0 {
                return Err(GeomError::Rejected("lapse level not attained".into()));
            }
            bisect(&f, lo, hi, f(lo))
        }
        _ => {
            return Err(GeomError::Rejected(format!(
                "certification needs a static cylinder, got {}",
                surface.label()
            )))
        }
    };
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let theta = z.acos().clamp(0.15, std::f64::consts::PI - 0.15);
            let p = ChartPoint::new(0.37 * i as f64, r_guess, theta, golden * i as f64)?;
            let q = surface.project(&p)?;
            ChartPoint::new(q[0], q[1], q[2], q[3])
        })
        .collect()
}

/// Run the umbilicity sampling and the tangency test on a static cylinder.
pub fn certify_photon_surface(surface: &Hypersurface, cfg: &CertifyConfig) -> Result<PhotonSurfaceCertificate> {
    cfg.tolerances.validate()?;
    let st = surface.spacetime;
    let tol = &cfg.tolerances;
    let pts = surface_samples(surface, cfg.samples.max(2))?;
    for p in &pts {
        let sig = signature(&surface.induced_metric(p)?);
        if sig != (1, 0, 2) {
            return Err(GeomError::Rejected(format!(
                "surface is not timelike at {p:?}: induced signature (neg, zero, pos) = {sig:?}"
            )));
        }
    }
    let l = st.length_scale();
    let mut umb: f64 = 0.0;
    let mut hs = Vec::with_capacity(pts.len());
    let mut rs = Vec::with_capacity(pts.len());
    let mut gauss: f64 = 0.0;
    let mut lapses = Vec::with_capacity(pts.len());
    for p in &pts {
        let shape = surface.shape(p)?;
        umb = umb.max(shape.tracefree_norm * l);
        hs.push(shape.mean_curvature);
        let g = surface.gauss_residual(p)?;
        // R_p from the Gauss equation with autodiff ambient curvature
        let r_p = g.ambient_scalar - 2.0 * g.tau * g.ricci_normal + g.tau * (g.mean_curvature.powi(2) - g.norm_sq);
        rs.push(r_p);
        gauss = gauss.max(g.residual.abs() * l * l);
        lapses.push(st.lapse(&p.spatial()));
    }
    let (h_mean, h_sd) = mean_std(&hs);
    let (r_mean, r_sd) = mean_std(&rs);
    let (_, n_sd) = mean_std(&lapses);
    let seeds = tangent_null_seeds(surface, cfg.seeds, cfg.rng_seed)?;
    let tangency = tangency_persistence(surface, &seeds, cfg.span * l, &TraceOptions::default())?;
    let tangency_deviation = tangency.max_deviation / l;

    let umbilic = umbilic_ok(umb, h_sd * l, r_sd * l * l, tol);
    let tangent = tangency_deviation < tol.traj;
    let verdict = match (umbilic, tangent) {
        (true, true) => Verdict::Certified,
        (false, false) if umb >= tol.cert => Verdict::Refuted,
        _ => Verdict::Inconclusive,
    };
    Ok(PhotonSurfaceCertificate {
        surface: surface.label(),
        verdict,
        umbilicity_sup: umb,
        mean_curvature: Stat { value: h_mean, stddev: h_sd },
        scalar: Stat { value: r_mean, stddev: r_sd },
        scalar_expected: einstein_scalar_formula(3, 1.0, 0.0, h_mean)?,
        gauss_residual: gauss,
        tangency,
        tangency_deviation,
        length_scale: l,
        lapse_stddev: n_sd,
        photon_sphere: verdict == Verdict::Certified && n_sd < tol.cert,
        mean_curvature_samples: hs,
        scalar_samples: rs,
        sample_points: pts,
        tolerances: *tol,
        rng_seed: cfg.rng_seed,
    })
}

fn umbilic_ok(umb: f64, h_sd: f64, r_sd: f64, tol: &Tolerances) -> bool {
    umb < tol.cert && h_sd < tol.cert && r_sd < tol.cert
}

impl PhotonSurfaceCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "surface": self.surface,
            "verdict": self.verdict,
            "umbilicity_sup": self.umbilicity_sup,
            "mean_curvature": {"value": self.mean_curvature.value, "stddev": self.mean_curvature.stddev},
            "scalar": {
                "value": self.scalar.value,
                "stddev": self.scalar.stddev,
                "expected": self.scalar_expected,
                "residual": (self.scalar.value - self.scalar_expected).abs(),
                "gauss_residual": self.gauss_residual,
            },
            "tangency": {"span": self.tangency.span, "deviation": self.tangency_deviation, "seeds": self.tangency.seeds.len()},
            "photon_sphere": self.photon_sphere,
            "length_scale": self.length_scale,
            "margins": {
                "umbilicity": self.tolerances.cert - self.umbilicity_sup,
                "tangency": self.tolerances.traj - self.tangency_deviation,
                "mean_curvature_stddev": self.tolerances.cert - self.mean_curvature.stddev * self.length_scale,
            },
            "tolerances": self.tolerances,
            "rng_seed": self.rng_seed,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CmcCheck {
    /// sup |ℌ − mean ℌ| over the samples, times the length scale
    pub cmc_residual: f64,
    /// |R_p − expected| times the length scale squared
    pub scalar_residual: f64,
    pub expected: f64,
    pub vacuum: bool,
    pub warning: Option<String>,
}

/// Constant mean curvature and R_p = (2/3)ℌ² on a certified photon surface. On a non-vacuum
/// ambient the general formula is used with Λ = R/4 of the spacetime and a warning.
pub fn cmc_scalar_check(surface: &Hypersurface, cert: &PhotonSurfaceCertificate) -> Result<CmcCheck> {
    if cert.verdict != Verdict::Certified {
        return Err(GeomError::Rejected(format!(
            "{} is not certified umbilic (verdict {:?})",
            cert.surface, cert.verdict
        )));
    }
    let st = surface.spacetime;
    let l = cert.length_scale;
    let tol = cert.tolerances;
    let mut vacuum = true;
    let mut lambda = 0.0;
    for p in &cert.sample_points {
        let v = vacuum_residual(st, p, Scheme::Autodiff)?;
        if v.hessian_residual * l * l > tol.diff || v.scalar_residual * l * l > tol.diff {
            vacuum = false;
        }
    }
    let mut warning = None;
    if !vacuum {
        let p = cert.sample_points[0];
        let b = curvature(&st.spacetime(), &p.coords(), Scheme::Autodiff)?;
        lambda = b.scalar / 4.0;
        warning = Some(format!("ambient is not vacuum; using the Einstein formula with Lambda = R/4 = {lambda:.6e}"));
    }
    let h = cert.mean_curvature.value;
    let expected = einstein_scalar_formula(3, 1.0, lambda, h)?;
    let cmc_residual = cert
        .mean_curvature_samples
        .iter()
        .map(|x| (x - h).abs())
        .fold(0.0, f64::max)
        * l;
    let scalar_residual = cert
        .scalar_samples
        .iter()
        .map(|x| (x - expected).abs())
        .fold(0.0, f64::max)
        * l
        * l;
    Ok(CmcCheck { cmc_residual, scalar_residual, expected, vacuum, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::{tangency_persistence, tangent_null_seeds};
    use crate::spacetimes::RadialProfile;

    fn quick() -> CertifyConfig {
        CertifyConfig { seeds: 8, span: 60.0, samples: 16, ..Default::default() }
    }

    #[test]
    fn schwarzschild_photon_sphere_scales_exactly() {
        for m in [0.5, 1.0, 2.0, 10.0] {
            let prof = RadialProfile::schwarzschild(m);
            let loc = locate_photon_sphere(&prof, (2.1 * m, 50.0 * m)).unwrap();
            assert_eq!(loc.multiplicity, 1);
            let r = loc.r_ps.unwrap();
            assert!((r / (3.0 * m) - 1.0).abs() < 1e-8, "m = {m}: {r}");
            assert!((loc.n0.unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn no_photon_sphere_without_positive_mass() {
        let loc = locate_photon_sphere(&RadialProfile::minkowski(), (0.1, 50.0)).unwrap();
        assert!(loc.r_ps.is_none());
        assert!((photon_condition(&RadialProfile::minkowski(), 3.0) + 1.0).abs() < 1e-15);
        let loc = locate_photon_sphere(&RadialProfile::schwarzschild(-1.0), (0.1, 50.0)).unwrap();
        assert!(loc.r_ps.is_none());
        assert!(locate_photon_sphere(&RadialProfile::schwarzschild(1.0), (1.0, 50.0)).is_err());
    }

    #[test]
    fn reissner_like_root() {
        // N² = 1 − 2/r + q²/r² has its photon sphere at (3 + sqrt(9 − 8q²))/2
        let prof = RadialProfile::expression("sqrt(1 - 2/r + 0.1/r^2)", None, Some(1.0), 1.95).unwrap();
        let r = locate_photon_sphere(&prof, (2.0, 50.0)).unwrap().r_ps.unwrap();
        assert!((r - (3.0 + (9.0f64 - 0.8).sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn locator_agrees_with_brute_force_tangency() {
        // the geodesic integrator itself is the oracle: scan r and find the least drift
        let st = StaticSpacetime::schwarzschild(1.0);
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..41 {
            let r0 = 2.6 + 0.02 * i as f64;
            let cyl = Hypersurface::cylinder(&st, r0);
            let seeds = tangent_null_seeds(&cyl, 4, 1).unwrap();
            let rep = tangency_persistence(&cyl, &seeds, 10.0, &TraceOptions::with_tol(1e-9)).unwrap();
            if rep.max_deviation < best.0 {
                best = (rep.max_deviation, r0);
            }
        }
        let located = locate_photon_sphere(&st.profile, (2.1, 50.0)).unwrap().r_ps.unwrap();
        assert!((best.1 - located).abs() < 0.011, "{best:?} vs {located}");
    }

    #[test]
    fn einstein_formula_examples() {
        let h = 1.0 / 3f64.sqrt();
        assert!((einstein_scalar_formula(3, 1.0, 0.0, h).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(einstein_scalar_formula(3, 1.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(einstein_scalar_formula(2, -1.0, 1.0, 2.0).unwrap(), 3.0);
        assert!(einstein_scalar_formula(1, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn certify_photon_sphere_and_refute_neighbours() {
        let st = StaticSpacetime::schwarzschild(1.0);
        let c = certify_photon_surface(&Hypersurface::cylinder(&st, 3.0), &quick()).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.umbilicity_sup < 1e-8);
        assert!((c.mean_curvature.value - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((c.scalar.value - 2.0 / 9.0).abs() < 1e-12);
        assert!(c.photon_sphere);
        let chk = cmc_scalar_check(&Hypersurface::cylinder(&st, 3.0), &c).unwrap();
        assert!(chk.vacuum && chk.cmc_residual < 1e-7 && chk.scalar_residual < 1e-7);

        for r in [2.4, 3.6, 4.0] {
            let c = certify_photon_surface(&Hypersurface::cylinder(&st, r), &quick()).unwrap();
            assert_eq!(c.verdict, Verdict::Refuted, "r = {r}");
            assert!(cmc_scalar_check(&Hypersurface::cylinder(&st, r), &c).is_err());
        }
    }

    #[test]
    fn scaled_mass_certificate() {
        let st = StaticSpacetime::schwarzschild(2.0);
        let c = certify_photon_surface(&Hypersurface::cylinder(&st, 6.0), &quick()).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!((c.mean_curvature.value - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((c.scalar.value - 1.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn lapse_level_cylinder_is_a_photon_sphere() {
        let st = StaticSpacetime::schwarzschild(1.0);
        let s = Hypersurface::lapse_cylinder(&st, 1.0 / 3f64.sqrt(), 3.0);
        let c = certify_photon_surface(&s, &quick()).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.photon_sphere);
    }

    #[test]
    fn charged_profile_agreement_and_general_formula() {
        let prof = RadialProfile::expression("sqrt(1 - 2/r + 0.1/r^2)", None, Some(1.0), 1.95).unwrap();
        let st = StaticSpacetime::new(prof);
        let r = locate_photon_sphere(&st.profile, (2.0, 50.0)).unwrap().r_ps.unwrap();
        let s = Hypersurface::cylinder(&st, r);
        let c = certify_photon_surface(&s, &quick()).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        let chk = cmc_scalar_check(&s, &c).unwrap();
        assert!(!chk.vacuum && chk.warning.is_some());
        for f in [0.8, 1.2] {
            let c = certify_photon_surface(&Hypersurface::cylinder(&st, r * f), &quick()).unwrap();
            assert_eq!(c.verdict, Verdict::Refuted);
        }
    }

    #[test]
    fn minkowski_cylinder_is_refuted_and_has_no_cmc_check() {
        let st = StaticSpacetime::new(RadialProfile::minkowski());
        let s = Hypersurface::cylinder(&st, 3.0);
        let c = certify_photon_surface(&s, &quick()).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        assert!(cmc_scalar_check(&s, &c).is_err());
    }

    #[test]
    fn non_cylinders_rejected() {
        let st = StaticSpacetime::schwarzschild(1.0);
        assert!(certify_photon_surface(&Hypersurface::sphere(&st, 3.0), &quick()).is_err());
        assert!(certify_photon_surface(&Hypersurface::time_slice(&st, 0.0), &quick()).is_err());
    }

    #[test]
    fn certificate_json_fields() {
        let st = StaticSpacetime::schwarzschild(1.0);
        let c = certify_photon_surface(&Hypersurface::cylinder(&st, 3.0), &quick()).unwrap();
        let v = c.to_json();
        for k in ["surface", "verdict", "umbilicity_sup", "mean_curvature", "scalar", "tangency", "tolerances"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["verdict"], "certified");
        assert!(v["scalar"]["expected"].as_f64().unwrap() > 0.222);
    }
}
