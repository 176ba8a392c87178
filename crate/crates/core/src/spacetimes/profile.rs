use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use super::expr::Expr;
use super::spline::CubicSpline;
use crate::autodiff::Scalar;
use crate::error::{GeomError, Result};

/// Radial function known through second order: `r -> [f, f', f'']`.
pub type RadialFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

#[derive(Clone)]
pub enum ProfileKind {
    Schwarzschild { m: f64 },
    Table { lapse: CubicSpline, grr: CubicSpline },
    Expression { lapse: Expr, grr: Option<Expr> },
    Custom { lapse: RadialFn, grr: RadialFn },
}

/// Lapse N(r) and radial factor g_rr(r) of `-N² dt² + g_rr dr² + r² Ω`.
#[derive(Clone)]
pub struct RadialProfile {
    kind: ProfileKind,
    r_min: f64,
    r_max: f64,
    mass_hint: Option<f64>,
    label: String,
}

/// Relative distance from r = 2m below which evaluation is refused.
pub const HORIZON_EDGE: f64 = 1e-9;

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("r_min", &self.r_min)
            .field("r_max", &self.r_max)
            .field("mass_hint", &self.mass_hint)
            .finish()
    }
}

impl RadialProfile {
    pub fn schwarzschild(m: f64) -> Self {
        Self {
            kind: ProfileKind::Schwarzschild { m },
            r_min: if m > 0.0 { 2.0 * m } else { 0.0 },
            r_max: f64::INFINITY,
            mass_hint: Some(m),
            label: format!("schwarzschild(m={m})"),
        }
    }

    pub fn minkowski() -> Self {
        let mut p = Self::schwarzschild(0.0);
        p.label = "minkowski".into();
        p
    }

    /// Cubic-spline table of `(r, N, g_rr)` samples, strictly increasing in r.
    pub fn table(samples: &[[f64; 3]], mass_hint: Option<f64>) -> Result<Self> {
        if samples.iter().any(|s| s[1] <= 0.0 || s[2] <= 0.0) {
            return Err(GeomError::Rejected(
                "table lapse and g_rr samples must be positive".into(),
            ));
        }
        let r: Vec<f64> = samples.iter().map(|s| s[0]).collect();
        let lapse = CubicSpline::new(r.clone(), samples.iter().map(|s| s[1]).collect())?;
        let grr = CubicSpline::new(r, samples.iter().map(|s| s[2]).collect())?;
        let (lo, hi) = lapse.domain();
        Ok(Self {
            kind: ProfileKind::Table { lapse, grr },
            r_min: lo,
            r_max: hi,
            mass_hint,
            label: format!("table({} samples)", samples.len()),
        })
    }

    /// Closed-form expressions in r; `g_rr` defaults to `1/N²`.
    pub fn expression(lapse: &str, grr: Option<&str>, mass: Option<f64>, r_min: f64) -> Result<Self> {
        let l = Expr::parse(lapse, mass)?;
        let g = grr.map(|s| Expr::parse(s, mass)).transpose()?;
        Ok(Self {
            kind: ProfileKind::Expression { lapse: l, grr: g },
            r_min: r_min.max(0.0),
            r_max: f64::INFINITY,
            mass_hint: mass,
            label: format!("expression(N = {lapse})"),
        })
    }

    pub fn custom(lapse: RadialFn, grr: RadialFn, r_min: f64, mass_hint: Option<f64>, label: &str) -> Self {
        Self {
            kind: ProfileKind::Custom { lapse, grr },
            r_min: r_min.max(0.0),
            r_max: f64::INFINITY,
            mass_hint,
            label: label.to_string(),
        }
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mass_hint(&self) -> Option<f64> {
        self.mass_hint
    }

    /// Open interval (r_min, r_max] on which the profile may be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    /// Smallest admissible radius, including the horizon edge margin.
    pub fn r_floor(&self) -> f64 {
        match self.kind {
            ProfileKind::Schwarzschild { m } if m > 0.0 => 2.0 * m * (1.0 + HORIZON_EDGE),
            ProfileKind::Table { .. } => self.r_min,
            _ => self.r_min,
        }
    }

    pub fn check(&self, r: f64) -> Result<()> {
        if !r.is_finite() || r <= 0.0 {
            return Err(GeomError::Domain(format!("r = {r} is not a positive radius")));
        }
        let inside = match self.kind {
            ProfileKind::Schwarzschild { m } if m > 0.0 => r - 2.0 * m > HORIZON_EDGE * m,
            ProfileKind::Table { .. } => r >= self.r_min && r <= self.r_max,
            _ => r > self.r_min,
        };
        if !inside {
            return Err(GeomError::Domain(format!(
                "r = {r} outside the domain of {}",
                self.label
            )));
        }
        let n = self.lapse(r);
        let g = self.grr(r);
        if !(n.is_finite() && n > 0.0 && g.is_finite() && g > 0.0) {
            return Err(GeomError::Domain(format!(
                "{} gives N = {n}, g_rr = {g} at r = {r}",
                self.label
            )));
        }
        Ok(())
    }

    pub fn lapse<S: Scalar>(&self, r: S) -> S {
        match &self.kind {
            ProfileKind::Schwarzschild { m } => (-(r.recip() * (2.0 * m)) + 1.0).sqrt(),
            ProfileKind::Table { lapse, .. } => {
                let [v, d, dd] = lapse.eval(r.re());
                r.chain(v, d, dd)
            }
            ProfileKind::Expression { lapse, .. } => lapse.eval(r),
            ProfileKind::Custom { lapse, .. } => {
                let [v, d, dd] = lapse(r.re());
                r.chain(v, d, dd)
            }
        }
    }

    pub fn grr<S: Scalar>(&self, r: S) -> S {
        match &self.kind {
            ProfileKind::Schwarzschild { m } => (-(r.recip() * (2.0 * m)) + 1.0).recip(),
            ProfileKind::Table { grr, .. } => {
                let [v, d, dd] = grr.eval(r.re());
                r.chain(v, d, dd)
            }
            ProfileKind::Expression { lapse, grr } => match grr {
                Some(g) => g.eval(r),
                None => {
                    let n = lapse.eval(r);
                    (n * n).recip()
                }
            },
            ProfileKind::Custom { grr, .. } => {
                let [v, d, dd] = grr(r.re());
                r.chain(v, d, dd)
            }
        }
    }

    /// `[N, N', N'']` at r.
    pub fn lapse_jet(&self, r: f64) -> [f64; 3] {
        self.lapse(crate::autodiff::Jet::<1>::var(r, 0)).triple()
    }

    pub fn grr_jet(&self, r: f64) -> [f64; 3] {
        self.grr(crate::autodiff::Jet::<1>::var(r, 0)).triple()
    }
}

/// Synthetic lapse perturbation `ε P₂(cos θ) / r^k` (non-vacuum test data).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LapsePerturbation {
    pub epsilon: f64,
    pub power: f64,
}

/// Static spacetime `-N² dt² + g` on the chart (t, r, θ, φ).
#[derive(Clone, Debug)]
pub struct StaticSpacetime {
    pub profile: RadialProfile,
    pub perturbation: Option<LapsePerturbation>,
}

impl StaticSpacetime {
    pub fn new(profile: RadialProfile) -> Self {
        Self {
            profile,
            perturbation: None,
        }
    }

    pub fn schwarzschild(m: f64) -> Self {
        Self::new(RadialProfile::schwarzschild(m))
    }

    pub fn with_perturbation(mut self, p: LapsePerturbation) -> Self {
        self.perturbation = Some(p);
        self
    }

    pub fn mass_hint(&self) -> Option<f64> {
        self.profile.mass_hint()
    }

    /// Length scale for normalising curvature quantities: |m| when known and nonzero.
    pub fn length_scale(&self) -> f64 {
        match self.profile.mass_hint() {
            Some(m) if m != 0.0 => m.abs(),
            _ => 1.0,
        }
    }

    pub fn is_radial(&self) -> bool {
        self.perturbation.map_or(true, |p| p.epsilon == 0.0)
    }

    pub fn check_spatial(&self, x: &[f64; 3]) -> Result<()> {
        if !(x[1] > 0.0 && x[1] < std::f64::consts::PI) {
            return Err(GeomError::Domain(format!(
                "theta = {} must lie strictly inside (0, pi)",
                x[1]
            )));
        }
        self.profile.check(x[0])?;
        let n = self.lapse(x);
        if !(n.is_finite() && n > 0.0) {
            return Err(GeomError::Domain(format!("lapse {n} not positive at r = {}", x[0])));
        }
        Ok(())
    }

    /// Lapse at spatial point (r, θ, φ).
    pub fn lapse<S: Scalar>(&self, x: &[S; 3]) -> S {
        let base = self.profile.lapse(x[0]);
        match self.perturbation {
            Some(p) if p.epsilon != 0.0 => {
                let c = x[1].cos();
                let p2 = (c * c * 3.0 - 1.0) * 0.5;
                base + p2 * x[0].powf(-p.power) * p.epsilon
            }
            _ => base,
        }
    }

    /// Spatial metric diag(g_rr, r², r² sin²θ).
    pub fn spatial_metric<S: Scalar>(&self, x: &[S; 3]) -> [[S; 3]; 3] {
        let z = S::cst(0.0);
        let r2 = x[0] * x[0];
        let s = x[1].sin();
        [
            [self.profile.grr(x[0]), z, z],
            [z, r2, z],
            [z, z, r2 * s * s],
        ]
    }

    /// Block metric `-N² dt² + g` at (t, r, θ, φ).
    pub fn metric4<S: Scalar>(&self, x: &[S; 4]) -> [[S; 4]; 4] {
        let xs = [x[1], x[2], x[3]];
        let n = self.lapse(&xs);
        let g = self.spatial_metric(&xs);
        let z = S::cst(0.0);
        let mut out = [[z; 4]; 4];
        out[0][0] = -(n * n);
        for i in 0..3 {
            for j in 0..3 {
                out[i + 1][j + 1] = g[i][j];
            }
        }
        out
    }

    pub fn spatial(&self) -> SpatialMetric<'_> {
        SpatialMetric(self)
    }

    pub fn spacetime(&self) -> SpacetimeMetric<'_> {
        SpacetimeMetric(self)
    }

    pub fn lapse_field(&self) -> LapseField<'_> {
        LapseField(self)
    }

    pub fn lapse_field4(&self) -> LapseField4<'_> {
        LapseField4(self)
    }
}

/// The 3-metric g of the time slice as a metric field on (r, θ, φ).
#[derive(Clone, Copy)]
pub struct SpatialMetric<'a>(pub &'a StaticSpacetime);

/// The 4-metric on (t, r, θ, φ).
#[derive(Clone, Copy)]
pub struct SpacetimeMetric<'a>(pub &'a StaticSpacetime);

/// N as a scalar field on (r, θ, φ).
#[derive(Clone, Copy)]
pub struct LapseField<'a>(pub &'a StaticSpacetime);

/// N as a scalar field on (t, r, θ, φ).
#[derive(Clone, Copy)]
pub struct LapseField4<'a>(pub &'a StaticSpacetime);

/// Schwarzschild metric components in the chart (t, r, θ, φ).
pub fn schwarzschild(m: f64, p: &super::ChartPoint) -> Result<[[f64; 4]; 4]> {
    let r = p.r;
    if !(r > 0.0) || (m > 0.0 && r - 2.0 * m <= HORIZON_EDGE * m) {
        return Err(GeomError::Rejected(format!(
            "r = {r} outside the Schwarzschild domain for m = {m}"
        )));
    }
    let u = 1.0 - 2.0 * m / r;
    let n = u.sqrt();
    let s = p.theta.sin();
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -(n * n);
    g[1][1] = 1.0 / u;
    g[2][2] = r * r;
    g[3][3] = r * r * s * s;
    Ok(g)
}

/// Assemble `-N² dt² + g_rr dr² + r² Ω` from a radial profile.
pub fn assemble_static(profile: &RadialProfile, p: &super::ChartPoint) -> Result<[[f64; 4]; 4]> {
    profile
        .check(p.r)
        .map_err(|e| GeomError::Rejected(e.to_string()))?;
    let st = StaticSpacetime::new(profile.clone());
    let g = st.metric4(&p.coords());
    if g.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeomError::Rejected("non-finite metric component".into()));
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileTag {
    Schwarzschild,
    Table,
    Expression,
}

/// JSON description of a profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lapse: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_rr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
}

impl ProfileSpec {
    pub fn schwarzschild(m: f64) -> Self {
        Self {
            kind: ProfileTag::Schwarzschild,
            m: Some(m),
            samples: None,
            lapse: None,
            g_rr: None,
            r_min: None,
        }
    }

    pub fn build(&self) -> Result<RadialProfile> {
        match self.kind {
            ProfileTag::Schwarzschild => {
                let m = self
                    .m
                    .ok_or_else(|| GeomError::Parse("field `m` required for kind schwarzschild".into()))?;
                if !m.is_finite() {
                    return Err(GeomError::Parse("field `m` must be finite".into()));
                }
                Ok(if m == 0.0 {
                    RadialProfile::minkowski()
                } else {
                    RadialProfile::schwarzschild(m)
                })
            }
            ProfileTag::Table => {
                let samples = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| GeomError::Parse("field `samples` required for kind table".into()))?;
                RadialProfile::table(samples, self.m)
            }
            ProfileTag::Expression => {
                let lapse = self
                    .lapse
                    .as_deref()
                    .ok_or_else(|| GeomError::Parse("field `lapse` required for kind expression".into()))?;
                RadialProfile::expression(lapse, self.g_rr.as_deref(), self.m, self.r_min.unwrap_or(0.0))
            }
        }
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| GeomError::Parse(e.to_string()))
    }
}
