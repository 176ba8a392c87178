//! Scenario files: a versioned JSON description of one verification run.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::israel::IsraelConfig;
use crate::spacetimes::{LapsePerturbation, ProfileSpec};
use crate::tolerances::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Trace,
    Detect,
    Certify,
    Israel,
    Reconstruct,
    Full,
}

impl Pipeline {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pipeline::Trace => "trace",
            Pipeline::Detect => "detect",
            Pipeline::Certify => "certify",
            Pipeline::Israel => "israel",
            Pipeline::Reconstruct => "reconstruct",
            Pipeline::Full => "full",
        }
    }
}

/// Surface referenced by kind and parameter. Radii are in absolute units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    /// The cylinder over the located photon sphere.
    PhotonSphere,
    Cylinder { r: f64 },
    LapseCylinder { n0: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicSettings {
    pub seeds: usize,
    /// Affine length of every traced seed.
    pub span: f64,
    /// Surface points sampled by the certificate.
    pub samples: usize,
}

impl Default for GeodesicSettings {
    fn default() -> Self {
        Self {
            seeds: 32,
            span: 100.0,
            samples: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsraelSettings {
    pub levels: usize,
    /// Nodes in cos θ and in φ.
    pub quad: [usize; 2],
    pub outer_radius: f64,
    pub tail: bool,
    pub n0: Option<f64>,
    pub doubling: bool,
}

impl Default for IsraelSettings {
    fn default() -> Self {
        let c = IsraelConfig::default();
        Self {
            levels: c.levels,
            quad: [c.n_theta, c.n_phi],
            outer_radius: c.outer_radius,
            tail: c.tail,
            n0: c.n0,
            doubling: c.doubling,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    pub pipeline: Pipeline,
    /// Named seed for every random draw of the run.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    /// Profile JSON stored next to the scenario; exclusive with `profile`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<LapsePerturbation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub geodesics: GeodesicSettings,
    #[serde(default)]
    pub israel: IsraelSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output directory, relative to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_seed() -> u64 {
    0x5eed
}

/// Where a scenario went wrong: 1-based line and column when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, ":{l}:{c}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ScenarioError {}

/// Position of the first `"key"` in the source, for diagnostics raised after parsing.
fn locate(src: &str, key: &str) -> (Option<usize>, Option<usize>) {
    let needle = format!("\"{key}\"");
    match src.find(&needle) {
        Some(off) => {
            let before = &src[..off];
            let line = before.matches('\n').count() + 1;
            let col = off - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (Some(line), Some(col))
        }
        None => (None, None),
    }
}

impl Scenario {
    /// Parse and validate; `path` is used for diagnostics and to resolve `profile_file`.
    pub fn parse(src: &str, path: &Path) -> Result<Self, ScenarioError> {
        let sc: Scenario = serde_json::from_str(src).map_err(|e| ScenarioError {
            path: path.to_path_buf(),
            line: Some(e.line()),
            column: Some(e.column()),
            field: None,
            message: {
                let m = e.to_string();
                let suffix = format!(" at line {} column {}", e.line(), e.column());
                m.strip_suffix(&suffix).map(str::to_string).unwrap_or(m)
            },
        })?;
        let fail = |field: &str, key: &str, message: String| {
            let (line, column) = locate(src, key);
            ScenarioError {
                path: path.to_path_buf(),
                line,
                column,
                field: Some(field.to_string()),
                message,
            }
        };
        if sc.schema != SCHEMA_VERSION {
            return Err(fail(
                "schema",
                "schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", sc.schema),
            ));
        }
        match (&sc.profile, &sc.profile_file) {
            (Some(_), Some(_)) => {
                return Err(fail("profile_file", "profile_file", "give either `profile` or `profile_file`".into()))
            }
            (None, None) => return Err(fail("profile", "name", "a profile is required".into())),
            (None, Some(f)) => {
                let full = sc.resolve(path, f);
                if !full.is_file() {
                    return Err(fail(
                        "profile_file",
                        "profile_file",
                        format!("referenced file {} does not exist", full.display()),
                    ));
                }
            }
            _ => {}
        }
        for (name, v) in [
            ("diff", sc.tolerances.diff),
            ("null", sc.tolerances.null),
            ("cert", sc.tolerances.cert),
            ("lvl", sc.tolerances.lvl),
            ("traj", sc.tolerances.traj),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(fail(
                    &format!("tolerances.{name}"),
                    name,
                    format!("tolerance overrides must be positive, got {v}"),
                ));
            }
        }
        let g = &sc.geodesics;
        if g.seeds == 0 || g.samples == 0 || !(g.span.is_finite() && g.span > 0.0) {
            return Err(fail(
                "geodesics",
                "geodesics",
                "seeds and samples must be positive and span finite and positive".into(),
            ));
        }
        let i = &sc.israel;
        if i.quad[0] < 2 || i.quad[1] < 2 || !(i.outer_radius.is_finite() && i.outer_radius > 0.0) {
            return Err(fail(
                "israel",
                "israel",
                "quadrature orders must be at least 2 and outer_radius positive".into(),
            ));
        }
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let src = std::fs::read_to_string(path).map_err(|e| ScenarioError {
            path: path.to_path_buf(),
            line: None,
            column: None,
            field: None,
            message: format!("cannot read scenario: {e}"),
        })?;
        Self::parse(&src, path)
    }

    fn resolve(&self, scenario_path: &Path, f: &Path) -> PathBuf {
        if f.is_absolute() {
            f.to_path_buf()
        } else {
            scenario_path.parent().unwrap_or(Path::new(".")).join(f)
        }
    }

    /// The profile spec, reading `profile_file` relative to the scenario.
    pub fn profile_spec(&self, scenario_path: &Path) -> crate::Result<ProfileSpec> {
        if let Some(p) = &self.profile {
            return Ok(p.clone());
        }
        let f = self
            .profile_file
            .as_ref()
            .ok_or_else(|| crate::GeomError::Parse("scenario has no profile".into()))?;
        let full = self.resolve(scenario_path, f);
        let src = std::fs::read_to_string(&full)
            .map_err(|e| crate::GeomError::Parse(format!("cannot read {}: {e}", full.display())))?;
        ProfileSpec::from_json(&src)
    }

    pub fn israel_config(&self) -> IsraelConfig {
        IsraelConfig {
            levels: self.israel.levels,
            n_theta: self.israel.quad[0],
            n_phi: self.israel.quad[1],
            outer_radius: self.israel.outer_radius,
            tail: self.israel.tail,
            n0: self.israel.n0,
            doubling: self.israel.doubling,
            seed: self.seed,
            tolerances: self.tolerances,
        }
    }
}
