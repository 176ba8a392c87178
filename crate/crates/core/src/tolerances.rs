use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Numerical tolerances, all on unit-mass-scaled quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Differentiation and curvature identities.
    pub diff: f64,
    /// Null constraint and energy law along geodesics.
    pub null: f64,
    /// Photon-surface certificates.
    pub cert: f64,
    /// Per-level foliation identities and integrated slacks.
    pub lvl: f64,
    /// Distance from the surface along traced seeds.
    pub traj: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            diff: 1e-6,
            null: 1e-9,
            cert: 1e-7,
            lvl: 1e-5,
            traj: 1e-5,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("diff", self.diff),
            ("null", self.null),
            ("cert", self.cert),
            ("lvl", self.lvl),
            ("traj", self.traj),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeomError::Rejected(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
