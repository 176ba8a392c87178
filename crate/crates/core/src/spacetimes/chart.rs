use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{GeomError, Result};

/// Point of the static chart (t, r, θ, φ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ChartPoint {
    /// Validated constructor: r > 0, θ strictly inside (0, π), φ wrapped into [0, 2π).
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Result<Self> {
        if ![t, r, theta, phi].iter().all(|x| x.is_finite()) {
            return Err(GeomError::Domain("non-finite chart coordinate".into()));
        }
        if r <= 0.0 {
            return Err(GeomError::Domain(format!("r = {r} must be positive")));
        }
        if theta <= 0.0 || theta >= PI {
            return Err(GeomError::Domain(format!(
                "theta = {theta} must lie strictly inside (0, pi)"
            )));
        }
        Ok(Self {
            t,
            r,
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.r, self.theta, self.phi]
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.t, self.r, self.theta, self.phi]
    }

    pub fn from_coords(x: &[f64; 4]) -> Result<Self> {
        Self::new(x[0], x[1], x[2], x[3])
    }
}
