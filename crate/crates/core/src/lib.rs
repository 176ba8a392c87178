//! Static spacetime geometry, null geodesics and the photon-sphere rigidity
//! pipeline, checked numerically against closed forms.
//!
//! Modules, bottom up:
//! - [`spacetimes`]: charts, radial profiles, assembled metrics.
//! - [`calculus`]: connection, curvature, static vacuum residuals.
//! - [`hypersurfaces`]: second fundamental forms, Gauss and Codazzi checks.
//! - [`geodesics`]: null geodesic integration and energy monitoring.
//! - [`photon`]: photon-sphere location and certification.
//! - [`israel`]: lapse foliation, identities, inequalities, reconstruction.
//! - [`cli`]: scenario files and the `photon` binary front end.

pub mod autodiff;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod geodesics;
pub mod hypersurfaces;
pub mod israel;
pub mod linalg;
pub mod photon;
pub mod spacetimes;
pub mod tolerances;

pub use error::{GeomError, Result};
pub use tolerances::Tolerances;
