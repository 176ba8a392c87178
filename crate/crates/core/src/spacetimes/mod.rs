//! Charts, the Schwarzschild family and user-supplied static metrics.

mod asymptotics;
mod chart;
mod expr;
mod profile;
mod spline;

pub use asymptotics::{asymptotics_fit, AsymptoticReport, FitStatus};
pub use chart::ChartPoint;
pub use expr::Expr;
pub use profile::{
    assemble_static, schwarzschild, LapseField, LapseField4, LapsePerturbation, ProfileKind,
    ProfileSpec, ProfileTag, RadialFn, RadialProfile, SpacetimeMetric, SpatialMetric,
    StaticSpacetime, HORIZON_EDGE,
};
pub use spline::CubicSpline;

use crate::autodiff::Scalar;
use crate::calculus::{MetricField, ScalarField};
use crate::error::Result;

impl MetricField<3> for SpatialMetric<'_> {
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> [[S; 3]; 3] {
        self.0.spatial_metric(x)
    }
    fn check(&self, x: &[f64; 3]) -> Result<()> {
        self.0.check_spatial(x)
    }
}

impl MetricField<4> for SpacetimeMetric<'_> {
    fn metric<S: Scalar>(&self, x: &[S; 4]) -> [[S; 4]; 4] {
        self.0.metric4(x)
    }
    fn check(&self, x: &[f64; 4]) -> Result<()> {
        self.0.check_spatial(&[x[1], x[2], x[3]])
    }
}

impl ScalarField<3> for LapseField<'_> {
    fn value<S: Scalar>(&self, x: &[S; 3]) -> S {
        self.0.lapse(x)
    }
    fn check(&self, x: &[f64; 3]) -> Result<()> {
        self.0.check_spatial(x)
    }
}

impl ScalarField<4> for LapseField4<'_> {
    fn value<S: Scalar>(&self, x: &[S; 4]) -> S {
        self.0.lapse(&[x[1], x[2], x[3]])
    }
    fn check(&self, x: &[f64; 4]) -> Result<()> {
        self.0.check_spatial(&[x[1], x[2], x[3]])
    }
}
