//! Tensor calculus on charts: metric derivatives, connection, curvature,
//! covariant Hessians and residuals of the static vacuum equations.

mod curvature;
mod derivs;
mod fields;
mod split;
mod vacuum;

pub use curvature::{
    christoffel, christoffel_from, contract_ricci, covariant_hessian, curvature, curvature_from,
    scalar_geometry, Christoffel, CurvatureBundle, Riemann, ScalarGeometry,
};
pub use derivs::{fd_jet, metric_derivs, scalar_derivs, step_first, step_second, FdJet, MetricDerivs, Scheme};
pub use fields::{
    Constant, Coordinate, EuclideanCartesian, FlatSpherical, MetricField, RoundSphere2,
    RoundSphere3, ScalarField,
};
pub use split::{laplacian_split_residual, SplitResidual};
pub use vacuum::{kulkarni_reconstruct, vacuum_residual, KulkarniResult, VacuumResidual};
