use crate::autodiff::Scalar;
use crate::error::{GeomError, Result};

/// Metric components as a function of chart coordinates, generic over the number type.
pub trait MetricField<const D: usize>: Sync {
    fn metric<S: Scalar>(&self, x: &[S; D]) -> [[S; D]; D];

    /// Domain check for a real point.
    fn check(&self, _x: &[f64; D]) -> Result<()> {
        Ok(())
    }

    /// False when `metric` only carries values, forcing finite differences.
    fn exact_derivatives(&self) -> bool {
        true
    }
}

/// Scalar field on a chart.
pub trait ScalarField<const D: usize>: Sync {
    fn value<S: Scalar>(&self, x: &[S; D]) -> S;

    fn check(&self, _x: &[f64; D]) -> Result<()> {
        Ok(())
    }
}

impl<T: MetricField<D>, const D: usize> MetricField<D> for &T {
    fn metric<S: Scalar>(&self, x: &[S; D]) -> [[S; D]; D] {
        (**self).metric(x)
    }
    fn check(&self, x: &[f64; D]) -> Result<()> {
        (**self).check(x)
    }
    fn exact_derivatives(&self) -> bool {
        (**self).exact_derivatives()
    }
}

impl<T: ScalarField<D>, const D: usize> ScalarField<D> for &T {
    fn value<S: Scalar>(&self, x: &[S; D]) -> S {
        (**self).value(x)
    }
    fn check(&self, x: &[f64; D]) -> Result<()> {
        (**self).check(x)
    }
}

/// The coordinate function x ↦ x^k.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl<const D: usize> ScalarField<D> for Coordinate {
    fn value<S: Scalar>(&self, x: &[S; D]) -> S {
        x[self.0]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl<const D: usize> ScalarField<D> for Constant {
    fn value<S: Scalar>(&self, _x: &[S; D]) -> S {
        S::cst(self.0)
    }
}

/// Flat metric δ in Cartesian coordinates.
#[derive(Clone, Copy, Debug, Default)]
pub struct EuclideanCartesian;

impl<const D: usize> MetricField<D> for EuclideanCartesian {
    fn metric<S: Scalar>(&self, _x: &[S; D]) -> [[S; D]; D] {
        std::array::from_fn(|i| std::array::from_fn(|j| S::cst(if i == j { 1.0 } else { 0.0 })))
    }
}

fn polar_check(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < std::f64::consts::PI {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("polar angle {theta} outside (0, pi)")))
    }
}

/// Flat 3-space in spherical coordinates (r, θ, φ).
#[derive(Clone, Copy, Debug, Default)]
pub struct FlatSpherical;

impl MetricField<3> for FlatSpherical {
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> [[S; 3]; 3] {
        let z = S::cst(0.0);
        let s = x[1].sin();
        [
            [S::cst(1.0), z, z],
            [z, x[0] * x[0], z],
            [z, z, x[0] * x[0] * s * s],
        ]
    }
    fn check(&self, x: &[f64; 3]) -> Result<()> {
        if x[0] <= 0.0 {
            return Err(GeomError::Domain("r must be positive".into()));
        }
        polar_check(x[1])
    }
}

/// Round 2-sphere of the given radius in (θ, φ).
#[derive(Clone, Copy, Debug)]
pub struct RoundSphere2 {
    pub radius: f64,
}

impl MetricField<2> for RoundSphere2 {
    fn metric<S: Scalar>(&self, x: &[S; 2]) -> [[S; 2]; 2] {
        let r2 = self.radius * self.radius;
        let s = x[0].sin();
        [[S::cst(r2), S::cst(0.0)], [S::cst(0.0), s * s * r2]]
    }
    fn check(&self, x: &[f64; 2]) -> Result<()> {
        polar_check(x[0])
    }
}

/// Round 3-sphere of the given radius in hyperspherical angles (χ, θ, φ).
#[derive(Clone, Copy, Debug)]
pub struct RoundSphere3 {
    pub radius: f64,
}

impl MetricField<3> for RoundSphere3 {
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> [[S; 3]; 3] {
        let r2 = self.radius * self.radius;
        let z = S::cst(0.0);
        let sc = x[0].sin();
        let st = x[1].sin();
        [
            [S::cst(r2), z, z],
            [z, sc * sc * r2, z],
            [z, z, sc * sc * st * st * r2],
        ]
    }
    fn check(&self, x: &[f64; 3]) -> Result<()> {
        polar_check(x[0])?;
        polar_check(x[1])
    }
}
