//! Embedded hypersurfaces: normals, second fundamental forms, mean curvature,
//! trace-free parts and the Gauss and Codazzi equations.
//!
//! The workhorse is [`LevelSet`], a level set of a scalar field in a chart.
//! [`Hypersurface`] wraps the four embeddings used by the photon-sphere
//! argument behind one type addressed by [`ChartPoint`]s.

mod levelset;

pub use levelset::{
    central_derivative, orthonormal_basis, CodazziResidual, Frame, GaussResidual, InducedMetric,
    LevelSet, ShapeData,
};

use serde::{Deserialize, Serialize};

use crate::calculus::{Coordinate, MetricField, ScalarField};
use crate::error::{GeomError, Result};
use crate::spacetimes::{
    ChartPoint, LapseField, LapseField4, SpacetimeMetric, SpatialMetric, StaticSpacetime,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// {t = t₀} in the spacetime.
    TimeSlice,
    /// {r = r₀} × ℝ in the spacetime.
    Cylinder,
    /// {N = N₀} × ℝ in the spacetime.
    LapseCylinder,
    /// {N = N₀} in the time slice.
    LapseLevel,
    /// {r = r₀} in the time slice.
    Sphere,
    /// {t = t₀} inside the cylinder {r = r₀}.
    CylinderSlice,
}

/// Object-safe view of a [`LevelSet`] with slice-based points.
pub trait SurfaceOps: Send + Sync {
    fn ambient_dim(&self) -> usize;
    fn project(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn shape(&self, x: &[f64]) -> Result<ShapeData>;
    fn gauss(&self, x: &[f64]) -> Result<GaussResidual>;
    fn codazzi(&self, x: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> Result<CodazziResidual>;
    fn intrinsic_scalar(&self, x: &[f64]) -> Result<f64>;
    fn orthonormal_tangents(&self, x: &[f64]) -> Result<Vec<Vec<f64>>>;
    fn induced_metric(&self, x: &[f64]) -> Result<Vec<Vec<f64>>>;
    fn umbilic_codazzi(&self, x: &[f64]) -> Result<f64>;
}

fn arr<const D: usize>(x: &[f64]) -> Result<[f64; D]> {
    x.try_into()
        .map_err(|_| GeomError::Rejected(format!("expected {D} coordinates, got {}", x.len())))
}

impl<M, F, const D: usize, const E: usize> SurfaceOps for LevelSet<M, F, D, E>
where
    M: MetricField<D> + Clone + Send,
    F: ScalarField<D> + Clone + Send,
{
    fn ambient_dim(&self) -> usize {
        D
    }
    fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(LevelSet::project(self, &arr::<D>(x)?)?.to_vec())
    }
    fn shape(&self, x: &[f64]) -> Result<ShapeData> {
        LevelSet::shape(self, &LevelSet::project(self, &arr::<D>(x)?)?)
    }
    fn gauss(&self, x: &[f64]) -> Result<GaussResidual> {
        self.gauss_residual(&arr::<D>(x)?)
    }
    fn codazzi(&self, x: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> Result<CodazziResidual> {
        self.codazzi_residual(&arr::<D>(x)?, &arr::<D>(a)?, &arr::<D>(b)?, &arr::<D>(c)?)
    }
    fn intrinsic_scalar(&self, x: &[f64]) -> Result<f64> {
        LevelSet::intrinsic_scalar(self, &arr::<D>(x)?)
    }
    fn orthonormal_tangents(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let x = LevelSet::project(self, &arr::<D>(x)?)?;
        Ok(LevelSet::orthonormal_tangents(self, &x)?
            .into_iter()
            .map(|v| v.to_vec())
            .collect())
    }
    fn induced_metric(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let x = LevelSet::project(self, &arr::<D>(x)?)?;
        let g = self.induced(&x).values(&self.intrinsic(&x))?;
        Ok(g.iter().map(|r| r.to_vec()).collect())
    }
    fn umbilic_codazzi(&self, x: &[f64]) -> Result<f64> {
        self.umbilic_codazzi_residual(&arr::<D>(x)?)
    }
}

/// One of the embeddings of the photon-sphere argument in a static spacetime.
pub struct Hypersurface<'a> {
    pub kind: SurfaceKind,
    /// Level value: t₀, r₀ or N₀ depending on the kind.
    pub parameter: f64,
    pub spacetime: &'a StaticSpacetime,
    ops: Box<dyn SurfaceOps + 'a>,
}

type CylinderSet<'a> = LevelSet<SpacetimeMetric<'a>, Coordinate, 4, 3>;

impl<'a> Hypersurface<'a> {
    pub fn time_slice(st: &'a StaticSpacetime, t0: f64) -> Self {
        let ls: CylinderSet<'a> = LevelSet::new(st.spacetime(), Coordinate(0), t0, 0, 0, t0);
        Self {
            kind: SurfaceKind::TimeSlice,
            parameter: t0,
            spacetime: st,
            ops: Box::new(ls),
        }
    }

    pub fn cylinder(st: &'a StaticSpacetime, r0: f64) -> Self {
        Self {
            kind: SurfaceKind::Cylinder,
            parameter: r0,
            spacetime: st,
            ops: Box::new(Self::cylinder_set(st, r0)),
        }
    }

    fn cylinder_set(st: &'a StaticSpacetime, r0: f64) -> CylinderSet<'a> {
        LevelSet::new(st.spacetime(), Coordinate(1), r0, 1, 1, r0)
    }

    /// {N = N₀} × ℝ; `r_guess` seeds the radial projection.
    pub fn lapse_cylinder(st: &'a StaticSpacetime, n0: f64, r_guess: f64) -> Self {
        let ls: LevelSet<SpacetimeMetric<'a>, LapseField4<'a>, 4, 3> =
            LevelSet::new(st.spacetime(), st.lapse_field4(), n0, 1, 1, r_guess);
        Self {
            kind: SurfaceKind::LapseCylinder,
            parameter: n0,
            spacetime: st,
            ops: Box::new(ls),
        }
    }

    pub fn lapse_level(st: &'a StaticSpacetime, n0: f64, r_guess: f64) -> Self {
        let ls: LevelSet<SpatialMetric<'a>, LapseField<'a>, 3, 2> =
            LevelSet::new(st.spatial(), st.lapse_field(), n0, 0, 0, r_guess);
        Self {
            kind: SurfaceKind::LapseLevel,
            parameter: n0,
            spacetime: st,
            ops: Box::new(ls),
        }
    }

    pub fn sphere(st: &'a StaticSpacetime, r0: f64) -> Self {
        let ls: LevelSet<SpatialMetric<'a>, Coordinate, 3, 2> =
            LevelSet::new(st.spatial(), Coordinate(0), r0, 0, 0, r0);
        Self {
            kind: SurfaceKind::Sphere,
            parameter: r0,
            spacetime: st,
            ops: Box::new(ls),
        }
    }

    /// {t = t₀} inside the cylinder {r = r₀}, with future-pointing normal.
    pub fn cylinder_slice(st: &'a StaticSpacetime, r0: f64, t0: f64) -> Self {
        let cyl = Self::cylinder_set(st, r0);
        let induced = InducedMetric {
            surface: cyl,
            guess: r0,
        };
        let ls: LevelSet<InducedMetric<SpacetimeMetric<'a>, Coordinate, 4, 3>, Coordinate, 3, 2> =
            LevelSet::new(induced, Coordinate(0), t0, 0, 0, t0);
        Self {
            kind: SurfaceKind::CylinderSlice,
            parameter: r0,
            spacetime: st,
            ops: Box::new(ls),
        }
    }

    /// Ambient chart coordinates of a chart point for this surface.
    pub fn coords(&self, p: &ChartPoint) -> Vec<f64> {
        match self.kind {
            SurfaceKind::TimeSlice | SurfaceKind::Cylinder | SurfaceKind::LapseCylinder => {
                p.coords().to_vec()
            }
            SurfaceKind::LapseLevel | SurfaceKind::Sphere => p.spatial().to_vec(),
            SurfaceKind::CylinderSlice => vec![p.t, p.theta, p.phi],
        }
    }

    pub fn ops(&self) -> &dyn SurfaceOps {
        self.ops.as_ref()
    }

    /// Project a chart point onto the surface.
    pub fn project(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        self.ops.project(&self.coords(p))
    }

    pub fn shape(&self, p: &ChartPoint) -> Result<ShapeData> {
        self.ops.shape(&self.coords(p))
    }

    pub fn gauss_residual(&self, p: &ChartPoint) -> Result<GaussResidual> {
        self.ops.gauss(&self.coords(p))
    }

    /// Codazzi residual; X, Y, Z in ambient chart components.
    pub fn codazzi_residual(&self, p: &ChartPoint, x: &[f64], y: &[f64], z: &[f64]) -> Result<CodazziResidual> {
        let q = self.ops.project(&self.coords(p))?;
        self.ops.codazzi(&q, x, y, z)
    }

    pub fn intrinsic_scalar(&self, p: &ChartPoint) -> Result<f64> {
        self.ops.intrinsic_scalar(&self.coords(p))
    }

    pub fn orthonormal_tangents(&self, p: &ChartPoint) -> Result<Vec<Vec<f64>>> {
        self.ops.orthonormal_tangents(&self.coords(p))
    }

    pub fn induced_metric(&self, p: &ChartPoint) -> Result<Vec<Vec<f64>>> {
        self.ops.induced_metric(&self.coords(p))
    }

    pub fn umbilic_codazzi_residual(&self, p: &ChartPoint) -> Result<f64> {
        self.ops.umbilic_codazzi(&self.coords(p))
    }

    pub fn label(&self) -> String {
        let name = match self.kind {
            SurfaceKind::TimeSlice => "t",
            SurfaceKind::Cylinder | SurfaceKind::Sphere | SurfaceKind::CylinderSlice => "r",
            SurfaceKind::LapseCylinder | SurfaceKind::LapseLevel => "N",
        };
        format!("{:?}{{{name}={}}}", self.kind, self.parameter)
    }
}
