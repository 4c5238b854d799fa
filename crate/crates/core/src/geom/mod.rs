//! Geometric core: direction vectors, plane projection, clockwise angles,
//! scene classification and the closed-form distance solvers.
//!
//! Everything in here is a pure function of its inputs.

mod angles;
mod observation;
mod plane;
mod scene;
mod solver;

pub use angles::{angles_from_direction, direction_from_angles, DirectionVector, SphericalAngles};
pub use observation::PathObservation;
pub use plane::{clockwise_angle, project, reflex_reduce, ProjectionPlane};
pub use scene::{classify_scene, in_collinear_set, CollinearWith, SceneType};
pub use solver::{
    localize, solve, solve_collinear, solve_separate, PairGeometry, Sign, SolveResult,
    SolverIntermediates,
};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate projection: vector is (nearly) normal to the projection plane (|Pe| = {norm:e})")]
    DegenerateProjection { norm: f64 },
    #[error("zero-length in-plane vector")]
    ZeroVector,
    #[error("plane basis vectors are linearly dependent")]
    DependentBasis,
    #[error("invalid angles: azimuth {azimuth}, elevation {elevation}")]
    InvalidAngles { azimuth: f64, elevation: f64 },
    #[error("not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("unsolvable: collinear ({scene})")]
    Unsolvable { scene: SceneType },
    #[error("inconsistent geometry: {0}")]
    InconsistentGeometry(String),
    #[error("scene {0} is not handled by this solver")]
    WrongScene(SceneType),
}

/// Numerical tolerances of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Radius around `{0, π, 2π}` treated as collinear.
    pub col: T,
    /// Minimum `|P e|` before a projection is called degenerate.
    pub proj: T,
    /// Maximum relative residual of the path-length ratio relation.
    pub residual: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            col: T::lit(1e-6),
            proj: T::lit(1e-9),
            residual: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn with_col(mut self, col: T) -> Self {
        self.col = col;
        self
    }

    pub fn with_residual(mut self, residual: T) -> Self {
        self.residual = residual;
        self
    }
}
