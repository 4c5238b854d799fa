//! Closed-form 3D sensing of a reflecting target from two single-bounce
//! NLoS paths of a mmWave link, plus the physical-layer simulator used to
//! evaluate it.
//!
//! The crate is split into:
//!
//! - [`geom`]: direction vectors, plane projection, scene classification and
//!   the two closed-form distance solvers.
//! - [`channel`]: UPA steering vectors, rank-one channel, Kronecker codebook,
//!   exhaustive beam sweep and auxiliary-beam angle refinement.
//! - [`measure`]: FTM-style ranging noise and the historical measurement table.
//! - [`sim`]: scenario synthesis, single trials and Monte Carlo sweeps.
//!
//! The geometric and channel cores are generic over the [`Scalar`] type
//! (`f32` or `f64`). The aliases below pin the `f64` instantiation used by the
//! simulator and the CLI.

pub mod channel;
pub mod geom;
pub mod measure;
pub mod scalar;
pub mod sim;
pub mod vector;

pub use scalar::Scalar;
pub use vector::Vec3;

pub type Real = f64;

pub type Point3 = vector::Vec3<Real>;
pub type Direction = geom::DirectionVector<Real>;
pub type Angles = geom::SphericalAngles<Real>;
pub type Plane = geom::ProjectionPlane<Real>;
pub type Observation = geom::PathObservation<Real>;
pub type Solution = geom::SolveResult<Real>;
pub type Tolerances = geom::Tolerances<Real>;
pub type Upa = channel::UpaGeometry<Real>;
pub type Beams = channel::Codebook<Real>;
pub type Channel = channel::ChannelRealization<Real>;
pub type Table = measure::MeasurementTable<Real>;
