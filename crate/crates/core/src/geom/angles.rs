use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::scalar::wrap_pi;
use crate::{Scalar, Vec3};

/// Azimuth/elevation pair. Elevation is measured from the +z axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalAngles<T> {
    pub azimuth: T,
    pub elevation: T,
}

impl<T: Scalar> SphericalAngles<T> {
    /// Validated constructor: `elevation ∈ [0, π]`, `azimuth ∈ [-π, π]`.
    pub fn new(azimuth: T, elevation: T) -> Result<Self, GeomError> {
        let pi = T::PI();
        if !(elevation >= T::zero() && elevation <= pi && azimuth >= -pi && azimuth <= pi) {
            return Err(GeomError::InvalidAngles {
                azimuth: azimuth.to_f64().unwrap_or(f64::NAN),
                elevation: elevation.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { azimuth, elevation })
    }

    /// Wraps the azimuth into `(-π, π]` and clamps the elevation into `[0, π]`.
    pub fn wrapped(azimuth: T, elevation: T) -> Self {
        Self {
            azimuth: wrap_pi(azimuth),
            elevation: elevation.max(T::zero()).min(T::PI()),
        }
    }

    pub fn direction(&self) -> DirectionVector<T> {
        direction_from_angles(*self)
    }
}

/// Unit-norm direction in the common reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DirectionVector<T>(Vec3<T>);

impl<T: Scalar> DirectionVector<T> {
    /// Accepts `v` if its norm is within `1e-9` of one (renormalising it), else
    /// reports [`GeomError::NotUnit`].
    pub fn try_new(v: Vec3<T>) -> Result<Self, GeomError> {
        let n = v.norm();
        if (n - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(16.0)) {
            return Err(GeomError::NotUnit {
                norm: n.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self(v / n))
    }

    /// Direction of an arbitrary nonzero vector.
    pub fn from_vector(v: Vec3<T>) -> Result<Self, GeomError> {
        v.normalized().map(Self).ok_or(GeomError::ZeroVector)
    }

    pub fn between(from: Vec3<T>, to: Vec3<T>) -> Result<Self, GeomError> {
        Self::from_vector(to - from)
    }

    pub fn vector(&self) -> Vec3<T> {
        self.0
    }

    pub fn x(&self) -> T {
        self.0.x
    }

    pub fn y(&self) -> T {
        self.0.y
    }

    pub fn z(&self) -> T {
        self.0.z
    }

    /// Angle between two directions, in `[0, π]`.
    pub fn angle_to(&self, other: &Self) -> T {
        // atan2 form stays accurate near 0 and π
        let c = self.0.dot(other.0);
        let s = self.0.cross(other.0).norm();
        s.atan2(c)
    }

    pub fn angles(&self) -> SphericalAngles<T> {
        angles_from_direction(*self)
    }
}

impl<T: Scalar> std::ops::Neg for DirectionVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

/// `(sin θ cos φ, sin θ sin φ, cos θ)`.
pub fn direction_from_angles<T: Scalar>(a: SphericalAngles<T>) -> DirectionVector<T> {
    let (st, ct) = a.elevation.sin_cos();
    let (sp, cp) = a.azimuth.sin_cos();
    DirectionVector(Vec3::new(st * cp, st * sp, ct))
}

/// Inverse of [`direction_from_angles`]. The azimuth at the poles is 0.
pub fn angles_from_direction<T: Scalar>(e: DirectionVector<T>) -> SphericalAngles<T> {
    let v = e.0;
    let rho = v.x.hypot(v.y);
    let elevation = rho.atan2(v.z);
    let azimuth = if rho == T::zero() {
        T::zero()
    } else {
        v.y.atan2(v.x)
    };
    SphericalAngles { azimuth, elevation }
}
