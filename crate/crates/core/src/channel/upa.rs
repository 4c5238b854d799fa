use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::geom::{DirectionVector, SphericalAngles};
use crate::Scalar;

/// Uniform planar array: `n_h × n_v` elements with spacing `spacing` at
/// wavelength `wavelength` (both meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpaGeometry<T> {
    pub n_h: usize,
    pub n_v: usize,
    pub spacing: T,
    pub wavelength: T,
}

impl<T: Scalar> UpaGeometry<T> {
    pub fn new(n_h: usize, n_v: usize, spacing: T, wavelength: T) -> Option<Self> {
        (n_h > 0 && n_v > 0 && spacing > T::zero() && wavelength > T::zero()).then_some(Self {
            n_h,
            n_v,
            spacing,
            wavelength,
        })
    }

    /// Half-wavelength array at the given carrier.
    pub fn half_wavelength(n_h: usize, n_v: usize, carrier_hz: T) -> Option<Self> {
        let wavelength = T::lit(299_792_458.0) / carrier_hz;
        Self::new(n_h, n_v, wavelength / T::lit(2.0), wavelength)
    }

    pub fn len(&self) -> usize {
        self.n_h * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Wavenumber `k = 2π/λ`.
    pub fn wavenumber(&self) -> T {
        T::two_pi() / self.wavelength
    }

    /// Phase step per element per unit spatial frequency, `k d`.
    pub fn kd(&self) -> T {
        self.wavenumber() * self.spacing
    }
}

/// Spatial frequencies of a direction seen by the array: horizontal
/// `u = sin φ sin θ` and vertical `v = cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spatial<T> {
    pub u: T,
    pub v: T,
}

pub fn angles_to_spatial<T: Scalar>(a: SphericalAngles<T>) -> Spatial<T> {
    Spatial {
        u: a.azimuth.sin() * a.elevation.sin(),
        v: a.elevation.cos(),
    }
}

/// Front-hemisphere angles of a spatial frequency pair. Points outside the
/// visible region (`u² + v² > 1`) are clamped onto its edge.
pub fn spatial_to_angles<T: Scalar>(s: Spatial<T>) -> SphericalAngles<T> {
    let v = s.v.max(-T::one()).min(T::one());
    let elevation = v.acos();
    let st = elevation.sin();
    let azimuth = if st > T::zero() {
        (s.u / st).max(-T::one()).min(T::one()).asin()
    } else {
        T::zero()
    };
    SphericalAngles { azimuth, elevation }
}

/// Normalised steering vector of an `n`-element uniform line,
/// `exp(-j kd p f)/√n`.
pub fn axis_response<T: Scalar>(n: usize, kd: T, freq: T) -> Vec<Complex<T>> {
    let norm = T::one() / T::from_usize(n).expect("size").sqrt();
    (0..n)
        .map(|p| {
            let phase = -kd * T::from_usize(p).expect("index") * freq;
            Complex::from_polar(norm, phase)
        })
        .collect()
}

/// Array response at spatial frequencies `(u, v)`; element `(p, q)` is stored
/// at index `p·n_v + q`.
pub fn array_response_spatial<T: Scalar>(geom: &UpaGeometry<T>, s: Spatial<T>) -> Vec<Complex<T>> {
    let h = axis_response(geom.n_h, geom.kd(), s.u);
    let v = axis_response(geom.n_v, geom.kd(), s.v);
    h.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
}

/// Unit-norm UPA response
/// `exp(-j k d (p sin φ sin θ + q cos θ)) / √N`.
pub fn array_response<T: Scalar>(geom: &UpaGeometry<T>, a: SphericalAngles<T>) -> Vec<Complex<T>> {
    array_response_spatial(geom, angles_to_spatial(a))
}

/// Physical orientation of an array: yaw of its broadside about `+z` in the
/// common frame. Both terminals share the common frame for reporting angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayMount<T> {
    pub yaw: T,
}

impl<T: Scalar> ArrayMount<T> {
    pub fn new(yaw: T) -> Self {
        Self { yaw }
    }

    pub fn to_local(&self, e: &DirectionVector<T>) -> SphericalAngles<T> {
        let g = e.angles();
        SphericalAngles::wrapped(g.azimuth - self.yaw, g.elevation)
    }

    pub fn to_global(&self, local: &SphericalAngles<T>) -> SphericalAngles<T> {
        SphericalAngles::wrapped(local.azimuth + self.yaw, local.elevation)
    }
}
