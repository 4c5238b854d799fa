use serde::{Deserialize, Serialize};

use super::{DirectionVector, GeomError, SphericalAngles};
use crate::Scalar;

/// One NLoS path as seen by the link: departure and arrival angles, the
/// path length obtained from time of flight, and the measured SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathObservation<T> {
    pub aod: SphericalAngles<T>,
    pub aoa: SphericalAngles<T>,
    /// Total path length AP → target → STA in meters.
    pub path_length: T,
    pub snr_db: T,
    pub timestamp: u64,
}

impl<T: Scalar> PathObservation<T> {
    pub fn new(
        aod: SphericalAngles<T>,
        aoa: SphericalAngles<T>,
        path_length: T,
        snr_db: T,
        timestamp: u64,
    ) -> Result<Self, GeomError> {
        if !(path_length > T::zero() && path_length.is_finite()) {
            return Err(GeomError::InconsistentGeometry(format!(
                "path length must be positive, got {path_length}"
            )));
        }
        Ok(Self {
            aod,
            aoa,
            path_length,
            snr_db,
            timestamp,
        })
    }

    /// Direction from the AP toward the reflector.
    pub fn departure(&self) -> DirectionVector<T> {
        self.aod.direction()
    }

    /// Direction from the STA toward the reflector.
    pub fn arrival(&self) -> DirectionVector<T> {
        self.aoa.direction()
    }
}
