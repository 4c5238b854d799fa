use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::channel::{Coverage, UpaGeometry};
use crate::geom::ProjectionPlane;
use crate::{Point3, Real, Tolerances};

/// `horizontal × vertical` element counts of a UPA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArraySize {
    pub h: usize,
    pub v: usize,
}

impl ArraySize {
    pub fn square(n: usize) -> Self {
        Self { h: n, v: n }
    }
}

impl fmt::Display for ArraySize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.h, self.v)
    }
}

impl FromStr for ArraySize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (h, v) = s
            .trim()
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected HxV, got `{s}`"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("bad element count `{t}` in `{s}`"))
        };
        Ok(Self { h: parse(h)?, v: parse(v)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamMode {
    /// Winner of the codebook sweep.
    Best,
    /// Sweep winner refined with auxiliary beam pairs.
    Aux,
}

impl BeamMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BeamMode::Best => "best",
            BeamMode::Aux => "aux",
        }
    }
}

impl fmt::Display for BeamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BeamMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "best" => Ok(BeamMode::Best),
            "aux" => Ok(BeamMode::Aux),
            other => Err(format!("unknown beam mode `{other}` (expected best or aux)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneKind {
    Yoz,
    Xoy,
    Xoz,
}

impl PlaneKind {
    pub fn plane(&self) -> ProjectionPlane<Real> {
        match self {
            PlaneKind::Yoz => ProjectionPlane::yoz(),
            PlaneKind::Xoy => ProjectionPlane::xoy(),
            PlaneKind::Xoz => ProjectionPlane::xoz(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PlaneKind::Yoz => "yoz",
            PlaneKind::Xoy => "xoy",
            PlaneKind::Xoz => "xoz",
        }
    }
}

impl fmt::Display for PlaneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlaneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "yoz" => Ok(PlaneKind::Yoz),
            "xoy" => Ok(PlaneKind::Xoy),
            "xoz" => Ok(PlaneKind::Xoz),
            other => Err(format!("unknown plane `{other}` (expected yoz, xoy or xoz)")),
        }
    }
}

/// Axis-aligned box the reflectors are drawn from, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingBox {
    pub x: (Real, Real),
    pub y: (Real, Real),
    pub z: (Real, Real),
}

impl Default for SamplingBox {
    fn default() -> Self {
        Self {
            x: (0.0, 2.0),
            y: (0.5, 4.0),
            z: (-1.0, 1.0),
        }
    }
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub tx: ArraySize,
    pub rx: ArraySize,
    pub snr_db: Real,
    pub ftm_sigma_m: Real,
    pub beam: BeamMode,
}

/// Monte Carlo experiment description. Every list is one grid axis except
/// `planes`, whose estimates are averaged within each trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `(tx, rx)` array sizes.
    pub arrays: Vec<(ArraySize, ArraySize)>,
    /// Transmit power over noise variance, dB. `inf` runs noiseless.
    pub snr_db: Vec<Real>,
    pub ftm_sigma_m: Vec<Real>,
    pub beam_modes: Vec<BeamMode>,
    pub planes: Vec<PlaneKind>,
    pub trials: usize,
    pub oversampling: usize,
    /// Auxiliary beam offset in spatial frequency; half the grid spacing
    /// when `None`.
    pub aux_offset: Option<Real>,
    pub seed: u64,
    pub carrier_hz: Real,
    /// Element spacing in wavelengths.
    pub spacing_wavelengths: Real,
    pub ap: Point3,
    pub sta: Point3,
    /// Broadside yaw of both arrays about `+z`, radians.
    pub mount_yaw: Real,
    pub coverage: Coverage<Real>,
    pub sampling_box: SamplingBox,
    pub tolerances: Tolerances,
    pub table_capacity: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            arrays: vec![(ArraySize::square(32), ArraySize::square(32))],
            snr_db: vec![20.0],
            ftm_sigma_m: vec![0.01],
            beam_modes: vec![BeamMode::Best],
            planes: vec![PlaneKind::Yoz],
            trials: 2000,
            oversampling: 1,
            aux_offset: None,
            seed: 0,
            carrier_hz: 60e9,
            spacing_wavelengths: 0.5,
            ap: Point3::new(0.0, 0.0, 0.0),
            sta: Point3::new(2.0, 0.0, 0.0),
            mount_yaw: std::f64::consts::FRAC_PI_2,
            coverage: Coverage::default(),
            sampling_box: SamplingBox::default(),
            tolerances: Tolerances::default(),
            table_capacity: crate::measure::DEFAULT_CAPACITY,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = SimError::invalid;
        if self.trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if self.arrays.is_empty() {
            return Err(bad("arrays", "grid is empty"));
        }
        if self.arrays.iter().any(|(t, r)| t.h * t.v * r.h * r.v == 0) {
            return Err(bad("arrays", "element counts must be positive"));
        }
        if self.snr_db.is_empty() {
            return Err(bad("snr_db", "grid is empty"));
        }
        if self.snr_db.iter().any(|s| s.is_nan() || *s == Real::NEG_INFINITY) {
            return Err(bad("snr_db", "values must be numbers below +inf"));
        }
        if self.ftm_sigma_m.is_empty() {
            return Err(bad("ftm_sigma_m", "grid is empty"));
        }
        if self.ftm_sigma_m.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(bad("ftm_sigma_m", "values must be finite and non-negative"));
        }
        if self.beam_modes.is_empty() {
            return Err(bad("beam", "grid is empty"));
        }
        if self.planes.is_empty() {
            return Err(bad("planes", "at least one plane is required"));
        }
        if self.oversampling == 0 {
            return Err(bad("oversampling", "must be at least 1"));
        }
        if let Some(d) = self.aux_offset {
            if !(d.is_finite() && d > 0.0) {
                return Err(bad("aux_offset", "must be positive"));
            }
        }
        if !(self.carrier_hz.is_finite() && self.carrier_hz > 0.0) {
            return Err(bad("carrier_hz", "must be positive"));
        }
        if !(self.spacing_wavelengths.is_finite() && self.spacing_wavelengths > 0.0) {
            return Err(bad("spacing_wavelengths", "must be positive"));
        }
        if self.ap.distance(self.sta) <= 0.0 {
            return Err(bad("sta", "must differ from the AP position"));
        }
        let b = &self.sampling_box;
        if [b.x, b.y, b.z].iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(bad("sampling_box", "each axis needs finite lo <= hi"));
        }
        let c = &self.coverage;
        if !(c.azimuth_span > 0.0 && c.azimuth_span <= std::f64::consts::PI) {
            return Err(bad("coverage", "azimuth span must be in (0, 180] degrees"));
        }
        if !(c.elevation_span > 0.0 && c.elevation_span <= std::f64::consts::PI) {
            return Err(bad("coverage", "elevation span must be in (0, 180] degrees"));
        }
        if self.table_capacity == 0 {
            return Err(bad("table_capacity", "must be at least 1"));
        }
        Ok(())
    }

    /// Grid points in output order: arrays, then SNR, then ranging noise,
    /// then beam mode.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &(tx, rx) in &self.arrays {
            for &snr_db in &self.snr_db {
                for &ftm_sigma_m in &self.ftm_sigma_m {
                    for &beam in &self.beam_modes {
                        out.push(GridPoint {
                            tx,
                            rx,
                            snr_db,
                            ftm_sigma_m,
                            beam,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn upa(&self, size: ArraySize) -> UpaGeometry<Real> {
        let wavelength = 299_792_458.0 / self.carrier_hz;
        UpaGeometry::new(size.h, size.v, self.spacing_wavelengths * wavelength, wavelength)
            .expect("validated array size")
    }
}
