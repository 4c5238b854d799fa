use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{synthesize_observations, BeamMode, ExperimentConfig, GridPoint, Scenario, SimError};
use crate::channel::{
    aux_beam_refine, beam_sweep, from_db, ArrayMount, AuxOffsets, ChannelRealization, Codebook, Coverage, Side,
};
use crate::geom::{localize, solve, DirectionVector, GeomError, PairGeometry, PathObservation, ProjectionPlane, SceneType};
use crate::measure::{ftm_distance, select_historical, FtmConfig, MeasureError, MeasurementTable};
use crate::{Angles, Observation, Point3, Real, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    Success,
    Unsolvable,
    InconsistentGeometry,
    DegenerateProjection,
    NoUsableHistory,
}

impl TrialStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialStatus::Success => "success",
            TrialStatus::Unsolvable => "unsolvable",
            TrialStatus::InconsistentGeometry => "inconsistent-geometry",
            TrialStatus::DegenerateProjection => "degenerate-projection",
            TrialStatus::NoUsableHistory => "no-usable-history",
        }
    }

    fn from_geom(e: &GeomError) -> Self {
        match e {
            GeomError::Unsolvable { .. } => TrialStatus::Unsolvable,
            GeomError::DegenerateProjection { .. } | GeomError::ZeroVector => TrialStatus::DegenerateProjection,
            _ => TrialStatus::InconsistentGeometry,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub true_position: Point3,
    /// Mean of the per-plane estimates that succeeded.
    pub estimate: Option<Point3>,
    /// Euclidean distance between estimate and truth, when there is one.
    pub error_m: Option<Real>,
    /// Scene type of the noiseless pair in the first working plane.
    pub scene: SceneType,
    /// `N_t N_r |g|² p_t / σ²` of the target-1 path, dB.
    pub realized_snr_db: Real,
    pub status: TrialStatus,
}

/// Independent random streams of one trial, all derived from the
/// experiment seed and the trial index so that every grid point sees the
/// same scenes and channel gains.
pub struct TrialStreams {
    pub gain: ChaCha8Rng,
    pub sweep: ChaCha8Rng,
    pub ftm: ChaCha8Rng,
}

pub(crate) const SCENE_STREAM: u64 = 0;
const GAIN_STREAM: u64 = 1;
const SWEEP_STREAM: u64 = 2;
const FTM_STREAM: u64 = 3;
const STREAMS_PER_TRIAL: u64 = 4;

pub(crate) fn stream(seed: u64, trial: u64, which: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial * STREAMS_PER_TRIAL + which);
    rng
}

impl TrialStreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self {
            gain: stream(seed, trial, GAIN_STREAM),
            sweep: stream(seed, trial, SWEEP_STREAM),
            ftm: stream(seed, trial, FTM_STREAM),
        }
    }
}

/// Everything a trial needs for one grid point, built once per point.
pub struct PointSetup {
    pub point: GridPoint,
    tx_cb: Codebook<Real>,
    rx_cb: Codebook<Real>,
    tx_offsets: AuxOffsets<Real>,
    rx_offsets: AuxOffsets<Real>,
    coverage: Coverage<Real>,
    mount: ArrayMount<Real>,
    noise_var: Real,
    ftm: FtmConfig<Real>,
    planes: Vec<ProjectionPlane<Real>>,
    tol: Tolerances,
    capacity: usize,
}

/// Transmit power; SNR values are power over noise variance.
const TX_POWER: Real = 1.0;

impl PointSetup {
    pub fn new(cfg: &ExperimentConfig, point: GridPoint) -> Result<Self, SimError> {
        let tx_cb = Codebook::new(cfg.upa(point.tx), cfg.coverage, cfg.oversampling);
        let rx_cb = Codebook::new(cfg.upa(point.rx), cfg.coverage, cfg.oversampling);
        let offsets = |cb: &Codebook<Real>| match cfg.aux_offset {
            Some(d) => AuxOffsets {
                horizontal: d,
                vertical: d,
            },
            None => AuxOffsets::half_grid(cb),
        };
        Ok(Self {
            point,
            tx_offsets: offsets(&tx_cb),
            rx_offsets: offsets(&rx_cb),
            tx_cb,
            rx_cb,
            coverage: cfg.coverage,
            mount: ArrayMount::new(cfg.mount_yaw),
            noise_var: TX_POWER / from_db(point.snr_db),
            ftm: FtmConfig::new(point.ftm_sigma_m).map_err(|e| SimError::invalid("ftm_sigma_m", e.to_string()))?,
            planes: cfg.planes.iter().map(|p| p.plane()).collect(),
            tol: cfg.tolerances,
            capacity: cfg.table_capacity,
        })
    }

    /// Beam-trains one path and returns its estimated global angles and the
    /// measured SNR of the winning pair.
    fn estimate_path(&self, ap: Point3, sta: Point3, target: Point3, rngs: &mut TrialStreams) -> (Angles, Angles, Real, ChannelRealization<Real>) {
        let aod = self.mount.to_local(&DirectionVector::between(ap, target).expect("distinct"));
        let aoa = self.mount.to_local(&DirectionVector::between(sta, target).expect("distinct"));
        let length = ap.distance(target) + sta.distance(target);
        let ch = ChannelRealization::draw(&mut rngs.gain, aod, aoa, length, *self.tx_cb.geometry(), *self.rx_cb.geometry());
        let sweep = beam_sweep(&ch, &self.tx_cb, &self.rx_cb, TX_POWER, self.noise_var, &mut rngs.sweep);
        let (aod_hat, aoa_hat) = match self.point.beam {
            BeamMode::Best => (sweep.aod, sweep.aoa),
            BeamMode::Aux => {
                let w = self.rx_cb.weights(sweep.rx_index);
                let f = self.tx_cb.weights(sweep.tx_index);
                let t = aux_beam_refine(&ch, sweep.aod, Side::Tx, &w, self.tx_offsets, &self.coverage, TX_POWER, self.noise_var, &mut rngs.sweep);
                let r = aux_beam_refine(&ch, sweep.aoa, Side::Rx, &f, self.rx_offsets, &self.coverage, TX_POWER, self.noise_var, &mut rngs.sweep);
                (t, r)
            }
        };
        (self.mount.to_global(&aod_hat), self.mount.to_global(&aoa_hat), sweep.snr_db, ch)
    }
}

/// One end-to-end trial: channel gains, beam training (and refinement) of
/// both paths, ranging, table selection, solve in every working plane and
/// localization.
pub fn run_trial(setup: &PointSetup, s: &Scenario, rngs: &mut TrialStreams) -> TrialResult {
    let (true1, true2) = synthesize_observations(s);
    let scene = PairGeometry::new(&true1, &true2, &setup.planes[0], &setup.tol)
        .map(|g| g.scene(setup.tol.col))
        .unwrap_or(SceneType::Degenerate);

    let (aod2, aoa2, snr2, _) = setup.estimate_path(s.ap, s.sta, s.target2, rngs);
    let (aod1, aoa1, snr1, ch1) = setup.estimate_path(s.ap, s.sta, s.target1, rngs);
    let realized_snr_db = ch1.matched_snr_db(TX_POWER, setup.noise_var);
    let c2 = ftm_distance(true2.path_length, &setup.ftm, &mut rngs.ftm);
    let c1 = ftm_distance(true1.path_length, &setup.ftm, &mut rngs.ftm);

    let failed = |status| TrialResult {
        true_position: s.target1,
        estimate: None,
        error_m: None,
        scene,
        realized_snr_db,
        status,
    };

    let historical: Observation = PathObservation::new(aod2, aoa2, c2, snr2, 0).expect("positive range");
    let current: Observation = PathObservation::new(aod1, aoa1, c1, snr1, 1).expect("positive range");
    let mut table = MeasurementTable::new(setup.capacity).expect("validated capacity");
    table.push(historical).expect("fresh table");

    let mut sum = Point3::zero();
    let mut ok = 0usize;
    let mut first_error = None;
    for plane in &setup.planes {
        let partner = match select_historical(&table, &current, 1, plane, &setup.tol) {
            Ok(sel) => sel[0],
            Err(MeasureError::NoUsableHistory) => {
                first_error.get_or_insert(TrialStatus::NoUsableHistory);
                continue;
            }
            Err(e) => unreachable!("k = 1 and a valid table: {e}"),
        };
        match solve(&current, &partner, plane, &setup.tol) {
            Ok(r) => {
                sum += localize(&r, s.sta);
                ok += 1;
            }
            Err(e) => {
                first_error.get_or_insert(TrialStatus::from_geom(&e));
            }
        }
    }
    if ok == 0 {
        return failed(first_error.unwrap_or(TrialStatus::InconsistentGeometry));
    }
    let estimate = sum / ok as Real;
    TrialResult {
        true_position: s.target1,
        estimate: Some(estimate),
        error_m: Some(estimate.distance(s.target1)),
        scene,
        realized_snr_db,
        status: TrialStatus::Success,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{ArraySize, BoxSampler, PlaneKind, ScenarioSampler};

    fn point(n: usize, snr_db: Real, sigma: Real, beam: BeamMode) -> GridPoint {
        GridPoint {
            tx: ArraySize::square(n),
            rx: ArraySize::square(n),
            snr_db,
            ftm_sigma_m: sigma,
            beam,
        }
    }

    #[test]
    fn noiseless_refined_trial_is_exact() {
        let cfg = ExperimentConfig::default();
        let sampler = BoxSampler::from_config(&cfg);
        let setup = PointSetup::new(&cfg, point(8, Real::INFINITY, 0.0, BeamMode::Aux)).unwrap();
        for t in 0..50 {
            let s = sampler.sample(&mut stream(1, t, SCENE_STREAM)).unwrap();
            let r = run_trial(&setup, &s, &mut TrialStreams::new(1, t));
            assert_eq!(r.status, TrialStatus::Success);
            assert!(r.error_m.unwrap() < 1e-6, "{:?}", r);
        }
    }

    #[test]
    fn same_seed_same_result() {
        let cfg = ExperimentConfig {
            planes: vec![PlaneKind::Yoz, PlaneKind::Xoy],
            ..Default::default()
        };
        let sampler = BoxSampler::from_config(&cfg);
        let setup = PointSetup::new(&cfg, point(16, 10.0, 0.01, BeamMode::Aux)).unwrap();
        let s = sampler.sample(&mut stream(3, 7, SCENE_STREAM)).unwrap();
        let a = run_trial(&setup, &s, &mut TrialStreams::new(3, 7));
        let b = run_trial(&setup, &s, &mut TrialStreams::new(3, 7));
        assert_eq!(a, b);
        let c = run_trial(&setup, &s, &mut TrialStreams::new(3, 8));
        assert_ne!(a, c);
    }

    #[test]
    fn failure_carries_no_estimate() {
        let cfg = ExperimentConfig::default();
        let setup = PointSetup::new(&cfg, point(4, 20.0, 0.0, BeamMode::Best)).unwrap();
        // both targets on one ray from each terminal: ℘ = 0 after quantization
        let s = Scenario {
            ap: cfg.ap,
            sta: cfg.sta,
            target1: Point3::new(1.0, 2.0, 0.0),
            target2: Point3::new(1.0, 2.0001, 0.0),
        };
        let r = run_trial(&setup, &s, &mut TrialStreams::new(0, 0));
        assert_ne!(r.status, TrialStatus::Success);
        assert!(r.estimate.is_none() && r.error_m.is_none());
    }
}
