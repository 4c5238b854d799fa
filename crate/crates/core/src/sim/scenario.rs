use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ExperimentConfig, SamplingBox, SimError};
use crate::channel::{ArrayMount, Coverage};
use crate::geom::{DirectionVector, PairGeometry, PathObservation, ProjectionPlane, SceneType};
use crate::{Observation, Point3, Real, Tolerances};

/// Ground truth of one trial: the two terminals and the two reflectors.
/// Target 1 is the one being located; target 2 supplies the historical path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub ap: Point3,
    pub sta: Point3,
    pub target1: Point3,
    pub target2: Point3,
}

fn observe(ap: Point3, sta: Point3, target: Point3, timestamp: u64) -> Result<Observation, crate::geom::GeomError> {
    PathObservation::new(
        DirectionVector::between(ap, target)?.angles(),
        DirectionVector::between(sta, target)?.angles(),
        ap.distance(target) + sta.distance(target),
        Real::INFINITY,
        timestamp,
    )
}

/// Exact single-bounce observations of both targets. Target 2 is stamped
/// before target 1. SNR is reported as `inf`.
///
/// # Panics
/// If a target coincides with a terminal.
pub fn synthesize_observations(s: &Scenario) -> (Observation, Observation) {
    let o1 = observe(s.ap, s.sta, s.target1, 1).expect("target 1 distinct from terminals");
    let o2 = observe(s.ap, s.sta, s.target2, 0).expect("target 2 distinct from terminals");
    (o1, o2)
}

pub trait ScenarioSampler: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Scenario, SimError>;
}

/// Draws both reflectors uniformly from a box, rejecting draws outside
/// either array's coverage, draws whose targets nearly coincide, and draws
/// that are degenerate (℘ = 0 or an unprojectable direction) in any of the
/// working planes.
#[derive(Debug, Clone)]
pub struct BoxSampler {
    pub ap: Point3,
    pub sta: Point3,
    pub bounds: SamplingBox,
    pub coverage: Coverage<Real>,
    pub mount: ArrayMount<Real>,
    pub planes: Vec<ProjectionPlane<Real>>,
    pub tolerances: Tolerances,
    pub min_separation: Real,
    pub max_attempts: usize,
}

impl BoxSampler {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            ap: cfg.ap,
            sta: cfg.sta,
            bounds: cfg.sampling_box,
            coverage: cfg.coverage,
            mount: ArrayMount::new(cfg.mount_yaw),
            planes: cfg.planes.iter().map(|p| p.plane()).collect(),
            tolerances: cfg.tolerances,
            min_separation: 1e-3,
            max_attempts: 1_000_000,
        }
    }

    fn visible(&self, from: Point3, target: Point3) -> bool {
        DirectionVector::between(from, target)
            .map(|e| self.coverage.contains(&self.mount.to_local(&e)))
            .unwrap_or(false)
    }

    /// Whether `s` passes every rejection rule.
    pub fn accepts(&self, s: &Scenario) -> bool {
        if s.target1.distance(s.target2) < self.min_separation {
            return false;
        }
        if ![s.target1, s.target2]
            .iter()
            .all(|&t| self.visible(s.ap, t) && self.visible(s.sta, t))
        {
            return false;
        }
        let (o1, o2) = synthesize_observations(s);
        self.planes.iter().all(|plane| {
            PairGeometry::new(&o1, &o2, plane, &self.tolerances)
                .map(|g| g.scene(self.tolerances.col) != SceneType::Degenerate)
                .unwrap_or(false)
        })
    }
}

impl ScenarioSampler for BoxSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Scenario, SimError> {
        let b = &self.bounds;
        let mut draw = |(lo, hi): (Real, Real)| if lo < hi { rng.random_range(lo..hi) } else { lo };
        for _ in 0..self.max_attempts {
            let target1 = Point3::new(draw(b.x), draw(b.y), draw(b.z));
            let target2 = Point3::new(draw(b.x), draw(b.y), draw(b.z));
            let s = Scenario {
                ap: self.ap,
                sta: self.sta,
                target1,
                target2,
            };
            if self.accepts(&s) {
                return Ok(s);
            }
        }
        Err(SimError::SamplerExhausted(self.max_attempts))
    }
}
