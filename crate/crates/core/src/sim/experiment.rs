use rayon::prelude::*;

use super::trial::{stream, SCENE_STREAM};
use super::{run_trial, ExperimentConfig, GridPoint, PointSetup, ScenarioSampler, SimError, TrialResult, TrialStreams};
use crate::Real;

/// Aggregate of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    /// `NaN` when no trial succeeded, as are the spread and percentiles.
    pub mean_error_m: Real,
    /// Sample standard deviation of the error.
    pub std_error_m: Real,
    pub p50: Real,
    pub p90: Real,
    pub failure_rate: Real,
    pub realized_snr_db_mean: Real,
}

impl Summary {
    pub fn from_trials(results: &[TrialResult]) -> Self {
        let mut errors: Vec<Real> = results.iter().filter_map(|r| r.error_m).collect();
        errors.sort_by(|a, b| a.total_cmp(b));
        let n = errors.len();
        let mean = mean_distance_error(results).unwrap_or(Real::NAN);
        let std = if n > 1 {
            (errors.iter().map(|e| (e - mean).powi(2)).sum::<Real>() / (n - 1) as Real).sqrt()
        } else if n == 1 {
            0.0
        } else {
            Real::NAN
        };
        let trials = results.len();
        Self {
            trials,
            successes: n,
            failures: trials - n,
            mean_error_m: mean,
            std_error_m: std,
            p50: percentile(&errors, 0.5),
            p90: percentile(&errors, 0.9),
            failure_rate: if trials == 0 { Real::NAN } else { (trials - n) as Real / trials as Real },
            realized_snr_db_mean: results.iter().map(|r| r.realized_snr_db).sum::<Real>() / trials as Real,
        }
    }

    /// Standard error of the mean error.
    pub fn sem(&self) -> Real {
        self.std_error_m / (self.successes as Real).sqrt()
    }
}

/// Linearly interpolated quantile of sorted data; `NaN` for empty input.
pub fn percentile(sorted: &[Real], q: Real) -> Real {
    match sorted.len() {
        0 => Real::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as Real;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (pos - lo as Real) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Mean distance error over the successful trials.
pub fn mean_distance_error(results: &[TrialResult]) -> Result<Real, SimError> {
    let (sum, n) = results
        .iter()
        .filter_map(|r| r.error_m)
        .fold((0.0, 0usize), |(s, n), e| (s + e, n + 1));
    if n == 0 {
        return Err(SimError::EmptyInput);
    }
    Ok(sum / n as Real)
}

#[derive(Debug, Clone)]
pub struct PointReport {
    pub point: GridPoint,
    pub summary: Summary,
    pub trials: Vec<TrialResult>,
}

/// Runs every grid point and hands each finished point to `sink` in grid
/// order. Scenes are drawn once and shared by all points.
pub fn run_experiment_with<S, F, E>(cfg: &ExperimentConfig, sampler: &S, mut sink: F) -> Result<(), E>
where
    S: ScenarioSampler,
    F: FnMut(PointReport) -> Result<(), E>,
    E: From<SimError>,
{
    cfg.validate()?;
    let scenes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| sampler.sample(&mut stream(cfg.seed, t, SCENE_STREAM)))
        .collect::<Result<Vec<_>, _>>()?;
    for point in cfg.grid() {
        let setup = PointSetup::new(cfg, point)?;
        let trials: Vec<TrialResult> = scenes
            .par_iter()
            .enumerate()
            .map(|(t, s)| run_trial(&setup, s, &mut TrialStreams::new(cfg.seed, t as u64)))
            .collect();
        sink(PointReport {
            point,
            summary: Summary::from_trials(&trials),
            trials,
        })?;
    }
    Ok(())
}

/// Collects [`run_experiment_with`] into a vector.
pub fn run_experiment<S: ScenarioSampler>(cfg: &ExperimentConfig, sampler: &S) -> Result<Vec<PointReport>, SimError> {
    let mut out = Vec::new();
    run_experiment_with(cfg, sampler, |r| {
        out.push(r);
        Ok::<_, SimError>(())
    })?;
    Ok(out)
}
