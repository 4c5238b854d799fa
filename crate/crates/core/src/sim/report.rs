//! CSV output of experiment results. Numbers use Rust's shortest
//! round-trip formatting, so output never depends on the locale.

use std::io::Write;

use serde::Serialize;

use super::{PointReport, SimError};
use crate::Real;

pub const CURVE_HEADER: [&str; 16] = [
    "tx_upa",
    "rx_upa",
    "snr_db",
    "ftm_sigma_m",
    "beam",
    "oversampling",
    "trials",
    "successes",
    "failures",
    "mean_error_m",
    "std_error_m",
    "p50",
    "p90",
    "failure_rate",
    "realized_snr_db_mean",
    "seed",
];

pub const RAW_HEADER: [&str; 18] = [
    "tx_upa",
    "rx_upa",
    "snr_db",
    "ftm_sigma_m",
    "beam",
    "trial",
    "status",
    "scene",
    "true_x",
    "true_y",
    "true_z",
    "est_x",
    "est_y",
    "est_z",
    "error_m",
    "realized_snr_db",
    "oversampling",
    "seed",
];

#[derive(Serialize)]
struct CurveRow {
    tx_upa: String,
    rx_upa: String,
    snr_db: Real,
    ftm_sigma_m: Real,
    beam: &'static str,
    oversampling: usize,
    trials: usize,
    successes: usize,
    failures: usize,
    mean_error_m: Real,
    std_error_m: Real,
    p50: Real,
    p90: Real,
    failure_rate: Real,
    realized_snr_db_mean: Real,
    seed: u64,
}

#[derive(Serialize)]
struct RawRow {
    tx_upa: String,
    rx_upa: String,
    snr_db: Real,
    ftm_sigma_m: Real,
    beam: &'static str,
    trial: usize,
    status: &'static str,
    scene: &'static str,
    true_x: Real,
    true_y: Real,
    true_z: Real,
    est_x: Option<Real>,
    est_y: Option<Real>,
    est_z: Option<Real>,
    error_m: Option<Real>,
    realized_snr_db: Real,
    oversampling: usize,
    seed: u64,
}

/// Streams curve rows (and optionally raw per-trial rows) point by point,
/// flushing after each so a partial run leaves complete rows behind.
pub struct CurveWriter<W: Write, R: Write> {
    curve: csv::Writer<W>,
    raw: Option<csv::Writer<R>>,
    oversampling: usize,
    seed: u64,
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>, SimError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    w.flush()?;
    Ok(w)
}

impl<W: Write, R: Write> CurveWriter<W, R> {
    pub fn new(curve: W, raw: Option<R>, oversampling: usize, seed: u64) -> Result<Self, SimError> {
        Ok(Self {
            curve: writer(curve, &CURVE_HEADER)?,
            raw: raw.map(|r| writer(r, &RAW_HEADER)).transpose()?,
            oversampling,
            seed,
        })
    }

    pub fn write_point(&mut self, r: &PointReport) -> Result<(), SimError> {
        let p = &r.point;
        let s = &r.summary;
        self.curve.serialize(CurveRow {
            tx_upa: p.tx.to_string(),
            rx_upa: p.rx.to_string(),
            snr_db: p.snr_db,
            ftm_sigma_m: p.ftm_sigma_m,
            beam: p.beam.as_str(),
            oversampling: self.oversampling,
            trials: s.trials,
            successes: s.successes,
            failures: s.failures,
            mean_error_m: s.mean_error_m,
            std_error_m: s.std_error_m,
            p50: s.p50,
            p90: s.p90,
            failure_rate: s.failure_rate,
            realized_snr_db_mean: s.realized_snr_db_mean,
            seed: self.seed,
        })?;
        self.curve.flush()?;
        if let Some(raw) = self.raw.as_mut() {
            for (i, t) in r.trials.iter().enumerate() {
                raw.serialize(RawRow {
                    tx_upa: p.tx.to_string(),
                    rx_upa: p.rx.to_string(),
                    snr_db: p.snr_db,
                    ftm_sigma_m: p.ftm_sigma_m,
                    beam: p.beam.as_str(),
                    trial: i,
                    status: t.status.as_str(),
                    scene: t.scene.short_name(),
                    true_x: t.true_position.x,
                    true_y: t.true_position.y,
                    true_z: t.true_position.z,
                    est_x: t.estimate.map(|e| e.x),
                    est_y: t.estimate.map(|e| e.y),
                    est_z: t.estimate.map(|e| e.z),
                    error_m: t.error_m,
                    realized_snr_db: t.realized_snr_db,
                    oversampling: self.oversampling,
                    seed: self.seed,
                })?;
            }
            raw.flush()?;
        }
        Ok(())
    }

    /// Appends a `# TRUNCATED: <reason>` line to every output.
    pub fn truncate(&mut self, reason: &str) -> Result<(), SimError> {
        let clean: String = reason
            .chars()
            .map(|c| if matches!(c, '\n' | '\r' | ',' | '"') { ' ' } else { c })
            .collect();
        let line = [format!("# TRUNCATED: {clean}")];
        self.curve.write_record(&line)?;
        self.curve.flush()?;
        if let Some(raw) = self.raw.as_mut() {
            raw.write_record(&line)?;
            raw.flush()?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), SimError> {
        self.curve.flush()?;
        if let Some(raw) = self.raw.as_mut() {
            raw.flush()?;
        }
        Ok(())
    }
}

pub fn write_curve_csv<W: Write>(out: W, reports: &[PointReport], oversampling: usize, seed: u64) -> Result<(), SimError> {
    let mut w = CurveWriter::<W, std::io::Sink>::new(out, None, oversampling, seed)?;
    for r in reports {
        w.write_point(r)?;
    }
    w.finish()
}

pub fn write_raw_csv<W: Write>(out: W, reports: &[PointReport], oversampling: usize, seed: u64) -> Result<(), SimError> {
    let mut w = CurveWriter::new(std::io::sink(), Some(out), oversampling, seed)?;
    for r in reports {
        w.write_point(r)?;
    }
    w.finish()
}
