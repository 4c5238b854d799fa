//! Line-delimited record files: one observation per line as
//! `timestamp,phi_t,theta_t,phi_r,theta_r,c,snr_db,tag`.
//!
//! Blank lines and lines starting with `#` are ignored.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{MeasureError, MeasurementRecord, RecordTag};
use crate::geom::{PathObservation, SphericalAngles};

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    timestamp: u64,
    phi_t: f64,
    theta_t: f64,
    phi_r: f64,
    theta_r: f64,
    c: f64,
    snr_db: f64,
    tag: RecordTag,
}

pub fn write_records<W: Write>(out: W, records: &[MeasurementRecord<f64>]) -> Result<(), MeasureError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in records {
        let o = &r.observation;
        w.serialize(Row {
            timestamp: o.timestamp,
            phi_t: o.aod.azimuth,
            theta_t: o.aod.elevation,
            phi_r: o.aoa.azimuth,
            theta_r: o.aoa.elevation,
            c: o.path_length,
            snr_db: o.snr_db,
            tag: r.tag,
        })
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<MeasurementRecord<f64>>, MeasureError> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize::<Row>() {
        let row = row.map_err(csv_error)?;
        let line = out.len() as u64 + 1;
        let bad = |e: crate::geom::GeomError| MeasureError::Parse {
            line,
            message: e.to_string(),
        };
        let observation = PathObservation::new(
            SphericalAngles::new(row.phi_t, row.theta_t).map_err(bad)?,
            SphericalAngles::new(row.phi_r, row.theta_r).map_err(bad)?,
            row.c,
            row.snr_db,
            row.timestamp,
        )
        .map_err(bad)?;
        out.push(MeasurementRecord { observation, tag: row.tag });
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> MeasureError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => MeasureError::Io(io),
        kind => MeasureError::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}
