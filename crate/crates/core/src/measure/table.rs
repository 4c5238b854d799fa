use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MeasureError;
use crate::geom::{PairGeometry, PathObservation, ProjectionPlane, SceneType, Tolerances};
use crate::Scalar;

pub const DEFAULT_CAPACITY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordTag {
    Current,
    Historical,
    FirstPath,
}

impl RecordTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordTag::Current => "current",
            RecordTag::Historical => "historical",
            RecordTag::FirstPath => "first-path",
        }
    }
}

impl fmt::Display for RecordTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "current" => Ok(RecordTag::Current),
            "historical" => Ok(RecordTag::Historical),
            "first-path" => Ok(RecordTag::FirstPath),
            other => Err(format!("unknown tag `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord<T> {
    pub observation: PathObservation<T>,
    pub tag: RecordTag,
}

/// Bounded history of sensing paths plus one first-path record.
///
/// Historical records are kept in insertion order with strictly increasing
/// timestamps; the oldest is evicted once `capacity` is reached. The
/// first-path record lives outside the history and does not count against
/// the capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTable<T> {
    capacity: usize,
    history: VecDeque<PathObservation<T>>,
    first_path: Option<PathObservation<T>>,
}

impl<T: Scalar> Default for MeasurementTable<T> {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY).expect("nonzero")
    }
}

impl<T: Scalar> MeasurementTable<T> {
    pub fn new(capacity: usize) -> Result<Self, MeasureError> {
        if capacity == 0 {
            return Err(MeasureError::ZeroCapacity);
        }
        Ok(Self {
            capacity,
            history: VecDeque::with_capacity(capacity),
            first_path: None,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    /// Historical records, oldest first.
    pub fn history(&self) -> impl DoubleEndedIterator<Item = &PathObservation<T>> + ExactSizeIterator {
        self.history.iter()
    }

    pub fn first_path(&self) -> Option<&PathObservation<T>> {
        self.first_path.as_ref()
    }

    /// Appends a historical record. Returns the evicted record, if any.
    pub fn push(&mut self, obs: PathObservation<T>) -> Result<Option<PathObservation<T>>, MeasureError> {
        if let Some(last) = self.history.back() {
            if obs.timestamp <= last.timestamp {
                return Err(MeasureError::NonIncreasingTimestamp {
                    last: last.timestamp,
                    got: obs.timestamp,
                });
            }
        }
        let evicted = if self.history.len() == self.capacity {
            self.history.pop_front()
        } else {
            None
        };
        self.history.push_back(obs);
        Ok(evicted)
    }

    /// Stores `obs` as the first-path record, replacing any previous one.
    pub fn record_first_path(&mut self, obs: PathObservation<T>) {
        self.first_path = Some(obs);
    }

    /// Every stored record: history oldest first, then the first-path record.
    pub fn records(&self) -> Vec<MeasurementRecord<T>> {
        self.history
            .iter()
            .map(|&observation| MeasurementRecord {
                observation,
                tag: RecordTag::Historical,
            })
            .chain(self.first_path.map(|observation| MeasurementRecord {
                observation,
                tag: RecordTag::FirstPath,
            }))
            .collect()
    }

    /// Rebuilds a table from records. `current` records are skipped.
    pub fn from_records<'a, I>(capacity: usize, records: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = &'a MeasurementRecord<T>>,
        T: 'a,
    {
        let mut table = Self::new(capacity)?;
        for r in records {
            match r.tag {
                RecordTag::Historical => {
                    table.push(r.observation)?;
                }
                RecordTag::FirstPath => table.record_first_path(r.observation),
                RecordTag::Current => {}
            }
        }
        Ok(table)
    }
}

/// Picks up to `k` historical records to pair with `current`, highest SNR
/// first (newest first among equal SNR).
///
/// A record is unusable when it would make the pair degenerate for the
/// solver: its projections cannot be formed or both its departure and
/// arrival projections lie within `tol.col` of the current ones (℘ = 0).
/// If no record qualifies, the first-path record is returned alone.
pub fn select_historical<T: Scalar>(
    table: &MeasurementTable<T>,
    current: &PathObservation<T>,
    k: usize,
    plane: &ProjectionPlane<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<PathObservation<T>>, MeasureError> {
    if k == 0 {
        return Err(MeasureError::ZeroK);
    }
    let mut usable: Vec<(usize, &PathObservation<T>)> = table
        .history
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            PairGeometry::new(current, h, plane, tol)
                .map(|g| g.scene(tol.col) != SceneType::Degenerate)
                .unwrap_or(false)
        })
        .collect();
    usable.sort_by(|(ia, a), (ib, b)| {
        b.snr_db
            .partial_cmp(&a.snr_db)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ib.cmp(ia))
    });
    if usable.is_empty() {
        return table.first_path.map(|f| vec![f]).ok_or(MeasureError::NoUsableHistory);
    }
    Ok(usable.into_iter().take(k).map(|(_, h)| *h).collect())
}
