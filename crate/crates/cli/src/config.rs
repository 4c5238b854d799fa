//! TOML configuration file, flag overrides and resolution into an
//! [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use mm3nlos::channel::Coverage;
use mm3nlos::sim::{ArraySize, BeamMode, ExperimentConfig, PlaneKind, SamplingBox, SimError};
use mm3nlos::{Point3, Tolerances};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SEED_ENV: &str = "MM3NLOS_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config `{path}`: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    pub fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageFile {
    pub azimuth_deg: Option<f64>,
    pub elevation_deg: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxFile {
    pub x: Option<[f64; 2]>,
    pub y: Option<[f64; 2]>,
    pub z: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    pub col: Option<f64>,
    pub proj: Option<f64>,
    pub residual: Option<f64>,
}

/// Every key of the configuration file. All keys are optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tx_upa: Option<OneOrMany<String>>,
    pub rx_upa: Option<OneOrMany<String>>,
    pub snr_db: Option<OneOrMany<f64>>,
    pub ftm_sigma_m: Option<OneOrMany<f64>>,
    pub beam: Option<OneOrMany<String>>,
    pub oversampling: Option<usize>,
    pub aux_offset: Option<f64>,
    pub planes: Option<OneOrMany<String>>,
    pub carrier_hz: Option<f64>,
    pub spacing_wavelengths: Option<f64>,
    pub ap: Option<[f64; 3]>,
    pub sta: Option<[f64; 3]>,
    pub mount_yaw_deg: Option<f64>,
    pub table_capacity: Option<usize>,
    pub coverage: Option<CoverageFile>,
    pub sampling_box: Option<BoxFile>,
    pub tolerances: Option<TolerancesFile>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    /// Fully populated description of a resolved configuration.
    pub fn describe(cfg: &ExperimentConfig) -> Self {
        let (tx, rx): (Vec<_>, Vec<_>) = cfg.arrays.iter().map(|(t, r)| (t.to_string(), r.to_string())).unzip();
        let b = &cfg.sampling_box;
        Self {
            seed: Some(cfg.seed),
            trials: Some(cfg.trials),
            tx_upa: Some(OneOrMany::Many(tx)),
            rx_upa: Some(OneOrMany::Many(rx)),
            snr_db: Some(OneOrMany::Many(cfg.snr_db.clone())),
            ftm_sigma_m: Some(OneOrMany::Many(cfg.ftm_sigma_m.clone())),
            beam: Some(OneOrMany::Many(cfg.beam_modes.iter().map(|b| b.to_string()).collect())),
            oversampling: Some(cfg.oversampling),
            aux_offset: cfg.aux_offset,
            planes: Some(OneOrMany::Many(cfg.planes.iter().map(|p| p.to_string()).collect())),
            carrier_hz: Some(cfg.carrier_hz),
            spacing_wavelengths: Some(cfg.spacing_wavelengths),
            ap: Some([cfg.ap.x, cfg.ap.y, cfg.ap.z]),
            sta: Some([cfg.sta.x, cfg.sta.y, cfg.sta.z]),
            mount_yaw_deg: Some(cfg.mount_yaw.to_degrees()),
            table_capacity: Some(cfg.table_capacity),
            coverage: Some(CoverageFile {
                azimuth_deg: Some(cfg.coverage.azimuth_span.to_degrees()),
                elevation_deg: Some(cfg.coverage.elevation_span.to_degrees()),
            }),
            sampling_box: Some(BoxFile {
                x: Some([b.x.0, b.x.1]),
                y: Some([b.y.0, b.y.1]),
                z: Some([b.z.0, b.z.1]),
            }),
            tolerances: Some(TolerancesFile {
                col: Some(cfg.tolerances.col),
                proj: Some(cfg.tolerances.proj),
                residual: Some(cfg.tolerances.residual),
            }),
        }
    }
}

/// Values given on the command line. `None` leaves the lower layers alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tx_upa: Option<Vec<ArraySize>>,
    pub rx_upa: Option<Vec<ArraySize>>,
    pub snr_db: Option<Vec<f64>>,
    pub ftm_sigma_m: Option<Vec<f64>>,
    pub beam: Option<Vec<BeamMode>>,
    pub oversampling: Option<usize>,
    pub planes: Option<Vec<PlaneKind>>,
    pub eps_col: Option<f64>,
}

fn parse_list<T: std::str::FromStr<Err = String>>(name: &str, v: OneOrMany<String>) -> Result<Vec<T>, ConfigError> {
    v.into_vec().iter().map(|s| s.parse().map_err(|e: String| field(name, e))).collect()
}

fn pair_arrays(tx: Vec<ArraySize>, rx: Vec<ArraySize>) -> Result<Vec<(ArraySize, ArraySize)>, ConfigError> {
    match (tx.len(), rx.len()) {
        (0, _) => Err(field("tx_upa", "list is empty")),
        (_, 0) => Err(field("rx_upa", "list is empty")),
        (1, _) => Ok(rx.into_iter().map(|r| (tx[0], r)).collect()),
        (_, 1) => Ok(tx.into_iter().map(|t| (t, rx[0])).collect()),
        (a, b) if a == b => Ok(tx.into_iter().zip(rx).collect()),
        (a, b) => Err(field(
            "rx_upa",
            format!("{b} sizes cannot be paired with {a} transmit sizes (give one or the same number)"),
        )),
    }
}

fn point(v: [f64; 3]) -> Point3 {
    Point3::new(v[0], v[1], v[2])
}

/// Layers `base`, then the file, then the flags, then validates. The seed
/// falls back to `env_seed` when neither the file nor the flags set it.
pub fn resolve(
    base: ExperimentConfig,
    file: &ConfigFile,
    flags: &Overrides,
    env_seed: Option<&str>,
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = base;
    let f = file.clone();

    let env_seed = env_seed
        .map(|s| s.trim().parse::<u64>().map_err(|e| field(SEED_ENV, e.to_string())))
        .transpose()?;
    if let Some(seed) = flags.seed.or(f.seed).or(env_seed) {
        cfg.seed = seed;
    }
    if let Some(t) = flags.trials.or(f.trials) {
        cfg.trials = t;
    }

    let (mut tx, mut rx): (Vec<_>, Vec<_>) = cfg.arrays.iter().copied().unzip();
    if let Some(v) = f.tx_upa {
        tx = parse_list("tx_upa", v)?;
    }
    if let Some(v) = f.rx_upa {
        rx = parse_list("rx_upa", v)?;
    }
    if let Some(v) = &flags.tx_upa {
        tx = v.clone();
    }
    if let Some(v) = &flags.rx_upa {
        rx = v.clone();
    }
    cfg.arrays = pair_arrays(tx, rx)?;

    if let Some(v) = flags.snr_db.clone().or(f.snr_db.map(OneOrMany::into_vec)) {
        cfg.snr_db = v;
    }
    if let Some(v) = flags.ftm_sigma_m.clone().or(f.ftm_sigma_m.map(OneOrMany::into_vec)) {
        cfg.ftm_sigma_m = v;
    }
    if let Some(v) = f.beam {
        cfg.beam_modes = parse_list("beam", v)?;
    }
    if let Some(v) = &flags.beam {
        cfg.beam_modes = v.clone();
    }
    if let Some(v) = flags.oversampling.or(f.oversampling) {
        cfg.oversampling = v;
    }
    if let Some(v) = f.aux_offset {
        cfg.aux_offset = Some(v);
    }
    if let Some(v) = f.planes {
        cfg.planes = parse_list("planes", v)?;
    }
    if let Some(v) = &flags.planes {
        cfg.planes = v.clone();
    }
    if let Some(v) = f.carrier_hz {
        cfg.carrier_hz = v;
    }
    if let Some(v) = f.spacing_wavelengths {
        cfg.spacing_wavelengths = v;
    }
    if let Some(v) = f.ap {
        cfg.ap = point(v);
    }
    if let Some(v) = f.sta {
        cfg.sta = point(v);
    }
    if let Some(v) = f.mount_yaw_deg {
        cfg.mount_yaw = v.to_radians();
    }
    if let Some(v) = f.table_capacity {
        cfg.table_capacity = v;
    }
    if let Some(c) = f.coverage {
        cfg.coverage = Coverage {
            azimuth_span: c.azimuth_deg.map_or(cfg.coverage.azimuth_span, f64::to_radians),
            elevation_span: c.elevation_deg.map_or(cfg.coverage.elevation_span, f64::to_radians),
        };
    }
    if let Some(b) = f.sampling_box {
        let pair = |v: Option<[f64; 2]>, d: (f64, f64)| v.map_or(d, |[lo, hi]| (lo, hi));
        let d = cfg.sampling_box;
        cfg.sampling_box = SamplingBox {
            x: pair(b.x, d.x),
            y: pair(b.y, d.y),
            z: pair(b.z, d.z),
        };
    }
    if let Some(t) = f.tolerances {
        let d = cfg.tolerances;
        cfg.tolerances = Tolerances {
            col: t.col.unwrap_or(d.col),
            proj: t.proj.unwrap_or(d.proj),
            residual: t.residual.unwrap_or(d.residual),
        };
    }
    if let Some(eps) = flags.eps_col {
        cfg.tolerances.col = eps;
    }

    let t = cfg.tolerances;
    for (name, v) in [("tolerances.col", t.col), ("tolerances.proj", t.proj), ("tolerances.residual", t.residual)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(field(name, "must be finite and non-negative"));
        }
    }
    cfg.validate().map_err(|e| match e {
        SimError::InvalidConfig { field: name, message } => field(name, message),
        other => field("config", other.to_string()),
    })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ConfigFile, ConfigError> {
        ConfigFile::parse(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = resolve(ExperimentConfig::default(), &parse("").unwrap(), &Overrides::default(), None).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.carrier_hz, 60e9);
        assert_eq!(cfg.spacing_wavelengths, 0.5);
        assert_eq!(cfg.ap, Point3::new(0.0, 0.0, 0.0));
        assert_eq!(cfg.sta, Point3::new(2.0, 0.0, 0.0));
        assert_eq!(cfg.planes, vec![PlaneKind::Yoz]);
        assert_eq!(cfg.trials, 2000);
        assert_eq!(cfg.ftm_sigma_m, vec![0.01]);
    }

    #[test]
    fn zero_trials_is_rejected() {
        let err = resolve(ExperimentConfig::default(), &parse("trials = 0").unwrap(), &Overrides::default(), None)
            .unwrap_err();
        assert!(err.to_string().contains("trials"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse("trials = 5\nbeam_width = 3\n").unwrap_err();
        assert!(err.to_string().contains("beam_width"), "{err}");
        let err = parse("[tolerances]\ncolinear = 1e-3\n").unwrap_err();
        assert!(err.to_string().contains("colinear"), "{err}");
    }

    #[test]
    fn flags_beat_file_beats_env() {
        let file = parse("seed = 5\ntrials = 10\nsnr_db = [0, 10]\ntx_upa = \"8x8\"\nbeam = \"aux\"").unwrap();
        let cfg = resolve(ExperimentConfig::default(), &file, &Overrides::default(), Some("9")).unwrap();
        assert_eq!((cfg.seed, cfg.trials), (5, 10));
        assert_eq!(cfg.snr_db, vec![0.0, 10.0]);
        assert_eq!(cfg.arrays, vec![(ArraySize::square(8), ArraySize::square(32))]);
        assert_eq!(cfg.beam_modes, vec![BeamMode::Aux]);

        let flags = Overrides {
            seed: Some(1),
            snr_db: Some(vec![30.0]),
            ..Default::default()
        };
        let cfg = resolve(ExperimentConfig::default(), &file, &flags, Some("9")).unwrap();
        assert_eq!((cfg.seed, cfg.snr_db.clone()), (1, vec![30.0]));

        let cfg = resolve(ExperimentConfig::default(), &parse("").unwrap(), &Overrides::default(), Some("9")).unwrap();
        assert_eq!(cfg.seed, 9);
        let err = resolve(ExperimentConfig::default(), &parse("").unwrap(), &Overrides::default(), Some("x"))
            .unwrap_err();
        assert!(err.to_string().contains(SEED_ENV));
    }

    #[test]
    fn bad_values_name_their_field() {
        for (text, name) in [
            ("tx_upa = \"8by8\"", "tx_upa"),
            ("beam = [\"wide\"]", "beam"),
            ("planes = \"xyz\"", "planes"),
            ("ftm_sigma_m = [-1.0]", "ftm_sigma_m"),
            ("oversampling = 0", "oversampling"),
            ("tx_upa = [\"4x4\", \"8x8\"]\nrx_upa = [\"4x4\", \"8x8\", \"2x2\"]", "rx_upa"),
            ("[tolerances]\ncol = -1.0", "tolerances.col"),
        ] {
            let err = resolve(ExperimentConfig::default(), &parse(text).unwrap(), &Overrides::default(), None)
                .unwrap_err();
            assert!(err.to_string().contains(name), "{text}: {err}");
        }
    }

    #[test]
    fn description_round_trips() {
        let file = parse(
            "trials = 7\ntx_upa = [\"4x4\", \"8x8\"]\nrx_upa = \"16x8\"\nplanes = [\"xoy\", \"xoz\"]\n\
             aux_offset = 0.01\nmount_yaw_deg = 45\n[sampling_box]\ny = [1.0, 2.0]\n[coverage]\nazimuth_deg = 100",
        )
        .unwrap();
        let cfg = resolve(ExperimentConfig::default(), &file, &Overrides::default(), None).unwrap();
        let text = toml::to_string(&ConfigFile::describe(&cfg)).unwrap();
        let again = resolve(ExperimentConfig::default(), &parse(&text).unwrap(), &Overrides::default(), None).unwrap();
        assert_eq!(again.arrays, cfg.arrays);
        assert_eq!(again.planes, cfg.planes);
        assert_eq!(again.sampling_box, cfg.sampling_box);
        assert_eq!(again.aux_offset, cfg.aux_offset);
        assert!((again.mount_yaw - cfg.mount_yaw).abs() < 1e-15);
        assert!((again.coverage.azimuth_span - cfg.coverage.azimuth_span).abs() < 1e-15);
    }
}
