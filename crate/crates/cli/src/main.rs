//! Command-line front end: parameter sweeps, one-shot solving of recorded
//! observations and the noiseless round-trip check.

mod config;
mod manifest;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mm3nlos::geom::{localize, solve, SolverIntermediates};
use mm3nlos::measure::read_records;
use mm3nlos::sim::{
    run_experiment_with, synthesize_observations, ArraySize, BeamMode, BoxSampler, CurveWriter, ExperimentConfig,
    PlaneKind, PointReport, ScenarioSampler, SimError,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use config::{ConfigFile, Overrides, SEED_ENV};
use manifest::{now, sibling, Outputs, RunManifest, RunStatus};

#[derive(Debug, Parser)]
#[command(name = "mm3nlos", version, about = "3D NLoS target sensing from two reflection paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean error over UPA sizes (default 4x4, 8x8, 16x16, 32x32).
    SweepAntennas(SweepArgs),
    /// Mean error over FTM ranging noise (default 0, 5, 10, 20, 50 mm).
    SweepFtm(SweepArgs),
    /// Mean error over SNR (default 0 to 30 dB in 5 dB steps).
    SweepSnr(SweepArgs),
    /// Solve the first two observations of a record file.
    SolveOnce {
        /// Record CSV: timestamp, phi_t, theta_t, phi_r, theta_r, c, snr_db, tag.
        records: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Noiseless round trip over sampled scenes.
    OracleCheck(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed. Falls back to the config file, then MM3NLOS_SEED.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Transmit (AP) array sizes, paired with --rx-upa.
    #[arg(long, value_name = "HxV", value_delimiter = ',', num_args = 1..)]
    tx_upa: Option<Vec<ArraySize>>,
    /// Receive (STA) array sizes.
    #[arg(long, value_name = "HxV", value_delimiter = ',', num_args = 1..)]
    rx_upa: Option<Vec<ArraySize>>,
    #[arg(long, value_name = "LIST", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    snr_db: Option<Vec<f64>>,
    #[arg(long, value_name = "LIST", value_delimiter = ',', num_args = 1..)]
    ftm_sigma_m: Option<Vec<f64>>,
    /// best, aux or both.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    beam: Option<Vec<BeamMode>>,
    #[arg(long, value_name = "N")]
    oversampling: Option<usize>,
    /// Working planes; estimates are averaged over them.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    planes: Option<Vec<PlaneKind>>,
    /// Collinearity tolerance, radians.
    #[arg(long, value_name = "RAD")]
    eps_col: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Curve CSV path. The manifest goes next to it.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write one row per trial to `<out>.raw.csv`.
    #[arg(long)]
    raw: bool,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            trials: self.trials,
            tx_upa: self.tx_upa.clone(),
            rx_upa: self.rx_upa.clone(),
            snr_db: self.snr_db.clone(),
            ftm_sigma_m: self.ftm_sigma_m.clone(),
            beam: self.beam.clone(),
            oversampling: self.oversampling,
            planes: self.planes.clone(),
            eps_col: self.eps_col,
        }
    }

    /// Resolved config plus the raw file text, if any.
    fn load(&self, base: ExperimentConfig) -> Result<(ExperimentConfig, Option<String>)> {
        let (file, text) = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| config::ConfigError::Read {
                    path: path.clone(),
                    source,
                })?;
                (ConfigFile::parse(&text, path)?, Some(text))
            }
            None => (ConfigFile::default(), None),
        };
        let env = std::env::var(SEED_ENV).ok();
        let cfg = config::resolve(base, &file, &self.overrides(), env.as_deref())?;
        Ok((cfg, text))
    }
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    Antennas,
    Ftm,
    Snr,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Antennas => "sweep-antennas",
            Axis::Ftm => "sweep-ftm",
            Axis::Snr => "sweep-snr",
        }
    }

    fn base(self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        match self {
            Axis::Antennas => {
                cfg.arrays = [4, 8, 16, 32].map(|n| (ArraySize::square(n), ArraySize::square(n))).to_vec();
            }
            Axis::Ftm => cfg.ftm_sigma_m = vec![0.0, 0.005, 0.01, 0.02, 0.05],
            Axis::Snr => cfg.snr_db = (0..=6).map(|i| 5.0 * i as f64).collect(),
        }
        cfg
    }
}

fn describe_point(r: &PointReport) -> String {
    let p = &r.point;
    let s = &r.summary;
    format!(
        "{}/{} snr {} dB sigma {} m {}: mean {:.4} m, p90 {:.4} m, failures {}/{}",
        p.tx, p.rx, p.snr_db, p.ftm_sigma_m, p.beam, s.mean_error_m, s.p90, s.failures, s.trials
    )
}

fn sweep(axis: Axis, args: &SweepArgs) -> Result<()> {
    let (cfg, snapshot) = args.common.load(axis.base())?;
    let curve_path = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", axis.name())));
    let raw_path = args.raw.then(|| sibling(&curve_path, "raw.csv"));
    let mut manifest = RunManifest {
        command: axis.name().to_string(),
        argv: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config_path: args.common.config.clone(),
        config_snapshot: snapshot,
        resolved_config: ConfigFile::describe(&cfg),
        started_at: now(),
        finished_at: None,
        status: RunStatus::Running,
        error: None,
        outputs: Outputs {
            curve: curve_path.clone(),
            raw: raw_path.clone(),
            manifest: sibling(&curve_path, "manifest.json"),
        },
    };
    manifest.write().with_context(|| format!("writing {}", manifest.outputs.manifest.display()))?;

    let create = |p: &Path| File::create(p).map(BufWriter::new).with_context(|| format!("creating {}", p.display()));
    let curve = create(&curve_path)?;
    let raw = raw_path.as_deref().map(create).transpose()?;
    let mut writer = CurveWriter::new(curve, raw, cfg.oversampling, cfg.seed)?;

    let sampler = BoxSampler::from_config(&cfg);
    let points = cfg.grid().len();
    let mut done = 0;
    let result = run_experiment_with(&cfg, &sampler, |r| {
        done += 1;
        eprintln!("[{done}/{points}] {}", describe_point(&r));
        writer.write_point(&r)
    });
    match result {
        Ok(()) => {
            writer.finish()?;
            manifest.finish(None)?;
            println!("wrote {}", curve_path.display());
            if let Some(p) = &raw_path {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", manifest.outputs.manifest.display());
            Ok(())
        }
        Err(e) => {
            let reason = e.to_string();
            let marked = writer.truncate(&reason);
            manifest.finish(Some(reason))?;
            marked?;
            Err(anyhow::Error::new(e).context(format!("{} stopped after {done} of {points} points", axis.name())))
        }
    }
}

#[derive(Debug, Serialize)]
struct PlaneSolution {
    plane: PlaneKind,
    scene: String,
    scene_index: u8,
    distance_m: f64,
    direction: [f64; 3],
    azimuth_rad: f64,
    elevation_rad: f64,
    position_m: [f64; 3],
    intermediates: SolverIntermediates<f64>,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    current_timestamp: u64,
    historical_timestamp: u64,
    sta_m: [f64; 3],
    solution: Vec<PlaneSolution>,
}

fn solve_once(records: &Path, common: &CommonArgs) -> Result<()> {
    let (cfg, _) = common.load(ExperimentConfig::default())?;
    let file = File::open(records).with_context(|| format!("opening {}", records.display()))?;
    let recs = read_records(BufReader::new(file)).with_context(|| format!("reading {}", records.display()))?;
    let [current, historical, ..] = recs.as_slice() else {
        bail!("{} holds {} record(s), two are needed", records.display(), recs.len());
    };
    let (o1, o2) = (&current.observation, &historical.observation);

    let mut report = SolveReport {
        current_timestamp: o1.timestamp,
        historical_timestamp: o2.timestamp,
        sta_m: cfg.sta.to_array(),
        solution: Vec::new(),
    };
    let mut errors = Vec::new();
    for kind in &cfg.planes {
        match solve(o1, o2, &kind.plane(), &cfg.tolerances) {
            Ok(r) => {
                let a = r.direction.angles();
                report.solution.push(PlaneSolution {
                    plane: *kind,
                    scene: r.scene.to_string(),
                    scene_index: r.scene.index(),
                    distance_m: r.distance,
                    direction: r.direction.vector().to_array(),
                    azimuth_rad: a.azimuth,
                    elevation_rad: a.elevation,
                    position_m: localize(&r, cfg.sta).to_array(),
                    intermediates: r.intermediates,
                });
            }
            Err(e) => errors.push(format!("{kind} plane: {e}")),
        }
    }
    if !report.solution.is_empty() {
        print!("{}", toml::to_string(&report)?);
    }
    if !errors.is_empty() {
        bail!(errors.join("; "));
    }
    Ok(())
}

fn oracle_check(common: &CommonArgs) -> Result<()> {
    const REL_TOL: f64 = 1e-6;
    const POS_TOL: f64 = 1e-6;
    let (cfg, _) = common.load(ExperimentConfig::default())?;
    let sampler = BoxSampler::from_config(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut first_failure = None;
    for i in 0..cfg.trials {
        let s = sampler.sample(&mut rng).map_err(|e: SimError| anyhow::Error::new(e))?;
        let (o1, o2) = synthesize_observations(&s);
        let truth = s.sta.distance(s.target1);
        for kind in &cfg.planes {
            let (key, ok, why) = match solve(&o1, &o2, &kind.plane(), &cfg.tolerances) {
                Ok(r) => {
                    let rel = (r.distance - truth).abs() / truth;
                    let pos = localize(&r, s.sta).distance(s.target1);
                    let ok = rel < REL_TOL && pos < POS_TOL;
                    (r.scene.to_string(), ok, format!("relative error {rel:e}, position error {pos:e} m"))
                }
                Err(e) => ("error".to_string(), false, e.to_string()),
            };
            let t = tally.entry(key).or_default();
            if ok {
                t.0 += 1;
            } else {
                t.1 += 1;
                first_failure.get_or_insert_with(|| format!("scene {i}, {kind} plane: {why}"));
            }
        }
    }
    let passed: usize = tally.values().map(|t| t.0).sum();
    let failed: usize = tally.values().map(|t| t.1).sum();
    println!("scenes = {}", cfg.trials);
    println!("planes = {}", cfg.planes.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(","));
    for (scene, (p, f)) in &tally {
        println!("{scene}: passed {p}, failed {f}");
    }
    println!("passed = {passed}");
    println!("failed = {failed}");
    if let Some(f) = first_failure {
        bail!("{failed} round trip(s) failed, first: {f}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::SweepAntennas(a) => sweep(Axis::Antennas, a),
        Command::SweepFtm(a) => sweep(Axis::Ftm, a),
        Command::SweepSnr(a) => sweep(Axis::Snr, a),
        Command::SolveOnce { records, common } => solve_once(records, common),
        Command::OracleCheck(common) => oracle_check(common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
