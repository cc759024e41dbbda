use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rigid_pinn_core::eval::{field_slice, radius_sweep, FieldEstimator, SliceRow, SweepRow};
use rigid_pinn_core::field::{add_noise, normalize, simulate, Measurements};
use rigid_pinn_core::geom::{sph_to_cart, sphere_grid, CartPoint};
use rigid_pinn_core::pw::solve_amplitudes;
use rigid_pinn_core::rng::derive_seed;
use rigid_pinn_core::sh::estimate_coeffs;
use rigid_pinn_core::train::{train_with, LossReport, TrainOutcome};

use crate::config::{RunConfig, NOISE_STREAM, SWEEP_STREAM};
use crate::error::CliError;
use crate::formats;

pub const MEASUREMENTS_FILE: &str = "measurements.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.txt";
pub const LOSS_FILE: &str = "loss.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SH_COEFFS_FILE: &str = "sh_coeffs.csv";
pub const PL_AMPLITUDES_FILE: &str = "pl_amplitudes.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sh,
    Pl,
    Pinn,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sh => "sh",
            Method::Pl => "pl",
            Method::Pinn => "pinn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sh" => Ok(Method::Sh),
            "pl" => Ok(Method::Pl),
            "pinn" => Ok(Method::Pinn),
            _ => Err(format!("unknown method `{s}` (expected sh, pl or pinn)")),
        }
    }
}

/// Input files of the commands that consume earlier artifacts; `None`
/// means the default file inside the output directory.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub measurements: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub points: Option<PathBuf>,
}

impl Inputs {
    fn measurements(&self, cfg: &RunConfig) -> PathBuf {
        self.measurements
            .clone()
            .unwrap_or_else(|| cfg.output_dir.join(MEASUREMENTS_FILE))
    }

    fn checkpoint(&self, cfg: &RunConfig) -> PathBuf {
        self.checkpoint
            .clone()
            .unwrap_or_else(|| cfg.output_dir.join(CHECKPOINT_FILE))
    }
}

fn require(path: &Path, hint: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Missing(format!(
            "{} not found; {hint}",
            path.display()
        )))
    }
}

fn prepare_output(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))
}

/// Simulated, noisy and normalized microphone signals for `cfg`.
pub fn measure(cfg: &RunConfig) -> Result<Measurements, CliError> {
    cfg.validate()?;
    let scene = cfg.scene();
    let clean = simulate(&scene, &cfg.mic_positions()?)?;
    let noisy = match cfg.snr_db {
        Some(snr) => add_noise(&clean, snr, derive_seed(cfg.seed, NOISE_STREAM))?,
        None => clean,
    };
    Ok(normalize(&noisy)?)
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub path: PathBuf,
    pub scale: f64,
    pub k: f64,
    pub rows: usize,
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateReport, CliError> {
    let m = measure(cfg)?;
    prepare_output(cfg)?;
    let path = cfg.output_dir.join(MEASUREMENTS_FILE);
    formats::write_measurements(&path, &m)?;
    Ok(SimulateReport {
        path,
        scale: m.scale,
        k: cfg.scene().k(),
        rows: m.len(),
    })
}

pub fn cmd_train(
    cfg: &RunConfig,
    inputs: &Inputs,
    on_epoch: impl FnMut(&LossReport),
) -> Result<TrainOutcome, CliError> {
    cfg.validate()?;
    let mpath = inputs.measurements(cfg);
    require(&mpath, "run `rigid-pinn simulate` first or pass --measurements")?;
    let m = formats::read_measurements(&mpath)?;
    let outcome = train_with(&cfg.scene(), &m, &cfg.train_config(), on_epoch)?;
    prepare_output(cfg)?;
    formats::write_checkpoint(&cfg.output_dir.join(CHECKPOINT_FILE), &outcome.params)?;
    formats::write_loss(&cfg.output_dir.join(LOSS_FILE), &outcome.history)?;
    Ok(outcome)
}

/// Builds one estimator from the measurements (SH, PL) or the checkpoint
/// (PINN).
pub fn build_estimator(
    cfg: &RunConfig,
    method: Method,
    m: &Measurements,
    checkpoint: &Path,
) -> Result<FieldEstimator, CliError> {
    let scene = cfg.scene();
    Ok(match method {
        Method::Sh => FieldEstimator::Sh(estimate_coeffs(m, scene.a, scene.k(), cfg.sh.order)?),
        Method::Pl => FieldEstimator::Pl(solve_amplitudes(m, &cfg.pw_config(&m.positions)?)?),
        Method::Pinn => {
            require(checkpoint, "run `rigid-pinn train` first or pass --checkpoint")?;
            FieldEstimator::Pinn(formats::read_checkpoint(checkpoint)?)
        }
    })
}

/// Ground truth in the normalization of the configured measurements.
pub fn ground_truth(cfg: &RunConfig) -> Result<FieldEstimator, CliError> {
    Ok(FieldEstimator::GroundTruth {
        scene: cfg.scene(),
        scale: measure(cfg)?.scale,
    })
}

fn slice_points(cfg: &RunConfig) -> Result<Vec<CartPoint>, CliError> {
    let e = &cfg.eval;
    Ok(sphere_grid(e.slice_radius, e.n_theta, e.n_phi)?
        .into_iter()
        .map(sph_to_cart)
        .collect())
}

pub fn estimate_file(cfg: &RunConfig, method: Method) -> PathBuf {
    cfg.output_dir.join(format!("estimate_{method}.csv"))
}

/// Evaluates one estimator at the points file (or the slice grid) and writes
/// `estimate_<method>.csv`; SH and PL also dump their coefficients.
pub fn cmd_estimate(cfg: &RunConfig, method: Method, inputs: &Inputs) -> Result<PathBuf, CliError> {
    cfg.validate()?;
    let mpath = inputs.measurements(cfg);
    require(&mpath, "run `rigid-pinn simulate` first or pass --measurements")?;
    let m = formats::read_measurements(&mpath)?;
    let points = match &inputs.points {
        Some(p) => {
            require(p, "pass an existing `x,y,z` file to --points")?;
            formats::read_points(p)?
        }
        None => slice_points(cfg)?,
    };
    let est = build_estimator(cfg, method, &m, &inputs.checkpoint(cfg))?;
    let values = est.pressures(&points)?;
    prepare_output(cfg)?;
    match &est {
        FieldEstimator::Sh(c) => formats::write_coeffs(&cfg.output_dir.join(SH_COEFFS_FILE), c)?,
        FieldEstimator::Pl(w) => {
            formats::write_amplitudes(&cfg.output_dir.join(PL_AMPLITUDES_FILE), w)?
        }
        _ => {}
    }
    let path = estimate_file(cfg, method);
    formats::write_field(&path, &points, &values)?;
    Ok(path)
}

/// NMSE of SH, PL and PINN at every configured radius.
pub fn sweep_rows(cfg: &RunConfig, inputs: &Inputs) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let mpath = inputs.measurements(cfg);
    require(&mpath, "run `rigid-pinn simulate` first or pass --measurements")?;
    let m = formats::read_measurements(&mpath)?;
    let ck = inputs.checkpoint(cfg);
    let sh = build_estimator(cfg, Method::Sh, &m, &ck)?;
    let pl = build_estimator(cfg, Method::Pl, &m, &ck)?;
    let pinn = build_estimator(cfg, Method::Pinn, &m, &ck)?;
    let truth = ground_truth(cfg)?;
    Ok(radius_sweep(
        &truth,
        &[&sh, &pl, &pinn],
        &cfg.eval.radii,
        cfg.eval.points_per_radius,
        derive_seed(cfg.seed, SWEEP_STREAM),
    )?)
}

pub fn cmd_sweep(cfg: &RunConfig, inputs: &Inputs) -> Result<(PathBuf, Vec<SweepRow>), CliError> {
    let rows = sweep_rows(cfg, inputs)?;
    prepare_output(cfg)?;
    let path = cfg.output_dir.join(SWEEP_FILE);
    formats::write_sweep(&path, &rows)?;
    Ok((path, rows))
}

pub fn slice_file(cfg: &RunConfig, method: Method) -> PathBuf {
    cfg.output_dir.join(format!("slice_{method}.csv"))
}

pub fn cmd_slice(
    cfg: &RunConfig,
    method: Method,
    inputs: &Inputs,
) -> Result<(PathBuf, Vec<SliceRow>), CliError> {
    cfg.validate()?;
    let mpath = inputs.measurements(cfg);
    require(&mpath, "run `rigid-pinn simulate` first or pass --measurements")?;
    let m = formats::read_measurements(&mpath)?;
    let est = build_estimator(cfg, method, &m, &inputs.checkpoint(cfg))?;
    let truth = ground_truth(cfg)?;
    let e = &cfg.eval;
    let rows = field_slice(&est, &truth, e.slice_radius, e.n_theta, e.n_phi)?;
    prepare_output(cfg)?;
    let path = slice_file(cfg, method);
    formats::write_slice(&path, &rows)?;
    Ok((path, rows))
}
