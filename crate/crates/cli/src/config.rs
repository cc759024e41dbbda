//! JSON run configuration. Every field has a default, so `{}` is the
//! reference experiment: a 0.042 m sphere at 1 kHz, two unit sources, 32
//! microphones, 30 dB SNR and a 3x4 tanh network trained for 10 000 epochs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rigid_pinn_core::eval::{DEFAULT_POINTS_PER_RADIUS, DEFAULT_SWEEP_RADII};
use rigid_pinn_core::field::{PointSource, ScatteringScene};
use rigid_pinn_core::geom::{fibonacci_sphere, mic_array_layout, CartPoint};
use rigid_pinn_core::nn::{Activation, HelmholtzForm, MlpArch};
use rigid_pinn_core::pw::{PwConfig, DEFAULT_REG};
use rigid_pinn_core::sh::DEFAULT_ORDER;
use rigid_pinn_core::specfun::MAX_ORDER;
use rigid_pinn_core::train::{AdamConfig, LossWeights, TrainConfig};
use rigid_pinn_core::Complex;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scene: SceneConfig,
    pub array: ArrayConfig,
    /// `null` disables noise.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub sh: ShConfig,
    pub pl: PlConfig,
    pub pinn: PinnConfig,
    pub eval: EvalConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            array: ArrayConfig::default(),
            snr_db: Some(30.0),
            seed: 0,
            sh: ShConfig::default(),
            pl: PlConfig::default(),
            pinn: PinnConfig::default(),
            eval: EvalConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    /// Sphere radius (m).
    pub radius: f64,
    /// Speed of sound (m/s).
    pub sound_speed: f64,
    /// Frequency (Hz).
    pub frequency: f64,
    pub sources: Vec<SourceConfig>,
}

impl Default for SceneConfig {
    fn default() -> Self {
        let reference = ScatteringScene::reference();
        Self {
            radius: reference.a,
            sound_speed: reference.c,
            frequency: reference.f,
            sources: reference
                .sources
                .iter()
                .map(|s| SourceConfig {
                    position: s.position.to_array(),
                    amplitude: [s.amplitude.re, s.amplitude.im],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub position: [f64; 3],
    /// `[re, im]`
    #[serde(default = "unit_amplitude")]
    pub amplitude: [f64; 2],
}

fn unit_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArrayConfig {
    /// 32-point pentakis dodecahedron.
    #[default]
    Pentakis,
    Fibonacci { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShConfig {
    pub order: usize,
}

impl Default for ShConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlConfig {
    /// Dictionary size; `null` uses the microphone directions.
    pub directions: Option<usize>,
    pub reg: f64,
    /// Steering series order; `null` picks `ceil(ka) + 10`.
    pub series_order: Option<usize>,
}

impl Default for PlConfig {
    fn default() -> Self {
        Self {
            directions: None,
            reg: DEFAULT_REG,
            series_order: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HelmholtzChoice {
    #[default]
    Standard,
    InvertedCoefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PinnConfig {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub epochs: usize,
    pub pde_points: usize,
    pub bc_points: usize,
    pub shell_outer: f64,
    /// `[lambda1, lambda2, lambda3]`; `null` uses `[1, 1/k^2, a]`.
    pub weights: Option<[f64; 3]>,
    pub helmholtz: HelmholtzChoice,
}

impl Default for PinnConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            hidden_layers: t.arch.hidden_layers,
            hidden_width: t.arch.hidden_width,
            lr: t.adam.lr,
            beta1: t.adam.beta1,
            beta2: t.adam.beta2,
            eps: t.adam.eps,
            epochs: t.epochs,
            pde_points: t.pde_points,
            bc_points: t.bc_points,
            shell_outer: t.shell_outer,
            weights: None,
            helmholtz: HelmholtzChoice::Standard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub radii: Vec<f64>,
    pub points_per_radius: usize,
    pub slice_radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            radii: DEFAULT_SWEEP_RADII.to_vec(),
            points_per_radius: DEFAULT_POINTS_PER_RADIUS,
            slice_radius: 0.072,
            n_theta: 90,
            n_phi: 180,
        }
    }
}

/// Sub-seeds derived from [`RunConfig::seed`].
pub const NOISE_STREAM: u64 = 3;
pub const SWEEP_STREAM: u64 = 4;

fn invalid(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.to_string(),
        message: msg.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must be a positive finite number, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            path: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Checks every field against the preconditions of the operations that
    /// will consume it.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.scene;
        positive("scene.radius", s.radius)?;
        positive("scene.sound_speed", s.sound_speed)?;
        positive("scene.frequency", s.frequency)?;
        let max_eval = self
            .eval
            .radii
            .iter()
            .copied()
            .chain([self.eval.slice_radius, self.pinn.shell_outer])
            .fold(s.radius, f64::max);
        for (i, src) in s.sources.iter().enumerate() {
            let p = CartPoint::from_array(src.position);
            if !p.is_finite() {
                return Err(invalid(&format!("scene.sources[{i}].position"), "must be finite"));
            }
            if !(p.norm() > max_eval) {
                return Err(invalid(
                    &format!("scene.sources[{i}].position"),
                    format!(
                        "source at distance {} must lie outside every evaluation radius ({max_eval} m)",
                        p.norm()
                    ),
                ));
            }
            if !(src.amplitude[0].is_finite() && src.amplitude[1].is_finite()) {
                return Err(invalid(&format!("scene.sources[{i}].amplitude"), "must be finite"));
            }
        }
        if let ArrayConfig::Fibonacci { count } = self.array {
            if count == 0 {
                return Err(invalid("array.count", "must be at least 1"));
            }
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() {
                return Err(invalid("snr_db", "must be a number or null"));
            }
        }
        if self.sh.order > MAX_ORDER {
            return Err(invalid("sh.order", format!("must not exceed {MAX_ORDER}")));
        }
        if !(self.pl.reg >= 0.0 && self.pl.reg.is_finite()) {
            return Err(invalid("pl.reg", "must be finite and non-negative"));
        }
        if self.pl.directions == Some(0) {
            return Err(invalid("pl.directions", "must be at least 1"));
        }
        if let Some(n) = self.pl.series_order {
            let ka = self.scene_k() * s.radius;
            let min = ka.ceil() as usize + 2;
            if n < min || n > MAX_ORDER {
                return Err(invalid(
                    "pl.series_order",
                    format!("must lie in [{min}, {MAX_ORDER}] for ka = {ka:.4}"),
                ));
            }
        }
        let p = &self.pinn;
        if p.hidden_layers > 0 && p.hidden_width == 0 {
            return Err(invalid("pinn.hidden_width", "must be at least 1"));
        }
        positive("pinn.lr", p.lr)?;
        if !(0.0..1.0).contains(&p.beta1) {
            return Err(invalid("pinn.beta1", "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&p.beta2) {
            return Err(invalid("pinn.beta2", "must lie in [0, 1)"));
        }
        positive("pinn.eps", p.eps)?;
        if p.epochs == 0 {
            return Err(invalid("pinn.epochs", "must be at least 1"));
        }
        if !(p.shell_outer.is_finite() && p.shell_outer >= s.radius) {
            return Err(invalid("pinn.shell_outer", "must be at least scene.radius"));
        }
        if let Some(w) = p.weights {
            for (i, l) in w.iter().enumerate() {
                if !(l.is_finite() && *l >= 0.0) {
                    return Err(invalid(
                        &format!("pinn.weights[{i}]"),
                        "must be finite and non-negative",
                    ));
                }
            }
        }
        let e = &self.eval;
        if e.radii.is_empty() {
            return Err(invalid("eval.radii", "must not be empty"));
        }
        for (i, r) in e.radii.iter().enumerate() {
            if !(r.is_finite() && *r >= s.radius) {
                return Err(invalid(
                    &format!("eval.radii[{i}]"),
                    "must be at least scene.radius",
                ));
            }
        }
        if e.points_per_radius == 0 {
            return Err(invalid("eval.points_per_radius", "must be at least 1"));
        }
        if !(e.slice_radius.is_finite() && e.slice_radius >= s.radius) {
            return Err(invalid("eval.slice_radius", "must be at least scene.radius"));
        }
        if e.n_theta < 2 {
            return Err(invalid("eval.n_theta", "must be at least 2"));
        }
        if e.n_phi < 2 {
            return Err(invalid("eval.n_phi", "must be at least 2"));
        }
        Ok(())
    }

    fn scene_k(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.scene.frequency / self.scene.sound_speed
    }

    pub fn scene(&self) -> ScatteringScene {
        ScatteringScene {
            a: self.scene.radius,
            c: self.scene.sound_speed,
            f: self.scene.frequency,
            sources: self
                .scene
                .sources
                .iter()
                .map(|s| PointSource {
                    position: CartPoint::from_array(s.position),
                    amplitude: Complex::new(s.amplitude[0], s.amplitude[1]),
                })
                .collect(),
        }
    }

    pub fn mic_positions(&self) -> Result<Vec<CartPoint>, CliError> {
        let a = self.scene.radius;
        Ok(match self.array {
            ArrayConfig::Pentakis => mic_array_layout(a)?,
            ArrayConfig::Fibonacci { count } => fibonacci_sphere(count, a)?,
        })
    }

    pub fn pw_config(&self, mics: &[CartPoint]) -> Result<PwConfig, CliError> {
        let k = self.scene_k();
        let mut cfg = PwConfig::from_mics(mics, k, self.scene.radius);
        if let Some(l) = self.pl.directions {
            cfg.directions = fibonacci_sphere(l, 1.0)?;
        }
        cfg.reg = self.pl.reg;
        cfg.order = self.pl.series_order;
        Ok(cfg)
    }

    pub fn train_config(&self) -> TrainConfig {
        let p = &self.pinn;
        TrainConfig {
            arch: MlpArch {
                hidden_layers: p.hidden_layers,
                hidden_width: p.hidden_width,
                activation: Activation::Tanh,
            },
            adam: AdamConfig {
                lr: p.lr,
                beta1: p.beta1,
                beta2: p.beta2,
                eps: p.eps,
            },
            epochs: p.epochs,
            pde_points: p.pde_points,
            bc_points: p.bc_points,
            shell_outer: p.shell_outer,
            weights: p.weights.map(|[lambda1, lambda2, lambda3]| LossWeights {
                lambda1,
                lambda2,
                lambda3,
            }),
            helmholtz: match p.helmholtz {
                HelmholtzChoice::Standard => HelmholtzForm::Standard,
                HelmholtzChoice::InvertedCoefficient => HelmholtzForm::InvertedCoefficient,
            },
            seed: self.seed,
        }
    }
}
