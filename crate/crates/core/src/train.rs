//! Loss weighting, Adam and the full-batch training loop.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Measurements, ScatteringScene};
use crate::geom::{fibonacci_sphere, random_shell};
use crate::nn::{
    init_params, loss_and_gradient, loss_terms, HelmholtzForm, LossTerms, MlpArch, MlpParams,
    Physics, TrainingBatch,
};
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Weights of the data, PDE and boundary terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        for l in [self.lambda1, self.lambda2, self.lambda3] {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Domain("loss weights must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// `lambda1 = 1`, `lambda2 = (c/omega)^2 = 1/k^2`, `lambda3 = a`.
pub fn default_weights(k: f64, a: f64) -> Result<LossWeights> {
    if !(k > 0.0 && a > 0.0) {
        return Err(Error::Domain("wavenumber and radius must be positive"));
    }
    Ok(LossWeights {
        lambda1: 1.0,
        lambda2: 1.0 / (k * k),
        lambda3: a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub config: AdamConfig,
}

impl AdamState {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            config,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grad: &[f64]) -> Result<()> {
    if params.len() != state.m.len() || grad.len() != state.m.len() {
        return Err(Error::Shape {
            what: "Adam parameter/gradient",
            expected: state.m.len(),
            found: if params.len() != state.m.len() {
                params.len()
            } else {
                grad.len()
            },
        });
    }
    let AdamConfig {
        lr,
        beta1,
        beta2,
        eps,
    } = state.config;
    state.t += 1;
    let bc1 = 1.0 - libm::pow(beta1, state.t as f64);
    let bc2 = 1.0 - libm::pow(beta2, state.t as f64);
    for i in 0..params.len() {
        let g = grad[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
    }
    Ok(())
}

/// Loss values at one epoch, evaluated before that epoch's update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub epoch: usize,
    pub l_data: f64,
    pub l_pde: f64,
    pub l_bc: f64,
    pub weighted_total: f64,
}

impl LossReport {
    fn new(epoch: usize, t: &LossTerms, w: &LossWeights) -> Self {
        Self {
            epoch,
            l_data: t.data,
            l_pde: t.pde,
            l_bc: t.bc,
            weighted_total: t.weighted(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub arch: MlpArch,
    pub adam: AdamConfig,
    pub epochs: usize,
    /// Number of PDE collocation points `D`.
    pub pde_points: usize,
    /// Number of boundary points `B` on `r = a`.
    pub bc_points: usize,
    /// Outer radius of the collocation shell `[a, shell_outer]` (m).
    pub shell_outer: f64,
    /// `None` uses [`default_weights`].
    pub weights: Option<LossWeights>,
    pub helmholtz: HelmholtzForm,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            arch: MlpArch::default(),
            adam: AdamConfig::default(),
            epochs: 10_000,
            pde_points: 1000,
            bc_points: 500,
            shell_outer: 0.15,
            weights: None,
            helmholtz: HelmholtzForm::Standard,
            seed: 0,
        }
    }
}

/// Sub-seed streams derived from [`TrainConfig::seed`].
pub const INIT_STREAM: u64 = 1;
pub const COLLOCATION_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: MlpParams,
    pub history: Vec<LossReport>,
    /// Loss after the final update.
    pub final_terms: LossTerms,
    pub weights: LossWeights,
}

/// Data, collocation and boundary sets for a scene; collocation points are
/// uniform in the shell `[a, shell_outer]`, boundary points a Fibonacci
/// lattice on `r = a`.
pub fn build_batch(
    scene: &ScatteringScene,
    measurements: &Measurements,
    cfg: &TrainConfig,
) -> Result<TrainingBatch> {
    if measurements.is_empty() {
        return Err(Error::Domain("no measurements to train on"));
    }
    let pde_points = if cfg.pde_points == 0 {
        Vec::new()
    } else {
        random_shell(
            cfg.pde_points,
            scene.a,
            cfg.shell_outer,
            derive_seed(cfg.seed, COLLOCATION_STREAM),
        )?
    };
    let bc_points = if cfg.bc_points == 0 {
        Vec::new()
    } else {
        fibonacci_sphere(cfg.bc_points, scene.a)?
    };
    Ok(TrainingBatch {
        data_points: measurements.positions.clone(),
        data_values: measurements.pressures.clone(),
        pde_points,
        bc_points,
    })
}

pub fn train(
    scene: &ScatteringScene,
    measurements: &Measurements,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with(scene, measurements, cfg, |_| {})
}

/// [`train`] with a per-epoch callback.
pub fn train_with(
    scene: &ScatteringScene,
    measurements: &Measurements,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&LossReport),
) -> Result<TrainOutcome> {
    if cfg.epochs == 0 {
        return Err(Error::Domain("epochs must be at least 1"));
    }
    scene.validate()?;
    cfg.arch.validate()?;
    let weights = match cfg.weights {
        Some(w) => w,
        None => default_weights(scene.k(), scene.a)?,
    };
    weights.validate()?;
    let physics = Physics {
        k: scene.k(),
        form: cfg.helmholtz,
    };
    let batch = build_batch(scene, measurements, cfg)?;
    let mut params = init_params(cfg.arch, derive_seed(cfg.seed, INIT_STREAM))?;
    let mut adam = AdamState::new(params.len(), cfg.adam);
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (terms, grad) = loss_and_gradient(&params, &batch, physics, &weights)?;
        let report = LossReport::new(epoch, &terms, &weights);
        on_epoch(&report);
        history.push(report);
        adam_step(&mut adam, &mut params.values, &grad)?;
    }
    let final_terms = loss_terms(&params, &batch, physics)?;
    Ok(TrainOutcome {
        params,
        history,
        final_terms,
        weights,
    })
}
