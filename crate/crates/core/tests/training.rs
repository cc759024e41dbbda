use rigid_pinn_core::field::{add_noise, normalize, simulate, Measurements, ScatteringScene};
use rigid_pinn_core::geom::mic_array_layout;
use rigid_pinn_core::nn::{init_params, MlpArch};
use rigid_pinn_core::rng::derive_seed;
use rigid_pinn_core::train::{train, LossWeights, TrainConfig, INIT_STREAM};

fn measurements(snr_db: Option<f64>) -> (ScatteringScene, Measurements) {
    let scene = ScatteringScene::reference();
    let mut m = simulate(&scene, &mic_array_layout(scene.a).unwrap()).unwrap();
    if let Some(snr) = snr_db {
        m = add_noise(&m, snr, 0).unwrap();
    }
    (scene, normalize(&m).unwrap())
}

#[test]
fn one_epoch_moves_parameters() {
    let (scene, m) = measurements(Some(30.0));
    let cfg = TrainConfig {
        epochs: 1,
        ..TrainConfig::default()
    };
    let out = train(&scene, &m, &cfg).unwrap();
    assert_eq!(out.history.len(), 1);
    assert_eq!(out.history[0].epoch, 0);
    let init = init_params(MlpArch::default(), derive_seed(cfg.seed, INIT_STREAM)).unwrap();
    assert_ne!(out.params, init);
    for (a, b) in out.params.values.iter().zip(&init.values) {
        assert!((a - b).abs() <= cfg.adam.lr * (1.0 + 1e-12));
    }
}

#[test]
fn training_is_deterministic() {
    let (scene, m) = measurements(Some(30.0));
    let cfg = TrainConfig {
        epochs: 300,
        seed: 11,
        ..TrainConfig::default()
    };
    let a = train(&scene, &m, &cfg).unwrap();
    let b = train(&scene, &m, &cfg).unwrap();
    assert_eq!(a, b);
    let c = train(&scene, &m, &TrainConfig { seed: 12, ..cfg }).unwrap();
    assert_ne!(a.params, c.params);
}

#[test]
fn pure_regression_reduces_data_loss() {
    let (scene, m) = measurements(None);
    let cfg = TrainConfig {
        epochs: 500,
        weights: Some(LossWeights {
            lambda1: 1.0,
            lambda2: 0.0,
            lambda3: 0.0,
        }),
        ..TrainConfig::default()
    };
    let out = train(&scene, &m, &cfg).unwrap();
    assert!(out.final_terms.data < out.history[0].l_data);
}

#[test]
fn reference_run_loss_windows() {
    let (scene, m) = measurements(Some(30.0));
    let out = train(&scene, &m, &TrainConfig::default()).unwrap();
    assert_eq!(out.history.len(), 10_000);
    for r in &out.history {
        assert!(r.l_data >= 0.0 && r.l_pde >= 0.0 && r.l_bc >= 0.0);
        assert!(r.weighted_total.is_finite());
    }
    let totals: Vec<f64> = out.history.iter().map(|r| r.weighted_total).collect();
    let windows = totals.len() - 500;
    let good = (0..windows).filter(|&s| totals[s + 500] <= totals[s]).count();
    assert!(good as f64 >= 0.95 * windows as f64, "{good}/{windows}");
}

#[test]
fn rejects_bad_configs() {
    let (scene, m) = measurements(None);
    assert!(train(&scene, &m, &TrainConfig { epochs: 0, ..TrainConfig::default() }).is_err());
    let neg = TrainConfig {
        weights: Some(LossWeights {
            lambda1: -1.0,
            lambda2: 0.0,
            lambda3: 0.0,
        }),
        ..TrainConfig::default()
    };
    assert!(train(&scene, &m, &neg).is_err());
    let empty = Measurements::new(vec![], vec![]);
    if let Ok(e) = empty {
        assert!(train(&scene, &e, &TrainConfig::default()).is_err());
    }
}
